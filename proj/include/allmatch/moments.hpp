#pragma once

// Exact ensemble-average formulas for the all-matchings count and the AMM
// estimator: uniform random 0-1 matrices and uniform random m-edge bipartite
// graphs, plus the brute-force ensemble oracle that checks them.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/integer.hpp>

#include "ensemble.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "numeric.hpp"

namespace allmatch {

/// Coefficient sequences of f(m, n) = a(n) f(m-1, n) + c(n) f(m-1, n-1).
struct RecursionCoeffs {
    std::function<BigRatio(std::size_t)> a;
    std::function<BigRatio(std::size_t)> c;
};

namespace detail {

inline void require_le(std::size_t m, std::size_t n) {
    if (m > n) throw domain_error("formula needs m <= n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
}

inline void require_edges(std::size_t n, std::size_t m) {
    if (m > n * n)
        throw domain_error("m=" + std::to_string(m) + " edges exceeds n^2=" + std::to_string(n * n));
}

} // namespace detail

/// Complete homogeneous symmetric polynomial h_d(x_0, ..., x_k).
template <class T>
T complete_homogeneous(const std::vector<T>& xs, std::size_t d) {
    std::vector<T> h(d + 1, T(0));
    h[0] = T(1);
    for (const auto& x : xs)
        for (std::size_t e = 1; e <= d; ++e) h[e] += x * h[e - 1];
    return h[d];
}

/// f(m, n) by dynamic programming over (p, l), p <= m, p <= l <= n, with f(0, l) = 1.
inline BigRatio lemma1_solve(std::size_t m, std::size_t n, const RecursionCoeffs& coeffs) {
    detail::require_le(m, n);
    std::vector<BigRatio> a(n + 1), c(n + 1);
    for (std::size_t l = 1; l <= n; ++l) {
        a[l] = coeffs.a(l);
        c[l] = coeffs.c(l);
        if (a[l] <= 0 || c[l] <= 0) throw domain_error("recursion coefficients must be positive at l=" + std::to_string(l));
    }
    std::vector<BigRatio> prev(n + 1, BigRatio(1)), cur(n + 1);
    for (std::size_t p = 1; p <= m; ++p) {
        for (std::size_t l = p; l <= n; ++l) cur[l] = a[l] * prev[l] + c[l] * prev[l - 1];
        std::swap(prev, cur);
    }
    return prev[n];
}

/// Closed form of the same recursion:
///   f(m, n) = sum_{k=0}^{m} c(n) c(n-1) ... c(n-k+1) * h_{m-k}(a(n), a(n-1), ..., a(n-k)).
inline BigRatio lemma1_closed_form(std::size_t m, std::size_t n, const RecursionCoeffs& coeffs) {
    detail::require_le(m, n);
    BigRatio total = 0, cprod = 1;
    std::vector<BigRatio> as;
    for (std::size_t k = 0; k <= m; ++k) {
        if (k > 0) cprod *= coeffs.c(n - k + 1);
        as.push_back(coeffs.a(n - k));
        total += cprod * complete_homogeneous(as, m - k);
    }
    return total;
}

/// Mean of AM over uniform m x n 0-1 matrices: sum_k C(m,k) P(n,k) / 2^k.
inline BigRatio thm3_mean(std::size_t m, std::size_t n) {
    detail::require_le(m, n);
    BigRatio s = 0;
    for (std::size_t k = 0; k <= m; ++k)
        s += make_ratio(binomial(static_cast<std::int64_t>(m), static_cast<std::int64_t>(k)) *
                            falling(static_cast<std::int64_t>(n), static_cast<std::int64_t>(k)),
                        pow2(k));
    return s;
}

inline RecursionCoeffs thm3_coeffs() {
    return {[](std::size_t) { return BigRatio(1); }, [](std::size_t l) { return BigRatio(l, 2); }};
}

inline RecursionCoeffs thm4_coeffs() {
    return {[](std::size_t l) { return BigRatio(l + 2, 2); }, [](std::size_t l) { return BigRatio(l * l + 3 * l, 4); }};
}

/// Same quantity as thm3_mean through the row recursion (a = 1, c(l) = l/2).
inline BigRatio thm3_mean_recursive(std::size_t m, std::size_t n) { return lemma1_solve(m, n, thm3_coeffs()); }

/// Average over uniform m x n matrices of the exact AMM second moment E(X^2),
/// via the row recursion with a(l) = (l+2)/2, c(l) = (l^2+3l)/4.
inline BigRatio thm4_second_moment(std::size_t m, std::size_t n) { return lemma1_solve(m, n, thm4_coeffs()); }

/// Closed form: sum_k P(n,k) P(n+3,k) / 2^(m+k) * h_{m-k}(n+2, n+1, ..., n+2-k).
inline BigRatio thm4_second_moment_closed_form(std::size_t m, std::size_t n) {
    detail::require_le(m, n);
    BigRatio total = 0;
    std::vector<BigCount> xs;
    const auto ni = static_cast<std::int64_t>(n);
    for (std::size_t k = 0; k <= m; ++k) {
        const auto ki = static_cast<std::int64_t>(k);
        xs.emplace_back(ni + 2 - ki);
        total += make_ratio(falling(ni, ki) * falling(ni + 3, ki) * complete_homogeneous(xs, m - k), pow2(m + k));
    }
    return total;
}

struct Thm5Bounds {
    BigRatio h;           ///< (n!)^2 / 2^n * b_{k*}
    BigRatio upper;       ///< n * h
    BigRatio loose_upper; ///< (n+1) * h, the bound implied by the n+1 summands
    std::size_t kstar = 0;
};

/// h(n) with b_k = 2^k / ((n-k)! (k!)^2) and k* = floor(-1 + sqrt(2n+3)),
/// the largest k with b_k >= b_{k-1}.
inline Thm5Bounds thm5_bounds(std::size_t n) {
    if (n == 0) throw domain_error("thm5 bounds need n >= 1");
    const std::size_t kstar = static_cast<std::size_t>(boost::multiprecision::sqrt(BigCount(2 * n + 3))) - 1;
    const auto ni = static_cast<std::int64_t>(n), ki = static_cast<std::int64_t>(kstar);
    const BigCount nf = factorial(ni), kf = factorial(ki);
    const BigRatio b = make_ratio(pow2(kstar), factorial(ni - ki) * kf * kf);
    Thm5Bounds out;
    out.kstar = kstar;
    out.h = make_ratio(nf * nf, pow2(n)) * b;
    out.upper = out.h * n;
    out.loose_upper = out.h * (n + 1);
    return out;
}

/// E_A(E_s(X^2)) / E_A(E_s(X))^2 over uniform n x n matrices.
inline BigRatio thm6_ratio(std::size_t n) {
    if (n == 0) throw domain_error("thm6 ratio needs n >= 1");
    const BigRatio mean = thm3_mean(n, n);
    return thm4_second_moment(n, n) / (mean * mean);
}

/// Diagnostic lower bound on E_A(E_s(X^2)) for n x n:
///   sum_k (n!)^2 (n+3)! / 2^(2n) * 2^k (k+2)^k / ((k!)^2 (k+3)! (n-k)!).
inline BigRatio thm6_lower_diag(std::size_t n) {
    const auto ni = static_cast<std::int64_t>(n);
    const BigCount nf = factorial(ni);
    const BigRatio front = make_ratio(nf * nf * factorial(ni + 3), pow2(2 * n));
    BigRatio s = 0;
    for (std::int64_t k = 0; k <= ni; ++k) {
        const BigCount kf = factorial(k);
        s += make_ratio(pow2(static_cast<std::uint64_t>(k)) * ipow(BigCount(k + 2), static_cast<std::uint64_t>(k)),
                        kf * kf * factorial(k + 3) * factorial(ni - k));
    }
    return front * s;
}

/// Exact test of ratio >= n^(sqrt(n)/2), i.e. ratio^2 >= n^sqrt(n).
/// sqrt(n) is bracketed by lo/d < sqrt(n) < (lo+1)/d and the bracket refined
/// (d doubling) until integer power comparisons decide; for a perfect square
/// the comparison is direct.
inline bool thm6_meets_threshold(const BigRatio& ratio, std::size_t n) {
    if (n == 0) throw domain_error("threshold needs n >= 1");
    const BigCount p = numerator(ratio), q = denominator(ratio);
    const BigCount nn(n);
    const auto root = static_cast<std::uint64_t>(boost::multiprecision::sqrt(nn));
    if (root * root == n) return p * p >= ipow(nn, root) * q * q;
    for (std::uint64_t d = 1; d <= (std::uint64_t{1} << 16); d *= 2) {
        const auto lo = static_cast<std::uint64_t>(boost::multiprecision::sqrt(BigCount(nn * d * d)));
        const BigCount lhs_num = ipow(p, 2 * d), lhs_den = ipow(q, 2 * d);
        if (lhs_num >= ipow(nn, lo + 1) * lhs_den) return true;
        if (lhs_num <= ipow(nn, lo) * lhs_den) return false;
    }
    throw consistency_error("threshold comparison did not resolve for n=" + std::to_string(n));
}

/// n^(sqrt(n)/2) as a double, for display only.
inline double thm6_threshold_value(std::size_t n) {
    const double x = static_cast<double>(n);
    return std::pow(x, std::sqrt(x) / 2.0);
}

/// P(Binomial(n^2, 1/2) >= ceil((1/2 + eps) n^2)), 0 < eps <= 1/50.
inline BigRatio thm7_tail(std::size_t n, const BigRatio& eps) {
    if (eps <= 0 || eps > BigRatio(1, 50)) throw domain_error("thm7 needs 0 < eps <= 1/50, got " + to_exact_string(eps));
    const std::size_t cells = n * n;
    const BigRatio limit = (BigRatio(1, 2) + eps) * cells;
    BigCount lower = numerator(limit) / denominator(limit);
    if (BigRatio(lower) < limit) lower += 1;
    BigCount s = 0;
    for (auto i = static_cast<std::int64_t>(lower); i <= static_cast<std::int64_t>(cells); ++i)
        s += binomial(static_cast<std::int64_t>(cells), i);
    return make_ratio(s, pow2(cells));
}

namespace detail {

/// F_n(p) with the zero convention for negative arguments.
inline BigCount partial_derangement_or_zero(std::int64_t n, std::int64_t p) {
    if (n < 0 || p < 0 || p > n) return 0;
    BigCount s = 0;
    for (std::int64_t r = 0; r <= p; ++r) {
        BigCount term = binomial(p, r) * falling(n - r, p - r);
        if (r % 2)
            s -= term;
        else
            s += term;
    }
    return s;
}

} // namespace detail

/// Injective placements of p labelled letters into n envelopes with no letter
/// in its own (distinct) forbidden envelope:
///   F_n(p) = sum_r (-1)^r C(p,r) P(n-r, p-r).
inline BigCount partial_derangement(std::int64_t n, std::int64_t p) {
    if (n < 0 || p < 0) throw domain_error("partial derangement needs nonnegative arguments");
    return detail::partial_derangement_or_zero(n, p);
}

/// Probability that a given set of t edges lies in a uniform m-edge bipartite
/// graph on n + n vertices: C(n^2 - t, m - t) / C(n^2, m); 0 when t > m.
inline BigRatio edge_set_factor(std::size_t n, std::size_t m, std::size_t t) {
    detail::require_edges(n, m);
    if (t > m) return 0;
    const auto cells = static_cast<std::int64_t>(n * n);
    return make_ratio(binomial(cells - static_cast<std::int64_t>(t), static_cast<std::int64_t>(m - t)),
                      binomial(cells, static_cast<std::int64_t>(m)));
}

/// Probability that a fixed k-matching is contained in a uniform m-edge graph;
/// 0 when k > m or k > n.
inline BigRatio edge_factor(std::size_t n, std::size_t m, std::size_t k) {
    detail::require_edges(n, m);
    if (k > n) return 0;
    return edge_set_factor(n, m, k);
}

/// E(AM(G)) over uniform bipartite graphs with n + n vertices and m edges.
inline BigRatio thm8_mean(std::size_t n, std::size_t m) {
    detail::require_edges(n, m);
    const auto ni = static_cast<std::int64_t>(n);
    BigRatio s = 0;
    for (std::int64_t k = 0; k <= ni; ++k) {
        const BigCount c = binomial(ni, k);
        s += BigRatio(c * c * factorial(k)) * edge_factor(n, m, static_cast<std::size_t>(k));
    }
    return s;
}

/// E(AM(G)^2) over the same ensemble: pairs (M(k), M'(i)) are counted by their
/// overlap j, with p letters of M' outside M's rows. Pairs with i < k appear in
/// both sums, pairs with i = k once.
inline BigRatio thm8_second_moment(std::size_t n, std::size_t m) {
    detail::require_edges(n, m);
    const auto ni = static_cast<std::int64_t>(n);

    // sum over M'(i) of E(X_M X_M') for one fixed k-matching M
    auto inner = [&](std::int64_t k, std::int64_t i) {
        BigRatio s = 0;
        for (std::int64_t p = 0; p <= std::min(i, ni - k); ++p) {
            const BigCount choose = binomial(ni - k, p) * binomial(k, i - p) * falling(ni - i + p, p);
            if (choose == 0) continue;
            for (std::int64_t j = 0; j <= i - p; ++j) {
                const BigCount ways = binomial(i - p, j) * detail::partial_derangement_or_zero(ni - j, i - p - j);
                if (ways == 0) continue;
                s += BigRatio(choose * ways) * edge_set_factor(n, m, static_cast<std::size_t>(k + i - j));
            }
        }
        return s;
    };

    BigRatio total = 0;
    for (std::int64_t k = 0; k <= ni; ++k) {
        const BigCount c = binomial(ni, k);
        const BigRatio count_k(c * c * factorial(k));
        for (std::int64_t i = 0; i <= k; ++i) {
            const BigRatio v = count_k * inner(k, i);
            total += (i < k) ? v * 2 : v;
        }
    }
    return total;
}

enum class EnsembleStatistic {
    mean_am,    ///< E(AM)
    mean_am_sq, ///< E(AM^2)
    mean_amm_m2 ///< E(E_s(X^2)) of AMM
};

/// Exhaustive probability-weighted average of an exact statistic over the
/// ensemble's support.
inline BigRatio ensemble_moment_oracle(const EnsembleSpec& spec, EnsembleStatistic stat) {
    auto value = [&](const ZeroOneMatrix& a) -> BigCount {
        switch (stat) {
        case EnsembleStatistic::mean_am:
            return exact_am(a);
        case EnsembleStatistic::mean_am_sq: {
            BigCount v = exact_am(a);
            return v * v;
        }
        case EnsembleStatistic::mean_amm_m2:
            return exact_second_moment_amm(a);
        }
        return 0;
    };
    const bool uniform = spec.kind != EnsembleKind::bernoulli || spec.p == BigRatio(1, 2) || spec.p == 0 || spec.p == 1;
    if (uniform) {
        BigCount sum = 0;
        enumerate_ensemble(spec, [&](const ZeroOneMatrix& a) { sum += value(a); });
        return make_ratio(sum, support_size(spec));
    }
    BigRatio sum = 0;
    enumerate_ensemble(spec, [&](const ZeroOneMatrix& a) { sum += ensemble_probability(spec, a) * BigRatio(value(a)); });
    return sum;
}

/// Exact quantities for uniform n x n matrices.
struct MomentReport {
    std::size_t m = 0;
    std::size_t n = 0;
    BigRatio mean;
    BigRatio second_moment;
    BigRatio ratio;
    Thm5Bounds bounds;
};

inline MomentReport moment_report(std::size_t n) {
    MomentReport r;
    r.m = r.n = n;
    r.mean = thm3_mean(n, n);
    r.second_moment = thm4_second_moment(n, n);
    r.ratio = r.second_moment / (r.mean * r.mean);
    r.bounds = thm5_bounds(n);
    return r;
}

} // namespace allmatch
