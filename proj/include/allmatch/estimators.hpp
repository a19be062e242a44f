#pragma once

// Single-trial RM and AMM estimators, a seeded multi-trial harness, and exact
// coin-path enumeration of both estimators' decision trees.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "exact.hpp"
#include "matrix.hpp"
#include "numeric.hpp"
#include "random.hpp"

namespace allmatch {

/// Runs one estimator pass over A. `choose(q)` must return an index in [0, q)
/// into the candidate list W of the current row. W lists the skip sentinel
/// first (AMM only), then the available 1-columns in increasing order.
/// RM returns 0 as soon as some row has an empty W.
template <class Chooser>
BigCount run_estimator(const ZeroOneMatrix& a, Method method, Chooser&& choose) {
    if (method == Method::rm && !a.square()) throw shape_error("RM needs a square matrix");
    const std::size_t n = a.cols();
    const bool skip = method == Method::amm;
    std::vector<char> used(n, 0);
    std::vector<std::size_t> w;
    w.reserve(n);

    BigCount big = 1;
    std::uint64_t small = 1;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        w.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (!used[j] && a(i, j)) w.push_back(j);
        const std::size_t q = w.size() + (skip ? 1 : 0);
        if (q == 0) return 0;
        if (small > std::numeric_limits<std::uint64_t>::max() / q) {
            big *= small;
            small = 1;
        }
        small *= q;
        const std::size_t pick = choose(q);
        if (skip && pick == 0) continue;
        used[w[pick - (skip ? 1 : 0)]] = 1;
    }
    big *= small;
    return big;
}

/// One RM trial: unbiased for per(A). A square.
inline BigCount rm_trial(const ZeroOneMatrix& a, RandomStream& rng) {
    return run_estimator(a, Method::rm, [&](std::size_t q) { return static_cast<std::size_t>(rng.below(q)); });
}

/// One AMM trial: unbiased for AM(A). Any shape; output >= 1.
inline BigCount amm_trial(const ZeroOneMatrix& a, RandomStream& rng) {
    return run_estimator(a, Method::amm, [&](std::size_t q) { return static_cast<std::size_t>(rng.below(q)); });
}

inline BigCount run_trial(const ZeroOneMatrix& a, Method method, RandomStream& rng) {
    return method == Method::rm ? rm_trial(a, rng) : amm_trial(a, rng);
}

/// Exact Monte Carlo accumulators: N, sum x, sum x^2.
struct TrialStats {
    std::uint64_t trials = 0;
    BigCount sum = 0;
    BigCount sum_sq = 0;

    void add(const BigCount& x) {
        ++trials;
        sum += x;
        sum_sq += x * x;
    }

    TrialStats& merge(const TrialStats& other) {
        trials += other.trials;
        sum += other.sum;
        sum_sq += other.sum_sq;
        return *this;
    }

    BigRatio mean() const { return make_ratio(sum, require_trials()); }
    BigRatio second_moment() const { return make_ratio(sum_sq, require_trials()); }

    /// N * sum x^2 / (sum x)^2; empty when every sample was 0.
    std::optional<BigRatio> empirical_critical_ratio() const {
        require_trials();
        if (sum == 0) return std::nullopt;
        return make_ratio(sum_sq * trials, sum * sum);
    }

    /// Unbiased sample variance (N-1 denominator); requires N >= 2.
    BigRatio sample_variance() const {
        if (trials < 2) throw domain_error("sample variance needs at least two trials");
        const BigRatio n(trials);
        return (BigRatio(sum_sq) - BigRatio(sum) * BigRatio(sum) / n) / (n - 1);
    }

    friend bool operator==(const TrialStats&, const TrialStats&) = default;

private:
    BigCount require_trials() const {
        if (trials == 0) throw domain_error("no trials recorded");
        return BigCount(trials);
    }
};

/// N independent trials; trial t draws from RandomStream(seed, first_trial + t).
/// Work is split into contiguous index blocks over `workers` threads; the
/// result does not depend on the split.
inline TrialStats run_trials(const ZeroOneMatrix& a, Method method, std::uint64_t trials, std::uint64_t seed,
                             unsigned workers = 1, std::uint64_t first_trial = 0) {
    if (trials == 0) throw domain_error("run_trials needs N >= 1");
    if (method == Method::rm && !a.square()) throw shape_error("RM needs a square matrix");
    workers = std::max(1U, static_cast<unsigned>(std::min<std::uint64_t>(workers, trials)));

    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
        TrialStats s;
        for (std::uint64_t t = lo; t < hi; ++t) {
            RandomStream rng(seed, first_trial + t);
            s.add(run_trial(a, method, rng));
        }
        return s;
    };
    if (workers == 1) return block(0, trials);

    std::vector<TrialStats> parts(workers);
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = trials / workers, extra = trials % workers;
        std::uint64_t lo = 0;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t hi = lo + chunk + (w < extra ? 1 : 0);
            pool.emplace_back([&, w, lo, hi] { parts[w] = block(lo, hi); });
            lo = hi;
        }
    }
    TrialStats total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

/// Exact outcome distribution: outcome -> probability.
using OutcomeDistribution = std::map<BigCount, BigRatio>;

inline constexpr std::uint64_t max_coin_paths = 5'000'000;

/// Walks every coin path of the estimator's decision tree, driving the same
/// run_estimator code as the random trials with scripted choices.
/// A path of choice counts q_1..q_r has probability prod 1/q_i.
inline OutcomeDistribution coin_path_distribution(const ZeroOneMatrix& a, Method method) {
    OutcomeDistribution dist;
    std::vector<std::size_t> path, fanout;
    std::uint64_t visited = 0;
    while (true) {
        fanout.clear();
        std::size_t depth = 0;
        BigCount denom = 1;
        const BigCount value = run_estimator(a, method, [&](std::size_t q) {
            if (depth == path.size()) path.push_back(0);
            fanout.push_back(q);
            denom *= q;
            return path[depth++];
        });
        path.resize(depth);
        dist[value] += make_ratio(1, denom);
        if (++visited > max_coin_paths) throw capacity_error("coin-path enumeration exceeds " + std::to_string(max_coin_paths) + " paths");

        // advance the odometer from the deepest choice
        while (!path.empty() && path.back() + 1 == fanout[path.size() - 1]) path.pop_back();
        if (path.empty()) break;
        ++path.back();
    }
    return dist;
}

struct ExactMoments {
    BigRatio mean;
    BigRatio second;
};

inline ExactMoments moments_of(const OutcomeDistribution& dist) {
    ExactMoments m{0, 0};
    for (const auto& [x, p] : dist) {
        m.mean += p * BigRatio(x);
        m.second += p * BigRatio(x * x);
    }
    return m;
}

/// Outcome of comparing RM on [[A, I], [1, 1]] (divided by n!) against AMM on A.
struct EquivalenceReport {
    std::size_t n = 0;
    bool exhaustive = false;
    bool divisible = true;           ///< every RM outcome was a multiple of n!
    bool supports_match = false;
    bool distributions_match = false; ///< exact (exhaustive) or not rejected by the test
    OutcomeDistribution amm;          ///< exhaustive mode only
    OutcomeDistribution rm_scaled;    ///< exhaustive mode only
    std::uint64_t trials = 0;
    double chi_square = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;

    bool passed() const { return divisible && distributions_match; }
};

inline constexpr std::size_t max_exhaustive_equivalence_size = 2;
/// Rejection level for the sampled two-sample homogeneity test.
inline constexpr double equivalence_alpha = 1e-4;

/// Compares the two estimators. For n <= 2 both decision trees are enumerated
/// and must agree exactly (equivalence_error otherwise). Larger n uses N trials
/// per side and a two-sample chi-square homogeneity test; AMM uses streams
/// (seed, t) and RM uses (seed, N + t).
inline EquivalenceReport transformed_equivalence_check(const ZeroOneMatrix& a, std::uint64_t trials, std::uint64_t seed) {
    if (!a.square()) throw shape_error("equivalence check needs a square matrix");
    if (a.rows() > max_transformed_size)
        throw capacity_error("equivalence check supports n <= " + std::to_string(max_transformed_size));
    const ZeroOneMatrix b = build_transformed(a);
    const BigCount nfact = factorial(static_cast<std::int64_t>(a.rows()));

    EquivalenceReport rep;
    rep.n = a.rows();
    if (a.rows() <= max_exhaustive_equivalence_size) {
        rep.exhaustive = true;
        rep.amm = coin_path_distribution(a, Method::amm);
        for (const auto& [x, p] : coin_path_distribution(b, Method::rm)) {
            if (x % nfact != 0) rep.divisible = false;
            rep.rm_scaled[x / nfact] += p;
        }
        rep.supports_match = std::equal(rep.amm.begin(), rep.amm.end(), rep.rm_scaled.begin(), rep.rm_scaled.end(),
                                        [](const auto& l, const auto& r) { return l.first == r.first; });
        rep.distributions_match = rep.amm == rep.rm_scaled;
        if (!rep.divisible || !rep.distributions_match)
            throw equivalence_error("RM on the transformed matrix and AMM disagree on " + to_inline(a));
        return rep;
    }

    if (trials == 0) throw domain_error("equivalence check needs N >= 1");
    rep.trials = trials;
    std::map<BigCount, std::pair<std::uint64_t, std::uint64_t>> counts;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RandomStream r1(seed, t);
        ++counts[amm_trial(a, r1)].first;
        RandomStream r2(seed, trials + t);
        const BigCount y = rm_trial(b, r2);
        if (y % nfact != 0) rep.divisible = false;
        ++counts[y / nfact].second;
    }

    // Pool sparse outcomes so every bin has a combined count of at least 10.
    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> pool{0, 0};
    rep.supports_match = true;
    for (const auto& [x, c] : counts) {
        if (c.first == 0 || c.second == 0) rep.supports_match = false;
        if (c.first + c.second >= 10)
            bins.emplace_back(static_cast<double>(c.first), static_cast<double>(c.second));
        else {
            pool.first += static_cast<double>(c.first);
            pool.second += static_cast<double>(c.second);
        }
    }
    if (pool.first + pool.second > 0) bins.push_back(pool);

    const double total = 2.0 * static_cast<double>(trials);
    double stat = 0.0;
    for (const auto& [o1, o2] : bins) {
        const double expected = (o1 + o2) * static_cast<double>(trials) / total;
        stat += (o1 - expected) * (o1 - expected) / expected + (o2 - expected) * (o2 - expected) / expected;
    }
    rep.chi_square = stat;
    rep.dof = bins.size() > 1 ? bins.size() - 1 : 0;
    rep.p_value = rep.dof == 0 ? 1.0
                               : boost::math::cdf(boost::math::complement(
                                     boost::math::chi_squared_distribution<double>(static_cast<double>(rep.dof)), stat));
    rep.distributions_match = rep.p_value > equivalence_alpha;
    return rep;
}

} // namespace allmatch
