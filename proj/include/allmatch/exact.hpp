#pragma once

// Exact counts: all-matchings via the row expansion, k-matching profiles,
// the permanent, and exact coin-toss moments of the RM and AMM estimators.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "numeric.hpp"

namespace allmatch {

enum class Method { rm, amm };

inline std::string to_string(Method m) { return m == Method::rm ? "rm" : "amm"; }

/// Pure-function cache keyed on (row, available columns).
template <class Value>
class MemoTable {
public:
    const Value* find(std::size_t row, ColumnSet avail) const {
        auto it = table_.find(key(row, avail));
        return it == table_.end() ? nullptr : &it->second;
    }

    const Value& insert(std::size_t row, ColumnSet avail, Value v) {
        auto [it, inserted] = table_.try_emplace(key(row, avail), std::move(v));
        if (!inserted && it->second != v) throw consistency_error("memo entry rewritten with a different value");
        return it->second;
    }

    std::size_t size() const noexcept { return table_.size(); }

private:
    static std::uint64_t key(std::size_t row, ColumnSet avail) {
        return (static_cast<std::uint64_t>(row) << 32) | avail.mask();
    }
    std::unordered_map<std::uint64_t, Value> table_;
};

/// Memoized expansion along the first remaining row.
///
/// At state (row, avail) the row's available 1-columns are `ones`. The policy
/// supplies the leaf value (no rows left), how child values are summed, and how
/// the skip branch (rows left unmatched) and the child sum combine:
///
///   value(row, avail) = finish(|ones|, value(row+1, avail), sum_{j in ones} value(row+1, avail \ {j}))
///
/// Policies without a skip branch receive a default-constructed skip value.
template <class Policy>
class RowExpansion {
public:
    using value_type = typename Policy::value_type;

    RowExpansion(const ZeroOneMatrix& a, Policy policy = {}) : a_(a), policy_(std::move(policy)) {
        if (a.cols() > max_recursion_cols)
            throw capacity_error("row recursion supports at most " + std::to_string(max_recursion_cols) + " columns, got " +
                                 std::to_string(a.cols()));
    }

    value_type operator()() { return eval(0, ColumnSet::all(a_.cols())); }

    std::size_t states() const noexcept { return memo_.size(); }

private:
    value_type eval(std::size_t row, ColumnSet avail) {
        if (row == a_.rows()) return policy_.leaf();
        if (const auto* hit = memo_.find(row, avail)) return *hit;

        const ColumnSet ones = avail.intersect(a_.row_mask(row));
        value_type children = policy_.zero();
        ones.for_each([&](std::size_t j) { policy_.accumulate(children, eval(row + 1, avail.without(j))); });
        value_type skip = Policy::has_skip ? eval(row + 1, avail) : value_type{};
        return memo_.insert(row, avail, policy_.finish(ones.size(), std::move(skip), std::move(children)));
    }

    const ZeroOneMatrix& a_;
    Policy policy_;
    MemoTable<value_type> memo_;
};

namespace policy {

/// AM(B) = AM(B_skip) + sum_j AM(B_j).
struct AllMatchings {
    using value_type = BigCount;
    static constexpr bool has_skip = true;
    value_type leaf() const { return 1; }
    value_type zero() const { return 0; }
    void accumulate(value_type& acc, const value_type& v) const { acc += v; }
    value_type finish(std::size_t, value_type skip, value_type children) const { return skip + children; }
};

/// Laplace expansion of the permanent along the first row.
struct Permanent {
    using value_type = BigCount;
    static constexpr bool has_skip = false;
    value_type leaf() const { return 1; }
    value_type zero() const { return 0; }
    void accumulate(value_type& acc, const value_type& v) const { acc += v; }
    value_type finish(std::size_t, value_type, value_type children) const { return children; }
};

/// Generating polynomial sum_k #S_k x^k, coefficients indexed by k.
struct MatchingPolynomial {
    using value_type = std::vector<BigCount>;
    static constexpr bool has_skip = true;
    value_type leaf() const { return {BigCount(1)}; }
    value_type zero() const { return {}; }
    void accumulate(value_type& acc, const value_type& v) const {
        if (acc.size() < v.size()) acc.resize(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) acc[k] += v[k];
    }
    value_type finish(std::size_t, value_type skip, value_type children) const {
        // children contribute one more matched edge
        if (skip.size() < children.size() + 1) skip.resize(children.size() + 1);
        for (std::size_t k = 0; k < children.size(); ++k) skip[k + 1] += children[k];
        return skip;
    }
};

/// E(X^2) of AMM: q * (V(skip) + sum_j V(j)), q = |ones| + 1.
struct AmmSecondMoment {
    using value_type = BigCount;
    static constexpr bool has_skip = true;
    value_type leaf() const { return 1; }
    value_type zero() const { return 0; }
    void accumulate(value_type& acc, const value_type& v) const { acc += v; }
    value_type finish(std::size_t ones, value_type skip, value_type children) const {
        return (skip + children) * (ones + 1);
    }
};

/// E(Y^2) of RM: q * sum_j V(j), q = |ones|; an empty W contributes 0.
struct RmSecondMoment {
    using value_type = BigCount;
    static constexpr bool has_skip = false;
    value_type leaf() const { return 1; }
    value_type zero() const { return 0; }
    void accumulate(value_type& acc, const value_type& v) const { acc += v; }
    value_type finish(std::size_t ones, value_type, value_type children) const { return children * ones; }
};

} // namespace policy

template <class Policy>
typename Policy::value_type expand_rows(const ZeroOneMatrix& a, Policy p = {}) {
    return RowExpansion<Policy>(a, std::move(p))();
}

/// Number of all matchings (empty matching included). Requires cols <= 24.
inline BigCount exact_am(const ZeroOneMatrix& a) { return expand_rows<policy::AllMatchings>(a); }

/// counts[k] = number of k-matchings, for k = 0..cols.
struct MatchingProfile {
    std::vector<BigCount> counts;

    BigCount total() const {
        BigCount s = 0;
        for (const auto& c : counts) s += c;
        return s;
    }
    friend bool operator==(const MatchingProfile&, const MatchingProfile&) = default;
};

inline MatchingProfile matching_profile(const ZeroOneMatrix& a) {
    auto poly = expand_rows<policy::MatchingPolynomial>(a);
    poly.resize(a.cols() + 1);
    return {std::move(poly)};
}

inline constexpr std::size_t max_ryser_size = 20;

/// per(A) by Ryser's inclusion-exclusion formula over column subsets in Gray-code
/// order. Square A, n <= 20.
inline BigCount permanent_ryser(const ZeroOneMatrix& a) {
    if (!a.square()) throw shape_error("permanent needs a square matrix");
    const std::size_t n = a.rows();
    if (n > max_ryser_size)
        throw capacity_error("Ryser permanent supports n <= " + std::to_string(max_ryser_size) + ", got " +
                             std::to_string(n));
    if (n == 0) return 1;

    // |row sums| <= 20, product <= 20^20 and 2^20 terms: fits in 128 bits.
    std::vector<std::int64_t> row_sum(n, 0);
    __int128 total = 0;
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < (std::uint64_t{1} << n); ++k) {
        const auto j = static_cast<std::size_t>(std::countr_zero(k));
        gray ^= std::uint64_t{1} << j;
        const std::int64_t delta = ((gray >> j) & 1U) ? 1 : -1;
        for (std::size_t i = 0; i < n; ++i)
            if (a(i, j)) row_sum[i] += delta;
        __int128 prod = 1;
        for (std::size_t i = 0; i < n && prod != 0; ++i) prod *= row_sum[i];
        if (std::popcount(gray) % 2 == 1)
            total -= prod;
        else
            total += prod;
    }
    if (n % 2 == 1) total = -total;

    BigCount out = 0;
    const bool negative = total < 0;
    auto mag = static_cast<unsigned __int128>(negative ? -total : total);
    out = static_cast<std::uint64_t>(mag >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(mag);
    if (negative) throw consistency_error("negative permanent of a 0-1 matrix");
    return out;
}

/// per(A) by the memoized first-row Laplace expansion; A square, n <= 24.
inline BigCount permanent_by_expansion(const ZeroOneMatrix& a) {
    if (!a.square()) throw shape_error("permanent needs a square matrix");
    return expand_rows<policy::Permanent>(a);
}

inline constexpr std::size_t max_transformed_size = 10;

/// AM(A) = per([[A, I], [1, 1]]) / n!, with exact divisibility enforced.
inline BigCount am_via_permanent(const ZeroOneMatrix& a) {
    if (!a.square()) throw shape_error("transformation needs a square matrix");
    if (a.rows() > max_transformed_size)
        throw capacity_error("transformed permanent supports n <= " + std::to_string(max_transformed_size));
    const BigCount per = permanent_ryser(build_transformed(a));
    const BigCount nfact = factorial(static_cast<std::int64_t>(a.rows()));
    if (per % nfact != 0)
        throw consistency_error("per of transformed matrix not divisible by n! for " + to_inline(a));
    return per / nfact;
}

/// Exact E(X^2) of the AMM estimator over its coin tosses.
inline BigCount exact_second_moment_amm(const ZeroOneMatrix& a) { return expand_rows<policy::AmmSecondMoment>(a); }

/// Exact E(Y^2) of the RM estimator over its coin tosses; A square.
inline BigCount exact_second_moment_rm(const ZeroOneMatrix& a) {
    if (!a.square()) throw shape_error("RM needs a square matrix");
    return expand_rows<policy::RmSecondMoment>(a);
}

/// E(X^2) / E(X)^2 of the chosen estimator on A.
/// E(X) is AM(A) for AMM and per(A) for RM.
inline BigRatio exact_critical_ratio(const ZeroOneMatrix& a, Method method) {
    if (method == Method::amm) {
        const BigCount mean = exact_am(a);
        return make_ratio(exact_second_moment_amm(a), mean * mean);
    }
    const BigCount per = permanent_by_expansion(a);
    if (per == 0) throw undefined_ratio_error("RM critical ratio undefined: per(A) = 0 for " + to_inline(a));
    return make_ratio(exact_second_moment_rm(a), per * per);
}

} // namespace allmatch
