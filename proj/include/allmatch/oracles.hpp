#pragma once

// Brute-force reference computations, deliberately independent of the row
// expansion. Exponential; tiny inputs only.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "numeric.hpp"

namespace allmatch::oracle {

/// Number of k-matchings for every k, by testing every subset of the edge set.
inline std::vector<BigCount> brute_force_profile(const ZeroOneMatrix& a) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j)) edges.emplace_back(i, j);
    if (edges.size() > 30) throw capacity_error("brute-force matching enumeration limited to 30 edges");

    std::vector<BigCount> counts(a.cols() + 1, 0);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << edges.size()); ++s) {
        std::uint64_t rows_used = 0, cols_used = 0;
        bool ok = true;
        for (std::uint64_t t = s; t && ok; t &= t - 1) {
            const auto& [i, j] = edges[static_cast<std::size_t>(std::countr_zero(t))];
            if ((rows_used >> i) & 1U || (cols_used >> j) & 1U) ok = false;
            rows_used |= std::uint64_t{1} << i;
            cols_used |= std::uint64_t{1} << j;
        }
        if (ok) counts[static_cast<std::size_t>(std::popcount(s))] += 1;
    }
    return counts;
}

inline BigCount brute_force_am(const ZeroOneMatrix& a) {
    BigCount s = 0;
    for (const auto& c : brute_force_profile(a)) s += c;
    return s;
}

/// per(A) as the sum over all n! permutations.
inline BigCount naive_permanent(const ZeroOneMatrix& a) {
    if (!a.square()) throw shape_error("permanent needs a square matrix");
    if (a.rows() > 10) throw capacity_error("naive permanent limited to n <= 10");
    std::vector<std::size_t> perm(a.rows());
    std::iota(perm.begin(), perm.end(), 0);
    BigCount s = 0;
    do {
        bool all = true;
        for (std::size_t i = 0; i < perm.size() && all; ++i) all = a(i, perm[i]);
        if (all) s += 1;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return s;
}

} // namespace allmatch::oracle
