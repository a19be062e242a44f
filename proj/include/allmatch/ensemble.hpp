#pragma once

// Random 0-1 matrix ensembles: sampling and exhaustive enumeration.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "matrix.hpp"
#include "numeric.hpp"
#include "random.hpp"

namespace allmatch {

enum class EnsembleKind {
    bernoulli,  ///< m x n, i.i.d. entries equal to 1 with probability p
    exact_ones, ///< n x n, exactly m ones placed uniformly
    edge_count, ///< n x n biadjacency of a uniform bipartite graph with m edges
};

/// Caps for exhaustive enumeration.
inline constexpr std::size_t max_enumerated_bernoulli_cells = 20;
inline constexpr std::uint64_t max_enumerated_placements = 1'000'000;

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::bernoulli;
    std::size_t m = 0;
    std::size_t n = 0;
    BigRatio p = BigRatio(1, 2);

    static EnsembleSpec bernoulli(std::size_t rows, std::size_t cols, BigRatio prob = BigRatio(1, 2)) {
        EnsembleSpec s{EnsembleKind::bernoulli, rows, cols, std::move(prob)};
        s.validate();
        return s;
    }
    static EnsembleSpec exact_ones(std::size_t ones, std::size_t size) {
        EnsembleSpec s{EnsembleKind::exact_ones, ones, size, BigRatio(0)};
        s.validate();
        return s;
    }
    static EnsembleSpec edge_count(std::size_t edges, std::size_t size) {
        EnsembleSpec s{EnsembleKind::edge_count, edges, size, BigRatio(0)};
        s.validate();
        return s;
    }

    std::size_t rows() const noexcept { return kind == EnsembleKind::bernoulli ? m : n; }
    std::size_t cols() const noexcept { return n; }

    void validate() const {
        if (kind == EnsembleKind::bernoulli) {
            if (p < 0 || p > 1) throw spec_error("bernoulli probability must lie in [0,1]");
        } else if (m > n * n) {
            throw spec_error("cannot place " + std::to_string(m) + " ones in a " + std::to_string(n) + "x" +
                             std::to_string(n) + " matrix");
        }
    }

    friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

inline std::string to_string(const EnsembleSpec& s) {
    switch (s.kind) {
    case EnsembleKind::bernoulli:
        return "bernoulli:" + std::to_string(s.m) + ":" + std::to_string(s.n) + ":" + to_exact_string(s.p);
    case EnsembleKind::exact_ones:
        return "exactones:" + std::to_string(s.m) + ":" + std::to_string(s.n);
    case EnsembleKind::edge_count:
        return "edges:" + std::to_string(s.m) + ":" + std::to_string(s.n);
    }
    return {};
}

/// Parses "bernoulli:m:n:p" | "exactones:m:n" | "edges:m:n".
inline EnsembleSpec parse_ensemble(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto colon = text.find(':', start);
        parts.emplace_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    auto count = [&](const std::string& tok) -> std::size_t {
        if (tok.empty() || tok.size() > 9 || tok.find_first_not_of("0123456789") != std::string::npos)
            throw spec_error("bad count '" + tok + "' in ensemble '" + std::string(text) + "'");
        return std::stoul(tok);
    };
    if (parts[0] == "bernoulli") {
        if (parts.size() != 4) throw spec_error("expected bernoulli:m:n:p");
        BigRatio p;
        try {
            p = parse_ratio(parts[3]);
        } catch (const domain_error& e) {
            throw spec_error(e.what());
        }
        return EnsembleSpec::bernoulli(count(parts[1]), count(parts[2]), p);
    }
    if (parts[0] == "exactones" || parts[0] == "edges") {
        if (parts.size() != 3) throw spec_error("expected " + parts[0] + ":m:n");
        return parts[0] == "edges" ? EnsembleSpec::edge_count(count(parts[1]), count(parts[2]))
                                   : EnsembleSpec::exact_ones(count(parts[1]), count(parts[2]));
    }
    throw spec_error("unknown ensemble kind '" + parts[0] + "'");
}

inline ZeroOneMatrix sample_matrix(const EnsembleSpec& spec, RandomStream& rng) {
    spec.validate();
    if (spec.kind == EnsembleKind::bernoulli) {
        const BigCount num = numerator(spec.p), den = denominator(spec.p);
        if (den > std::numeric_limits<std::uint64_t>::max())
            throw spec_error("bernoulli probability denominator exceeds 64 bits");
        const auto a = static_cast<std::uint64_t>(num), b = static_cast<std::uint64_t>(den);
        ZeroOneMatrix out(spec.m, spec.n);
        for (std::size_t i = 0; i < spec.m; ++i)
            for (std::size_t j = 0; j < spec.n; ++j) out.set(i, j, rng.bernoulli(a, b));
        return out;
    }
    // Floyd's algorithm: uniform m-subset of the n*n cells.
    const std::size_t n = spec.n, cells = n * n;
    ZeroOneMatrix out(n, n);
    for (std::size_t j = cells - spec.m; j < cells; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (out(t / n, t % n))
            out.set(j / n, j % n, true);
        else
            out.set(t / n, t % n, true);
    }
    return out;
}

/// Number of matrices enumerate_ensemble would visit.
inline BigCount support_size(const EnsembleSpec& spec) {
    if (spec.kind == EnsembleKind::bernoulli) {
        if (spec.p == 0 || spec.p == 1) return 1;
        return pow2(spec.m * spec.n);
    }
    return binomial(static_cast<std::int64_t>(spec.n * spec.n), static_cast<std::int64_t>(spec.m));
}

/// Probability of `a` under the ensemble.
inline BigRatio ensemble_probability(const EnsembleSpec& spec, const ZeroOneMatrix& a) {
    const std::size_t ones = a.count_ones();
    if (spec.kind == EnsembleKind::bernoulli) {
        const std::size_t zeros = spec.m * spec.n - ones;
        return ipow(spec.p, ones) * ipow(BigRatio(1) - spec.p, zeros);
    }
    if (ones != spec.m) return 0;
    return make_ratio(1, support_size(spec));
}

/// Visits every matrix of the ensemble's support exactly once.
/// Throws capacity_error beyond the documented caps.
template <class Visitor>
void enumerate_ensemble(const EnsembleSpec& spec, Visitor&& visit) {
    spec.validate();
    if (spec.kind == EnsembleKind::bernoulli) {
        if (spec.p == 0) {
            visit(ZeroOneMatrix(spec.m, spec.n));
            return;
        }
        if (spec.p == 1) {
            visit(ZeroOneMatrix::ones(spec.m, spec.n));
            return;
        }
        const std::size_t cells = spec.m * spec.n;
        if (cells > max_enumerated_bernoulli_cells)
            throw capacity_error("bernoulli ensemble with " + std::to_string(cells) + " cells exceeds the enumeration cap of " +
                                 std::to_string(max_enumerated_bernoulli_cells));
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cells); ++bits) {
            ZeroOneMatrix a(spec.m, spec.n);
            for (std::size_t c = 0; c < cells; ++c)
                if ((bits >> c) & 1U) a.set(c / spec.n, c % spec.n, true);
            visit(a);
        }
        return;
    }

    if (support_size(spec) > max_enumerated_placements)
        throw capacity_error("ensemble " + to_string(spec) + " has more than " + std::to_string(max_enumerated_placements) +
                             " matrices");
    const std::size_t n = spec.n, cells = n * n, k = spec.m;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
        ZeroOneMatrix a(n, n);
        for (auto c : pick) a.set(c / n, c % n, true);
        visit(a);
        // next k-combination in lexicographic order
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == cells - k + (i - 1)) --i;
        if (i == 0) return;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

} // namespace allmatch
