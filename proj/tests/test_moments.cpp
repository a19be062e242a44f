#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include <allmatch/moments.hpp>

using namespace allmatch;

namespace {

// f(m, n) summed over every sequence of m stay/step moves.
BigRatio by_paths(std::size_t m, std::size_t n, const std::vector<BigRatio>& a, const std::vector<BigRatio>& c) {
    BigRatio total = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
        BigRatio w = 1;
        std::size_t l = n;
        for (std::size_t s = 0; s < m; ++s) {
            if ((bits >> s) & 1U) {
                w *= c[l];
                --l;
            } else {
                w *= a[l];
            }
        }
        total += w;
    }
    return total;
}

RecursionCoeffs from_tables(const std::vector<BigRatio>& a, const std::vector<BigRatio>& c) {
    return {[a](std::size_t l) { return a[l]; }, [c](std::size_t l) { return c[l]; }};
}

BigRatio r(long p, long q = 1) { return BigRatio(p, q); }

} // namespace

TEST(TwoTermRecursion, Examples) {
    const RecursionCoeffs half{[](std::size_t) { return r(1); }, [](std::size_t l) { return BigRatio(l, 2); }};
    EXPECT_EQ(lemma1_solve(0, 4, half), 1);
    EXPECT_EQ(lemma1_solve(1, 1, half), r(3, 2));
    const RecursionCoeffs consts{[](std::size_t) { return r(2); }, [](std::size_t) { return r(3); }};
    EXPECT_EQ(lemma1_solve(2, 5, consts), 25);
    EXPECT_EQ(lemma1_closed_form(2, 5, consts), 25);
    EXPECT_THROW(lemma1_solve(3, 2, consts), domain_error);
    const RecursionCoeffs bad{[](std::size_t) { return r(0); }, [](std::size_t) { return r(1); }};
    EXPECT_THROW(lemma1_solve(1, 2, bad), domain_error);
}

TEST(TwoTermRecursion, CompleteHomogeneous) {
    std::vector<BigRatio> xs{r(1), r(2), r(3)};
    EXPECT_EQ(complete_homogeneous(xs, 0), 1);
    EXPECT_EQ(complete_homogeneous(xs, 1), 6);
    EXPECT_EQ(complete_homogeneous(xs, 2), 25); // 1+4+9+2+3+6
}

TEST(TwoTermRecursion, SolverAndClosedFormMatchPathEnumeration) {
    RandomStream rng(31, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(8), m = rng.below(n + 1);
        std::vector<BigRatio> a(n + 1), c(n + 1);
        for (std::size_t l = 1; l <= n; ++l) {
            a[l] = BigRatio(1 + rng.below(9), 1 + rng.below(4));
            c[l] = BigRatio(1 + rng.below(9), 1 + rng.below(4));
        }
        const auto coeffs = from_tables(a, c);
        const BigRatio want = by_paths(m, n, a, c);
        EXPECT_EQ(lemma1_solve(m, n, coeffs), want) << m << "," << n;
        EXPECT_EQ(lemma1_closed_form(m, n, coeffs), want) << m << "," << n;
    }
}

TEST(UniformMean, SpotValues) {
    EXPECT_EQ(thm3_mean(0, 0), 1);
    EXPECT_EQ(thm3_mean(1, 1), r(3, 2));
    EXPECT_EQ(thm3_mean(2, 2), r(7, 2));
    EXPECT_EQ(thm3_mean(1, 2), 2);
    EXPECT_EQ(thm3_mean(1, 3), r(5, 2));
    EXPECT_EQ(thm3_mean(2, 3), r(11, 2));
    EXPECT_EQ(thm3_mean(3, 3), r(43, 4));
    EXPECT_THROW(thm3_mean(3, 2), domain_error);
}

TEST(UniformMean, SumAndRecursionAgree) {
    for (std::size_t n = 0; n <= 12; ++n)
        for (std::size_t m = 0; m <= n; ++m) EXPECT_EQ(thm3_mean(m, n), thm3_mean_recursive(m, n)) << m << "," << n;
}

TEST(UniformMean, MatchesEnsembleAverage) {
    for (std::size_t n = 0; n <= 3; ++n)
        for (std::size_t m = 0; m <= n; ++m)
            EXPECT_EQ(thm3_mean(m, n), ensemble_moment_oracle(EnsembleSpec::bernoulli(m, n), EnsembleStatistic::mean_am));
}

TEST(UniformAmmSecondMoment, SpotValues) {
    EXPECT_EQ(thm4_second_moment(1, 1), r(5, 2));
    EXPECT_EQ(thm4_second_moment(1, 2), r(9, 2));
    EXPECT_EQ(thm4_second_moment(1, 3), 7);
    EXPECT_EQ(thm4_second_moment(2, 2), r(61, 4));
    EXPECT_EQ(thm4_second_moment(2, 3), r(151, 4));
    EXPECT_EQ(thm4_second_moment(3, 3), 163);
}

TEST(UniformAmmSecondMoment, MatchesEnsembleAverageAndClosedForm) {
    for (std::size_t n = 0; n <= 3; ++n)
        for (std::size_t m = 0; m <= n; ++m)
            EXPECT_EQ(thm4_second_moment(m, n),
                      ensemble_moment_oracle(EnsembleSpec::bernoulli(m, n), EnsembleStatistic::mean_amm_m2));
    for (std::size_t n = 0; n <= 8; ++n)
        for (std::size_t m = 0; m <= n; ++m)
            EXPECT_EQ(thm4_second_moment(m, n), thm4_second_moment_closed_form(m, n)) << m << "," << n;
}

TEST(UniformAmmSecondMoment, AtLeastSquaredMean) {
    for (std::size_t n = 1; n <= 15; ++n)
        for (std::size_t m = 1; m <= n; ++m) {
            const BigRatio mu = thm3_mean(m, n);
            EXPECT_GT(thm4_second_moment(m, n), mu * mu);
        }
}

TEST(MeanSandwich, Kstar) {
    EXPECT_EQ(thm5_bounds(3).kstar, 2u);
    EXPECT_EQ(thm5_bounds(1).kstar, 1u);
    EXPECT_EQ(thm5_bounds(11).kstar, 4u);
    EXPECT_THROW(thm5_bounds(0), domain_error);
}

TEST(MeanSandwich, KstarMaximisesTerms) {
    for (std::size_t n = 1; n <= 60; ++n) {
        const auto ni = static_cast<std::int64_t>(n);
        auto b = [&](std::int64_t k) {
            const BigCount kf = factorial(k);
            return make_ratio(pow2(static_cast<std::uint64_t>(k)), factorial(ni - k) * kf * kf);
        };
        const auto ks = static_cast<std::int64_t>(thm5_bounds(n).kstar);
        for (std::int64_t k = 0; k <= ni; ++k) EXPECT_LE(b(k), b(ks)) << n << " " << k;
    }
}

TEST(MeanSandwich, SandwichFromTwoToHundred) {
    for (std::size_t n = 2; n <= 100; ++n) {
        const auto bnd = thm5_bounds(n);
        const BigRatio mean = thm3_mean(n, n);
        EXPECT_LE(bnd.h, mean) << n;
        EXPECT_LE(mean, bnd.loose_upper) << n;
        EXPECT_LE(mean, bnd.upper) << n;
    }
}

TEST(MeanSandwich, SizeOneEdgeCase) {
    const auto bnd = thm5_bounds(1);
    EXPECT_EQ(bnd.h, 1);
    EXPECT_GT(thm3_mean(1, 1), bnd.upper);
    EXPECT_LE(thm3_mean(1, 1), bnd.loose_upper);
}

TEST(UniformCriticalRatio, Ratios) {
    EXPECT_EQ(thm6_ratio(1), r(10, 9));
    EXPECT_EQ(thm6_ratio(2), r(61, 49));
    EXPECT_EQ(thm6_ratio(3), r(2608, 1849));
    EXPECT_EQ(thm6_ratio(4), r(10579, 6561));
    for (std::size_t n = 1; n <= 40; ++n) EXPECT_GT(thm6_ratio(n), 1) << n;
    EXPECT_THROW(thm6_ratio(0), domain_error);
}

TEST(UniformCriticalRatio, LowerDiagBelowSecondMoment) {
    for (std::size_t n = 1; n <= 25; ++n) EXPECT_LE(thm6_lower_diag(n), thm4_second_moment(n, n)) << n;
}

TEST(UniformCriticalRatio, ThresholdComparator) {
    EXPECT_TRUE(thm6_meets_threshold(r(1), 1));
    EXPECT_TRUE(thm6_meets_threshold(r(4), 4));
    EXPECT_FALSE(thm6_meets_threshold(r(399, 100), 4));
    EXPECT_TRUE(thm6_meets_threshold(r(27), 9));
    EXPECT_FALSE(thm6_meets_threshold(r(2699, 100), 9));
    // 2^(sqrt 2 / 2) = 1.6325...
    EXPECT_FALSE(thm6_meets_threshold(r(163, 100), 2));
    EXPECT_TRUE(thm6_meets_threshold(r(164, 100), 2));
    EXPECT_TRUE(thm6_meets_threshold(thm6_ratio(1), 1));
    for (std::size_t n = 2; n <= 40; ++n) EXPECT_FALSE(thm6_meets_threshold(thm6_ratio(n), n)) << n;
}

TEST(UniformCriticalRatio, ComparatorAgreesWithFloatingPointAwayFromTies) {
    RandomStream rng(6, 6);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng.below(30);
        const BigRatio x(1 + rng.below(100000), 1 + rng.below(1000));
        const double lhs = static_cast<double>(x), thr = thm6_threshold_value(n);
        if (std::abs(lhs - thr) < 1e-9 * thr) continue;
        EXPECT_EQ(thm6_meets_threshold(x, n), lhs >= thr) << n << " " << x;
    }
}

TEST(BinomialTail, Examples) {
    EXPECT_EQ(thm7_tail(2, r(1, 50)), r(5, 16));
    EXPECT_EQ(thm7_tail(1, r(1, 50)), r(1, 2));
    EXPECT_EQ(thm7_tail(0, r(1, 50)), 1);
    EXPECT_THROW(thm7_tail(2, r(0)), domain_error);
    EXPECT_THROW(thm7_tail(2, r(1, 49)), domain_error);
    EXPECT_THROW(thm7_tail(2, r(-1, 100)), domain_error);
}

TEST(BinomialTail, NonincreasingInEpsAndAtMostHalf) {
    for (std::size_t n = 1; n <= 10; ++n) {
        BigRatio prev = 2;
        for (long k = 1; k <= 40; ++k) {
            const BigRatio t = thm7_tail(n, r(k, 2000));
            EXPECT_LE(t, prev);
            EXPECT_LE(t, r(1, 2));
            if ((n * n) % 2 == 0) {
                EXPECT_LT(t, r(1, 2));
            }
            prev = t;
        }
    }
}

TEST(PartialDerangement, Examples) {
    for (std::int64_t n = 0; n <= 8; ++n) EXPECT_EQ(partial_derangement(n, 0), 1);
    for (std::int64_t n = 1; n <= 8; ++n) EXPECT_EQ(partial_derangement(n, 1), n - 1);
    EXPECT_EQ(partial_derangement(2, 2), 1);
    EXPECT_EQ(partial_derangement(4, 4), 9);
    EXPECT_EQ(partial_derangement(2, 3), 0);
    EXPECT_THROW(partial_derangement(-1, 0), domain_error);
}

TEST(PartialDerangement, MatchesPermutationCount) {
    // placements of items 0..p-1 into n slots, item i forbidden from slot i
    for (int n = 0; n <= 6; ++n)
        for (int p = 0; p <= n; ++p) {
            std::vector<int> slots(static_cast<std::size_t>(n));
            std::iota(slots.begin(), slots.end(), 0);
            std::set<std::vector<int>> seen;
            do {
                std::vector<int> head(slots.begin(), slots.begin() + p);
                bool ok = true;
                for (int i = 0; i < p; ++i) ok = ok && head[static_cast<std::size_t>(i)] != i;
                if (ok) seen.insert(head);
            } while (std::next_permutation(slots.begin(), slots.end()));
            EXPECT_EQ(partial_derangement(n, p), BigCount(seen.size())) << n << "," << p;
        }
}

TEST(EdgeFactor, Examples) {
    EXPECT_EQ(edge_factor(3, 4, 0), 1);
    EXPECT_EQ(edge_factor(1, 1, 1), 1);
    EXPECT_EQ(edge_factor(2, 1, 1), r(1, 4));
    EXPECT_EQ(edge_factor(2, 1, 2), 0);
    EXPECT_EQ(edge_factor(2, 4, 3), 0);
    EXPECT_EQ(edge_set_factor(2, 4, 3), 1);
}

TEST(EdgeCountMoments, SpotValues) {
    EXPECT_EQ(thm8_mean(1, 0), 1);
    EXPECT_EQ(thm8_mean(1, 1), 2);
    EXPECT_EQ(thm8_second_moment(1, 1), 4);
    const std::vector<BigRatio> mean2{r(1), r(2), r(10, 3), r(5), r(7)};
    const std::vector<BigRatio> sq2{r(1), r(4), r(34, 3), r(25), r(49)};
    for (std::size_t m = 0; m <= 4; ++m) {
        EXPECT_EQ(thm8_mean(2, m), mean2[m]);
        EXPECT_EQ(thm8_second_moment(2, m), sq2[m]);
    }
    const std::vector<BigRatio> mean3{r(1), r(2), r(7, 2), r(39, 7), r(58, 7), r(82, 7), r(223, 14), r(21), r(27), r(34)};
    const std::vector<BigRatio> sq3{r(1), r(4), r(25, 2), r(223, 7), r(491, 7), r(974, 7), r(511, 2), r(442), r(729), r(1156)};
    for (std::size_t m = 0; m <= 9; ++m) {
        EXPECT_EQ(thm8_mean(3, m), mean3[m]) << m;
        EXPECT_EQ(thm8_second_moment(3, m), sq3[m]) << m;
    }
    EXPECT_THROW(thm8_mean(2, 5), domain_error);
}

TEST(EdgeCountMoments, MatchesExactOnesAverages) {
    for (std::size_t n = 0; n <= 3; ++n)
        for (std::size_t m = 0; m <= n * n; ++m) {
            const auto spec = EnsembleSpec::exact_ones(m, n);
            EXPECT_EQ(thm8_mean(n, m), ensemble_moment_oracle(spec, EnsembleStatistic::mean_am)) << n << "," << m;
            EXPECT_EQ(thm8_second_moment(n, m), ensemble_moment_oracle(spec, EnsembleStatistic::mean_am_sq)) << n << "," << m;
        }
}

TEST(EdgeCountMoments, MeanIncreasesWithEdges) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t m = 1; m <= n * n; ++m) EXPECT_GT(thm8_mean(n, m), thm8_mean(n, m - 1));
}

TEST(EdgeCountMoments, FullGraphIsComplete) {
    // all n^2 edges: AM(K_{n,n}) = sum_k C(n,k)^2 k!
    for (std::size_t n = 1; n <= 6; ++n) {
        BigCount want = 0;
        for (std::int64_t k = 0; k <= static_cast<std::int64_t>(n); ++k)
            want += binomial(static_cast<std::int64_t>(n), k) * binomial(static_cast<std::int64_t>(n), k) * factorial(k);
        EXPECT_EQ(thm8_mean(n, n * n), BigRatio(want));
        EXPECT_EQ(thm8_second_moment(n, n * n), BigRatio(want * want));
    }
}

TEST(EnsembleOracle, WeightedBernoulli) {
    // one cell with p = 1/3: AM is 2 w.p. 1/3 and 1 otherwise
    EXPECT_EQ(ensemble_moment_oracle(EnsembleSpec::bernoulli(1, 1, r(1, 3)), EnsembleStatistic::mean_am), r(4, 3));
    EXPECT_EQ(ensemble_moment_oracle(EnsembleSpec::bernoulli(2, 2, r(1)), EnsembleStatistic::mean_am), 7);
    EXPECT_EQ(ensemble_moment_oracle(EnsembleSpec::bernoulli(2, 2, r(0)), EnsembleStatistic::mean_am), 1);
}

TEST(MomentReport, Consistent) {
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto rep = moment_report(n);
        EXPECT_EQ(rep.ratio, thm6_ratio(n));
        EXPECT_EQ(rep.mean, thm3_mean(n, n));
    }
}
