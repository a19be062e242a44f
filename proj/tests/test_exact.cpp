#include <gtest/gtest.h>

#include <allmatch/ensemble.hpp>
#include <allmatch/estimators.hpp>
#include <allmatch/exact.hpp>
#include <allmatch/oracles.hpp>

using namespace allmatch;

namespace {

template <class F>
void for_all(std::size_t max_m, std::size_t max_n, F&& f) {
    for (std::size_t m = 0; m <= max_m; ++m)
        for (std::size_t n = 0; n <= max_n; ++n) enumerate_ensemble(EnsembleSpec::bernoulli(m, n), f);
}

ZeroOneMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed, std::uint64_t id) {
    RandomStream rng(seed, id);
    return sample_matrix(EnsembleSpec::bernoulli(m, n), rng);
}

} // namespace

TEST(ExactAm, Examples) {
    EXPECT_EQ(exact_am(ZeroOneMatrix{{0}}), 1);
    EXPECT_EQ(exact_am(ZeroOneMatrix{{1}}), 2);
    EXPECT_EQ(exact_am(ZeroOneMatrix::ones(2, 2)), 7);
    EXPECT_EQ(exact_am(ZeroOneMatrix::identity(2)), 4);
    EXPECT_EQ(exact_am(ZeroOneMatrix(0, 0)), 1);
    EXPECT_EQ(exact_am(ZeroOneMatrix(0, 5)), 1);
    EXPECT_EQ(exact_am(ZeroOneMatrix{{1, 1}}), 3);
}

TEST(ExactAm, CompleteBipartiteClosedForm) {
    // AM(K_{n,n}) = sum_k C(n,k)^2 k!
    for (std::int64_t n = 0; n <= 12; ++n) {
        BigCount expect = 0;
        for (std::int64_t k = 0; k <= n; ++k) expect += binomial(n, k) * binomial(n, k) * factorial(k);
        EXPECT_EQ(exact_am(ZeroOneMatrix::ones(n, n)), expect) << n;
    }
}

TEST(ExactAm, MatchesBruteForceExhaustive) {
    for_all(3, 4, [](const ZeroOneMatrix& a) { ASSERT_EQ(exact_am(a), oracle::brute_force_am(a)) << to_inline(a); });
    for_all(4, 3, [](const ZeroOneMatrix& a) { ASSERT_EQ(exact_am(a), oracle::brute_force_am(a)) << to_inline(a); });
}

TEST(ExactAm, RectangularRandom) {
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto a = random_matrix(2 + t % 3, 5 + t % 2, 17, t);
        ASSERT_EQ(exact_am(a), oracle::brute_force_am(a)) << to_inline(a);
    }
}

TEST(ExactAm, CapacityLimit) {
    EXPECT_THROW(exact_am(ZeroOneMatrix(1, 25)), capacity_error);
    EXPECT_EQ(exact_am(ZeroOneMatrix::identity(24)), pow2(24));
    EXPECT_EQ(exact_am(ZeroOneMatrix(3, 24)), 1);
}

TEST(Profile, Examples) {
    EXPECT_EQ(matching_profile(ZeroOneMatrix::ones(2, 2)).counts, (std::vector<BigCount>{1, 4, 2}));
    EXPECT_EQ(matching_profile(ZeroOneMatrix{{0}}).counts, (std::vector<BigCount>{1, 0}));
    EXPECT_EQ(matching_profile(ZeroOneMatrix::identity(3)).counts, (std::vector<BigCount>{1, 3, 3, 1}));
}

TEST(Profile, AgreesWithBruteForceAndSumsToAm) {
    for_all(3, 3, [](const ZeroOneMatrix& a) {
        const auto p = matching_profile(a);
        ASSERT_EQ(p.counts, oracle::brute_force_profile(a)) << to_inline(a);
        ASSERT_EQ(p.counts[0], 1);
        ASSERT_EQ(p.total(), exact_am(a));
        for (std::size_t k = std::min(a.rows(), a.cols()) + 1; k < p.counts.size(); ++k) ASSERT_EQ(p.counts[k], 0);
    });
}

TEST(Permanent, Examples) {
    EXPECT_EQ(permanent_ryser(ZeroOneMatrix::identity(3)), 1);
    EXPECT_EQ(permanent_ryser(ZeroOneMatrix::ones(3, 3)), 6);
    EXPECT_EQ(permanent_ryser(ZeroOneMatrix{{1, 1}, {1, 0}}), 1);
    EXPECT_EQ(permanent_ryser(ZeroOneMatrix(0, 0)), 1);
    EXPECT_EQ(permanent_ryser(ZeroOneMatrix::ones(20, 20)), factorial(20));
    EXPECT_THROW(permanent_ryser(ZeroOneMatrix(2, 3)), shape_error);
    EXPECT_THROW(permanent_ryser(ZeroOneMatrix(21, 21)), capacity_error);
}

TEST(Permanent, RyserMatchesPermutationSum) {
    for (std::size_t n = 0; n <= 3; ++n)
        enumerate_ensemble(EnsembleSpec::bernoulli(n, n), [](const ZeroOneMatrix& a) {
            ASSERT_EQ(permanent_ryser(a), oracle::naive_permanent(a)) << to_inline(a);
            ASSERT_EQ(permanent_by_expansion(a), oracle::naive_permanent(a)) << to_inline(a);
        });
    for (std::uint64_t t = 0; t < 300; ++t) {
        const auto a = random_matrix(4, 4, 23, t);
        ASSERT_EQ(permanent_ryser(a), oracle::naive_permanent(a)) << to_inline(a);
    }
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto a = random_matrix(12, 12, 29, t);
        ASSERT_EQ(permanent_ryser(a), permanent_by_expansion(a)) << to_inline(a);
    }
}

TEST(AmViaPermanent, Examples) {
    EXPECT_EQ(am_via_permanent(ZeroOneMatrix{{1}}), 2);
    EXPECT_EQ(am_via_permanent(ZeroOneMatrix{{0}}), 1);
    EXPECT_EQ(am_via_permanent(ZeroOneMatrix::ones(2, 2)), 7);
    EXPECT_THROW(am_via_permanent(ZeroOneMatrix(11, 11)), capacity_error);
    EXPECT_THROW(am_via_permanent(ZeroOneMatrix(1, 2)), shape_error);
}

TEST(AmViaPermanent, AgreesWithRowExpansion) {
    for (std::size_t n = 0; n <= 3; ++n)
        enumerate_ensemble(EnsembleSpec::bernoulli(n, n),
                           [](const ZeroOneMatrix& a) { ASSERT_EQ(am_via_permanent(a), exact_am(a)) << to_inline(a); });
    for (std::uint64_t t = 0; t < 500; ++t) {
        const auto a = random_matrix(4, 4, 31, t);
        ASSERT_EQ(am_via_permanent(a), exact_am(a)) << to_inline(a);
    }
}

TEST(SecondMoments, AmmExamples) {
    EXPECT_EQ(exact_second_moment_amm(ZeroOneMatrix{{0}}), 1);
    EXPECT_EQ(exact_second_moment_amm(ZeroOneMatrix{{1}}), 4);
    EXPECT_EQ(exact_second_moment_amm(ZeroOneMatrix{{1, 1}}), 9);
    // frozen from an independent decision-tree enumeration
    EXPECT_EQ(exact_second_moment_amm(ZeroOneMatrix::ones(2, 2)), 51);
}

TEST(SecondMoments, RmExamples) {
    EXPECT_EQ(exact_second_moment_rm(ZeroOneMatrix::identity(2)), 1);
    EXPECT_EQ(exact_second_moment_rm(ZeroOneMatrix::ones(2, 2)), 4);
    EXPECT_EQ(exact_second_moment_rm(ZeroOneMatrix(2, 2)), 0);
    EXPECT_THROW(exact_second_moment_rm(ZeroOneMatrix(1, 2)), shape_error);
}

TEST(SecondMoments, JensenWithEqualityIffDeterministic) {
    for_all(3, 3, [](const ZeroOneMatrix& a) {
        const BigCount am = exact_am(a), m2 = exact_second_moment_amm(a);
        ASSERT_GE(m2, am * am);
        const bool deterministic = coin_path_distribution(a, Method::amm).size() == 1;
        ASSERT_EQ(m2 == am * am, deterministic) << to_inline(a);
    });
}

TEST(CriticalRatio, Examples) {
    EXPECT_EQ(exact_critical_ratio(ZeroOneMatrix{{1}}, Method::amm), 1);
    EXPECT_EQ(exact_critical_ratio(ZeroOneMatrix::ones(2, 2), Method::amm), BigRatio(51, 49));
    EXPECT_EQ(exact_critical_ratio(ZeroOneMatrix::identity(2), Method::rm), 1);
    EXPECT_THROW(exact_critical_ratio(ZeroOneMatrix(2, 2), Method::rm), undefined_ratio_error);
}

TEST(CriticalRatio, AmmBoundExhaustiveAndRandom) {
    auto check = [](const ZeroOneMatrix& a) {
        ASSERT_LE(exact_critical_ratio(a, Method::amm), BigRatio(ipow(BigCount(a.cols() + 1), a.rows()))) << to_inline(a);
    };
    for_all(3, 3, check);
    for (std::uint64_t t = 0; t < 100; ++t) check(random_matrix(8, 8, 37, t));
}

TEST(MemoTable, RejectsConflictingWrites) {
    MemoTable<BigCount> memo;
    memo.insert(1, ColumnSet(3), 5);
    EXPECT_EQ(*memo.find(1, ColumnSet(3)), 5);
    EXPECT_NO_THROW(memo.insert(1, ColumnSet(3), 5));
    EXPECT_THROW(memo.insert(1, ColumnSet(3), 6), consistency_error);
    EXPECT_EQ(memo.find(2, ColumnSet(3)), nullptr);
}

TEST(RowExpansion, StatesBoundedByRowsTimesSubsets) {
    const auto a = ZeroOneMatrix::ones(6, 6);
    RowExpansion<policy::AllMatchings> ex(a);
    EXPECT_EQ(ex(), exact_am(a));
    EXPECT_LE(ex.states(), 6u * 64u);
}
