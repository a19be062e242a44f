#pragma once

// Invariant suites run by `allmatch verify`. Implementations under test are
// injectable so a deliberately broken routine can be shown to be caught.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ensemble.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "moments.hpp"
#include "oracles.hpp"

namespace allmatch {

enum class Suite { small, full };

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail; ///< first counterexample, or a summary
    std::uint64_t cases = 0;
    double millis = 0.0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    double millis = 0.0;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

struct Implementations {
    std::function<BigCount(const ZeroOneMatrix&)> am = exact_am;
    std::function<MatchingProfile(const ZeroOneMatrix&)> profile = matching_profile;
    std::function<BigCount(const ZeroOneMatrix&)> permanent = permanent_ryser;
    std::function<BigCount(const ZeroOneMatrix&)> am_via_per = am_via_permanent;
    std::function<BigCount(const ZeroOneMatrix&)> amm_second_moment = exact_second_moment_amm;
    std::function<BigCount(const ZeroOneMatrix&)> rm_second_moment = exact_second_moment_rm;
};

namespace detail {

/// Visits every m x n 0-1 matrix with 1 <= m, n <= max_dim (0 <= when allow_empty).
template <class F>
void for_all_small(std::size_t max_dim, F&& f, bool square_only = false) {
    for (std::size_t m = 0; m <= max_dim; ++m)
        for (std::size_t n = 0; n <= max_dim; ++n) {
            if (square_only && m != n) continue;
            enumerate_ensemble(EnsembleSpec::bernoulli(m, n), f);
        }
}

class CheckRunner {
public:
    explicit CheckRunner(VerifyReport& report) : report_(report) {}

    /// body(fail) returns the number of cases; fail(msg) records a counterexample.
    template <class Body>
    void run(const std::string& name, Body&& body) {
        CheckResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        auto fail = [&r](const std::string& msg) {
            if (r.passed) r.detail = msg;
            r.passed = false;
        };
        try {
            r.cases = body(fail);
        } catch (const std::exception& e) {
            fail(std::string("exception: ") + e.what());
        }
        r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (r.passed) r.detail = std::to_string(r.cases) + " cases";
        report_.checks.push_back(std::move(r));
    }

private:
    VerifyReport& report_;
};

} // namespace detail

inline VerifyReport verify_suite(Suite suite, const Implementations& impl = {}) {
    VerifyReport report;
    detail::CheckRunner run(report);
    const auto t0 = std::chrono::steady_clock::now();
    const bool full = suite == Suite::full;

    run.run("am-vs-brute-force", [&](auto fail) {
        std::uint64_t cases = 0;
        auto check = [&](const ZeroOneMatrix& a) {
            ++cases;
            if (impl.am(a) != oracle::brute_force_am(a)) fail("AM mismatch on " + to_inline(a));
        };
        detail::for_all_small(3, check);
        if (full) enumerate_ensemble(EnsembleSpec::bernoulli(4, 4), check);
        return cases;
    });

    run.run("profile-vs-brute-force", [&](auto fail) {
        std::uint64_t cases = 0;
        detail::for_all_small(3, [&](const ZeroOneMatrix& a) {
            ++cases;
            const auto prof = impl.profile(a);
            if (prof.counts != oracle::brute_force_profile(a)) fail("profile mismatch on " + to_inline(a));
            if (prof.total() != impl.am(a)) fail("profile sum differs from AM on " + to_inline(a));
        });
        return cases;
    });

    run.run("ryser-vs-permutation-sum", [&](auto fail) {
        std::uint64_t cases = 0;
        detail::for_all_small(
            3,
            [&](const ZeroOneMatrix& a) {
                ++cases;
                if (impl.permanent(a) != oracle::naive_permanent(a)) fail("permanent mismatch on " + to_inline(a));
            },
            true);
        return cases;
    });

    run.run("am-via-transformed-permanent", [&](auto fail) {
        std::uint64_t cases = 0;
        auto check = [&](const ZeroOneMatrix& a) {
            ++cases;
            if (impl.am_via_per(a) != impl.am(a)) fail("per(B)/n! != AM on " + to_inline(a));
        };
        detail::for_all_small(3, check, true);
        if (full) {
            for (std::size_t n = 4; n <= 6; ++n)
                for (std::uint64_t t = 0; t < 500; ++t) {
                    RandomStream rng(0xC0FFEE, n * 1000 + t);
                    check(sample_matrix(EnsembleSpec::bernoulli(n, n), rng));
                }
        }
        return cases;
    });

    run.run("estimator-unbiasedness-and-second-moments", [&](auto fail) {
        std::uint64_t cases = 0;
        detail::for_all_small(3, [&](const ZeroOneMatrix& a) {
            ++cases;
            const auto amm = moments_of(coin_path_distribution(a, Method::amm));
            if (amm.mean != BigRatio(impl.am(a))) fail("AMM coin-path mean != AM on " + to_inline(a));
            if (amm.second != BigRatio(impl.amm_second_moment(a))) fail("AMM coin-path E(X^2) mismatch on " + to_inline(a));
            if (a.square()) {
                const auto rm = moments_of(coin_path_distribution(a, Method::rm));
                if (rm.mean != BigRatio(impl.permanent(a))) fail("RM coin-path mean != per on " + to_inline(a));
                if (rm.second != BigRatio(impl.rm_second_moment(a))) fail("RM coin-path E(Y^2) mismatch on " + to_inline(a));
            }
        });
        return cases;
    });

    run.run("rm-on-transformed-equals-amm", [&](auto fail) {
        std::uint64_t cases = 0;
        detail::for_all_small(
            2,
            [&](const ZeroOneMatrix& a) {
                ++cases;
                try {
                    transformed_equivalence_check(a, 1, 0);
                } catch (const equivalence_error& e) {
                    fail(e.what());
                }
            },
            true);
        return cases;
    });

    run.run("amm-critical-ratio-bound", [&](auto fail) {
        std::uint64_t cases = 0;
        auto check = [&](const ZeroOneMatrix& a) {
            ++cases;
            const BigCount mean = impl.am(a);
            const BigRatio ratio = make_ratio(impl.amm_second_moment(a), mean * mean);
            if (ratio > BigRatio(ipow(BigCount(a.cols() + 1), a.rows())))
                fail("E(X^2)/E(X)^2 exceeds (n+1)^m on " + to_inline(a));
        };
        detail::for_all_small(3, check);
        if (full)
            for (std::uint64_t t = 0; t < 100; ++t) {
                RandomStream rng(0xBEEF, t);
                check(sample_matrix(EnsembleSpec::bernoulli(8, 8), rng));
            }
        return cases;
    });

    run.run("uniform-ensemble-mean-and-second-moment", [&](auto fail) {
        std::uint64_t cases = 0;
        for (std::size_t n = 0; n <= 3; ++n)
            for (std::size_t m = 0; m <= n; ++m) {
                ++cases;
                const auto spec = EnsembleSpec::bernoulli(m, n);
                if (thm3_mean(m, n) != ensemble_moment_oracle(spec, EnsembleStatistic::mean_am))
                    fail("mean formula mismatch at m=" + std::to_string(m) + " n=" + std::to_string(n));
                if (thm4_second_moment(m, n) != ensemble_moment_oracle(spec, EnsembleStatistic::mean_amm_m2))
                    fail("second-moment formula mismatch at m=" + std::to_string(m) + " n=" + std::to_string(n));
            }
        for (std::size_t n = 0; n <= 8; ++n)
            for (std::size_t m = 0; m <= n; ++m) {
                ++cases;
                if (thm4_second_moment(m, n) != thm4_second_moment_closed_form(m, n))
                    fail("recursion and closed form differ at m=" + std::to_string(m) + " n=" + std::to_string(n));
                if (thm3_mean(m, n) != thm3_mean_recursive(m, n))
                    fail("mean sum and recursion differ at m=" + std::to_string(m) + " n=" + std::to_string(n));
            }
        return cases;
    });

    run.run("edge-ensemble-mean-and-second-moment", [&](auto fail) {
        std::uint64_t cases = 0;
        for (std::size_t n = 1; n <= 3; ++n)
            for (std::size_t m = 0; m <= n * n; ++m) {
                ++cases;
                const auto spec = EnsembleSpec::edge_count(m, n);
                if (thm8_mean(n, m) != ensemble_moment_oracle(spec, EnsembleStatistic::mean_am))
                    fail("graph mean mismatch at n=" + std::to_string(n) + " m=" + std::to_string(m));
                if (thm8_second_moment(n, m) != ensemble_moment_oracle(spec, EnsembleStatistic::mean_am_sq))
                    fail("graph second moment mismatch at n=" + std::to_string(n) + " m=" + std::to_string(m));
            }
        return cases;
    });

    run.run("mean-sandwich", [&](auto fail) {
        const std::size_t hi = full ? 100 : 30;
        std::uint64_t cases = 0;
        for (std::size_t n = 2; n <= hi; ++n) {
            ++cases;
            const auto b = thm5_bounds(n);
            const auto mean = thm3_mean(n, n);
            if (!(b.h <= mean && mean <= b.loose_upper)) fail("h(n) <= mean <= (n+1)h(n) fails at n=" + std::to_string(n));
        }
        return cases;
    });

    // For odd n^2 and eps * n^2 <= 1/2 the lower limit is (n^2+1)/2 and the tail
    // is exactly 1/2, so strictness is only checked where the limit moves.
    run.run("binomial-tail", [&](auto fail) {
        std::uint64_t cases = 0;
        if (thm7_tail(2, BigRatio(1, 50)) != BigRatio(5, 16)) fail("tail(2, 1/50) != 5/16");
        auto lower_limit = [](std::size_t n, const BigRatio& eps) {
            const BigRatio x = (BigRatio(1, 2) + eps) * (n * n);
            BigCount f = numerator(x) / denominator(x);
            return BigRatio(f) < x ? f + 1 : f;
        };
        for (std::size_t n = 1; n <= 10; ++n) {
            std::optional<BigRatio> prev;
            BigCount prev_limit = 0;
            for (int d = 500; d >= 50; d -= 10) {
                ++cases;
                const BigRatio eps(1, d);
                const BigRatio t = thm7_tail(n, eps);
                const BigCount limit = lower_limit(n, eps);
                const std::string at = " at n=" + std::to_string(n) + " eps=1/" + std::to_string(d);
                if (t > BigRatio(1, 2)) fail("tail above 1/2" + at);
                if ((n * n) % 2 == 0 && t >= BigRatio(1, 2)) fail("even-size tail not below 1/2" + at);
                if (prev && t > *prev) fail("tail increases with eps" + at);
                if (prev && limit > prev_limit && !(t < *prev)) fail("tail not strictly smaller after the limit moved" + at);
                prev = t;
                prev_limit = limit;
            }
        }
        return cases;
    });

    report.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace allmatch
