#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "zenolab/core.hpp"
#include "zenolab/projective.hpp"
#include "zenolab/rng.hpp"

using namespace zeno;
using projective::IntervalProbabilities;
using projective::MeasurementSchedule;

namespace {

// all 2^N outcome paths, summed with compensation so the reference
// stays trustworthy at N = 20
double return_probability_by_paths(std::uint64_t n, double p)
{
    const double q = 1.0 - p;
    double sum = 0.0;
    double carry = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        int level = 1;
        double prob = 1.0;
        for (std::uint64_t step = 0; step < n; ++step) {
            const bool flip = (mask >> step) & 1ull;
            prob *= flip ? p : q;
            if (flip) level = 3 - level;
        }
        if (level != 1) continue;
        const double y = prob - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double binom(std::uint64_t n, std::uint64_t k)
{
    double out = 1.0;
    for (std::uint64_t i = 1; i <= k; ++i)
        out *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return out;
}

}  // namespace

TEST_CASE("interval probabilities at the reference rotations")
{
    const double pi = std::acos(-1.0);

    const auto half = projective::interval_probs(1.0, pi / 4.0);
    CHECK(half.p == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.q == doctest::Approx(0.5).epsilon(1e-14));

    const auto full = projective::interval_probs(1.0, pi / 2.0);
    CHECK(full.p == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(full.q < 1e-15);

    const auto small = projective::interval_probs(1.0, 0.02);
    CHECK(small.p == doctest::Approx(3.99946669511030e-4).epsilon(1e-13));
    CHECK(small.p + small.q == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("return probability closed form against direct enumeration")
{
    MeasurementSchedule two{0.1, 2};
    CHECK(projective::return_probability(two, {0.5, 0.5}) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(projective::return_probability(two, {0.0, 1.0}) == 1.0);

    MeasurementSchedule five{0.1, 5};
    CHECK(projective::return_probability(five, {0.2, 0.8}) ==
          doctest::Approx(return_probability_by_paths(5, 0.2)).epsilon(1e-12));

    for (std::uint64_t n : {1ull, 3ull, 8ull, 13ull, 20ull}) {
        for (double p : {0.05, 0.3, 0.5, 0.77, 0.95}) {
            MeasurementSchedule sched{0.1, n};
            CAPTURE(n);
            CAPTURE(p);
            CHECK(projective::return_probability(sched, {p, 1.0 - p}) ==
                  doctest::Approx(return_probability_by_paths(n, p))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("return probability equals the even-flip binomial sum")
{
    for (std::uint64_t n : {2ull, 7ull, 16ull}) {
        for (double p : {0.1, 0.4, 0.9}) {
            double even = 0.0;
            for (std::uint64_t k = 0; k <= n; k += 2)
                even += binom(n, k) * std::pow(p, static_cast<double>(k)) *
                        std::pow(1.0 - p, static_cast<double>(n - k));
            MeasurementSchedule sched{0.1, n};
            CAPTURE(n);
            CAPTURE(p);
            CHECK(projective::return_probability(sched, {p, 1.0 - p}) ==
                  doctest::Approx(even).epsilon(1e-12));
        }
    }
}

TEST_CASE("permanent survival at the frozen reference points")
{
    const double pi = std::acos(-1.0);
    CHECK(projective::permanent_survival({pi / 4.0, 1}, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));

    CHECK(projective::permanent_survival({0.02, 250}, 1.0) ==
          doctest::Approx(0.904831385163100).epsilon(1e-13));
    CHECK(projective::permanent_survival({0.02, 500}, 1.0) ==
          doctest::Approx(0.818719835576174).epsilon(1e-13));

    CHECK(projective::permanent_survival({0.5, 100}, 0.0) == 1.0);
}

TEST_CASE("rapid-repetition limit and its fixed reference value")
{
    CHECK(projective::rapid_repetition_limit(1.0, 0.02, 10.0) ==
          doctest::Approx(0.818730753077982).epsilon(1e-14));
    CHECK(projective::rapid_repetition_limit(1.0, 1e-12, 10.0) ==
          doctest::Approx(1.0).epsilon(1e-11));
    CHECK_THROWS_AS(projective::rapid_repetition_limit(1.0, 0.0, 10.0),
                    std::invalid_argument);

    // same expression as the freezing asymptote once tau = 2/gamma
    for (double gamma : {3.0, 10.0, 100.0}) {
        for (double T : {0.5, 5.0, 20.0}) {
            const double tau = 2.0 / gamma;
            CAPTURE(gamma);
            CAPTURE(T);
            CHECK(projective::rapid_repetition_limit(1.0, tau, T) ==
                  zeno_asymptote({1.0, gamma, 1.0}, T));
        }
    }
}

TEST_CASE("coming back is never less likely than never leaving")
{
    rng::SplitMix64 g(314159u);
    for (int trial = 0; trial < 200; ++trial) {
        const double omega = 0.1 + 3.0 * g.uniform();
        const double tau = 0.01 + 0.6 * g.uniform();
        const auto n = static_cast<std::uint64_t>(1 + g.next() % 40);
        MeasurementSchedule sched{tau, n};
        const auto probs = projective::interval_probs(omega, tau);
        CAPTURE(omega);
        CAPTURE(tau);
        CAPTURE(n);
        CHECK(projective::return_probability(sched, probs) >=
              projective::permanent_survival(sched, omega) - 1e-15);
    }
}

TEST_CASE("frequent measurement freezes the state")
{
    // 1 - P stays below omega^2 T tau whenever the per-interval
    // rotation is small
    for (double omega : {0.5, 1.0, 2.0}) {
        for (double tau : {0.001, 0.01, 0.1}) {
            if (omega * tau > 1.0) continue;
            for (std::uint64_t n : {10ull, 100ull, 1000ull}) {
                MeasurementSchedule sched{tau, n};
                const double surv = projective::permanent_survival(sched, omega);
                CAPTURE(omega);
                CAPTURE(tau);
                CAPTURE(n);
                CHECK(1.0 - surv <= omega * omega * sched.total_time() * tau + 1e-15);
            }
        }
    }

    // and survival approaches one as the schedule refines at fixed T
    const double T = 4.0;
    double prev = 0.0;
    for (std::uint64_t n : {10ull, 100ull, 1000ull, 10000ull}) {
        const double surv = projective::permanent_survival({T / n, n}, 1.0);
        CHECK(surv > prev);
        prev = surv;
    }
    CHECK(prev > std::exp(-1.0 * T * (T / 10000.0)) - 1e-6);
}

TEST_CASE("exponential limit is reached quadratically in the interval")
{
    for (double omega_tau : {0.02, 0.01, 0.002}) {
        for (double T : {1.0, 5.0, 10.0}) {
            const double tau = omega_tau;
            const auto n = static_cast<std::uint64_t>(std::llround(T / tau));
            MeasurementSchedule sched{tau, n};
            const double perm = projective::permanent_survival(sched, 1.0);
            const double rapid = projective::rapid_repetition_limit(1.0, tau, sched.total_time());
            CAPTURE(omega_tau);
            CAPTURE(T);
            CHECK(std::abs(perm - rapid) / rapid < 1e-3);
        }
    }
}

TEST_CASE("discrete schedule with the decay-matched interval tracks the exact curve")
{
    for (double gamma : {100.0, 300.0, 1000.0}) {
        const SystemParams params{1.0, gamma, 1.0};
        const double T = 5.0;
        const double tau = 2.0 / gamma;
        const auto n = static_cast<std::uint64_t>(std::llround(T / tau));
        MeasurementSchedule sched{tau, n};

        const double exact = survival_probability(params, T);
        const double perm = projective::permanent_survival(sched, params.omega);
        const double rapid =
            projective::rapid_repetition_limit(params.omega, tau, sched.total_time());
        CAPTURE(gamma);
        CHECK(std::abs(perm - exact) / exact < 0.02);
        CHECK(std::abs(rapid - exact) / exact < 0.02);
    }
}

TEST_CASE("chains with no flip probability always stay")
{
    MeasurementSchedule sched{0.1, 25};
    const auto out = projective::simulate_measurement_chain(sched, {0.0, 1.0}, 9u);
    CHECK(out.outcomes == std::string(25, '1'));
    CHECK(out.final_level == 1);
    CHECK(out.n_flips == 0);
    CHECK(out.all_stayed);
    CHECK(out.returned_to_initial);
}

TEST_CASE("a chain replays exactly from its seed")
{
    MeasurementSchedule sched{0.1, 40};
    const IntervalProbabilities probs{0.3, 0.7};
    const auto a = projective::simulate_measurement_chain(sched, probs, 555u);
    const auto b = projective::simulate_measurement_chain(sched, probs, 555u);
    CHECK(a.outcomes == b.outcomes);
    CHECK(a.final_level == b.final_level);
    CHECK(a.n_flips == b.n_flips);

    REQUIRE(a.outcomes.size() == 40);
    std::uint64_t flips = 0;
    char prev = '1';
    for (char c : a.outcomes) {
        REQUIRE((c == '1' || c == '2'));
        if (c != prev) ++flips;
        prev = c;
    }
    CHECK(flips == a.n_flips);
    CHECK(a.final_level == (a.outcomes.back() == '1' ? 1 : 2));
    CHECK(a.returned_to_initial == (a.final_level == 1));
    CHECK(a.all_stayed == (a.n_flips == 0));
}

TEST_CASE("chain ensemble return fraction matches the closed form")
{
    MeasurementSchedule sched{0.1, 10};
    const IntervalProbabilities probs{0.3, 0.7};
    const std::uint64_t n = 100000;
    const auto stats = projective::chain_ensemble(sched, probs, n, 31337u);

    CHECK(stats.n_chains == n);
    CHECK(stats.return_fraction ==
          static_cast<double>(stats.n_returned) / static_cast<double>(n));

    const double expected = 0.5000524288;
    const double sigma =
        std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
    CHECK(std::abs(stats.return_fraction - expected) < 3.0 * sigma);

    const double expect_stay = std::pow(0.7, 10.0);
    const double sigma_stay =
        std::sqrt(expect_stay * (1.0 - expect_stay) / static_cast<double>(n));
    CHECK(std::abs(stats.all_stay_fraction - expect_stay) < 3.0 * sigma_stay);
}

TEST_CASE("chain ensemble counts are worker-count independent")
{
    MeasurementSchedule sched{0.05, 20};
    const IntervalProbabilities probs{0.2, 0.8};
    const auto base = projective::chain_ensemble(sched, probs, 20000, 8u, 1);
    for (unsigned w : {2u, 8u}) {
        const auto other = projective::chain_ensemble(sched, probs, 20000, 8u, w);
        CAPTURE(w);
        CHECK(base.n_returned == other.n_returned);
        CHECK(base.n_all_stayed == other.n_all_stayed);
        CHECK(base.return_fraction == other.return_fraction);
        CHECK(base.all_stay_fraction == other.all_stay_fraction);
    }
}

TEST_CASE("schedule validation rejects unusable inputs")
{
    CHECK_THROWS_AS(projective::validate({-0.1, 5}), std::invalid_argument);
    CHECK_THROWS_AS(projective::validate({0.0, 5}), std::invalid_argument);
    CHECK_THROWS_AS(projective::validate({0.1, 0}), std::invalid_argument);
    CHECK_NOTHROW(projective::validate({0.1, 1}));
    CHECK_THROWS_AS(projective::interval_probs(-1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(projective::interval_probs(1.0, -0.1), std::invalid_argument);
}
