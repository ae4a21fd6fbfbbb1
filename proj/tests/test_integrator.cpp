#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "zenolab/core.hpp"
#include "zenolab/integrator.hpp"
#include "zenolab/rng.hpp"

using namespace zeno;
using ode::EffectiveGenerator;
using ode::StepControl;

namespace {

double max_amplitude_gap(const std::vector<ode::Sample>& samples,
                         const SystemParams& params)
{
    double gap = 0.0;
    for (const auto& s : samples) {
        const Amplitudes exact = evolve_closed_form(params, {}, s.t);
        gap = std::max(gap, std::abs(s.state.a1 - exact.a1));
        gap = std::max(gap, std::abs(s.state.a2 - exact.a2));
    }
    return gap;
}

}  // namespace

TEST_CASE("step control picks one mode and validates its inputs")
{
    CHECK(StepControl::fixed_step(0.01).fixed());
    CHECK_FALSE(StepControl::adaptive(1e-8, 1e-10).fixed());
    CHECK_THROWS_AS(StepControl::fixed_step(0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepControl::fixed_step(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(StepControl::adaptive(0.0, 1e-10), std::invalid_argument);

    CHECK(StepControl::auto_for({1.0, 10.0, 1.0}).step == doctest::Approx(1e-3));
    CHECK(StepControl::auto_for({10.0, 1.0, 1.0}).step == doctest::Approx(1e-3));
    CHECK(StepControl::auto_for({0.0, 0.0, 1.0}).step == doctest::Approx(0.01));

    // neither mode selected
    const auto gen = EffectiveGenerator::from_params({1.0, 1.0, 1.0});
    CHECK_THROWS_AS(ode::integrate(gen, {}, 0.0, 1.0, StepControl{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ode::integrate(gen, {}, 1.0, 0.0, StepControl::fixed_step(0.01)),
                    std::invalid_argument);
}

TEST_CASE("rate scale reports the largest generator entry")
{
    CHECK(ode::rate_scale(EffectiveGenerator::from_params({1.0, 10.0, 1.0}), 0.0,
                          1.0) == doctest::Approx(10.0));
    CHECK(ode::rate_scale(EffectiveGenerator::from_params({3.0, 0.5, 1.0}), 0.0,
                          1.0) == doctest::Approx(3.0));
}

TEST_CASE("pure Rabi transfer lands on the lower pole")
{
    const auto gen = EffectiveGenerator::from_params({1.0, 0.0, 1.0});
    const double half = std::acos(-1.0) / 2.0;
    const Amplitudes out =
        ode::integrate_final(gen, {}, 0.0, half, StepControl::fixed_step(1e-3));
    CHECK(std::abs(out.a1) < 1e-8);
    CHECK(std::abs(out.a2 - complexd{0.0, -1.0}) < 1e-8);
}

TEST_CASE("fixed-step solution matches the closed form point by point")
{
    const SystemParams p{1.0, 10.0, 1.0};
    const auto samples = ode::integrate(EffectiveGenerator::from_params(p), {},
                                        0.0, 1.0, StepControl::auto_for(p));
    CHECK(samples.front().t == 0.0);
    CHECK(samples.back().t == 1.0);
    CHECK(max_amplitude_gap(samples, p) < 1e-8);

    // emission bookkeeping follows along
    const Amplitudes exact = evolve_closed_form(p, {}, 1.0);
    CHECK(samples.back().state.p_emit ==
          doctest::Approx(exact.p_emit).epsilon(1e-8));
}

TEST_CASE("critically damped point integrates cleanly")
{
    const SystemParams p{1.0, 2.0, 1.0};
    const Amplitudes out =
        ode::integrate_final(EffectiveGenerator::from_params(p), {}, 0.0, 1.0,
                             StepControl::auto_for(p));
    const double inv_e = 0.367879441171442322;
    CHECK(std::abs(out.a1 - complexd{2.0 * inv_e, 0.0}) < 1e-8);
    CHECK(std::abs(out.a2 - complexd{0.0, -inv_e}) < 1e-8);
}

TEST_CASE("numerical and closed-form oracles agree across the parameter grid")
{
    for (double omega : {0.1, 1.0, 10.0}) {
        for (double gamma : {0.0, 0.2, 2.0, 10.0, 100.0}) {
            const SystemParams p{omega, gamma, 1.0};
            const auto samples =
                ode::integrate(EffectiveGenerator::from_params(p), {}, 0.0, 10.0,
                               StepControl::auto_for(p));
            CAPTURE(omega);
            CAPTURE(gamma);
            CHECK(max_amplitude_gap(samples, p) < 1e-8);
        }
    }
}

TEST_CASE("adaptive solver agrees with the closed form too")
{
    for (double gamma : {0.0, 2.0, 100.0}) {
        const SystemParams p{1.0, gamma, 1.0};
        const auto samples =
            ode::integrate(EffectiveGenerator::from_params(p), {}, 0.0, 5.0,
                           StepControl::adaptive(1e-10, 1e-12));
        CAPTURE(gamma);
        CHECK(max_amplitude_gap(samples, p) < 1e-8);
        CHECK(samples.back().state.p_emit ==
              doctest::Approx(evolve_closed_form(p, {}, 5.0).p_emit)
                  .epsilon(1e-8));
    }
}

TEST_CASE("oversized fixed steps are rejected rather than silently wrong")
{
    const auto gen = EffectiveGenerator::from_params({1.0, 100.0, 1.0});
    // resolution rule 0.01/100; 10x headroom ends at 1e-3
    CHECK_THROWS_AS(ode::integrate(gen, {}, 0.0, 1.0, StepControl::fixed_step(2e-3)),
                    ode::StepTooLarge);
    CHECK_NOTHROW(ode::integrate(gen, {}, 0.0, 1.0, StepControl::fixed_step(1e-3)));
}

TEST_CASE("adaptive mode reports step exhaustion")
{
    auto ctrl = StepControl::adaptive(1e-12, 1e-14);
    ctrl.max_steps = 10;
    const auto gen = EffectiveGenerator::from_params({1.0, 10.0, 1.0});
    CHECK_THROWS_AS(ode::integrate(gen, {}, 0.0, 10.0, ctrl),
                    ode::MaxStepsExceeded);

    auto fixed = StepControl::fixed_step(1e-4);
    fixed.max_steps = 10;
    CHECK_THROWS_AS(ode::integrate(gen, {}, 0.0, 10.0, fixed),
                    ode::MaxStepsExceeded);
}

TEST_CASE("computed norm never grows while the decay channel is open")
{
    rng::SplitMix64 g(991);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemParams p{0.05 + 5.0 * g.uniform(), 5.0 * g.uniform(), 1.0};
        const auto check_monotone = [&](const StepControl& ctrl) {
            const auto samples =
                ode::integrate(EffectiveGenerator::from_params(p), {}, 0.0, 4.0, ctrl);
            double prev = samples.front().state.norm2();
            for (const auto& s : samples) {
                CHECK(s.state.norm2() <= prev + 1e-13);
                prev = s.state.norm2();
            }
        };
        CAPTURE(p.omega);
        CAPTURE(p.gamma);
        check_monotone(StepControl::auto_for(p));
        check_monotone(StepControl::adaptive(1e-8, 1e-10));
    }
}

TEST_CASE("halving the step cuts the error about sixteenfold")
{
    const SystemParams p{1.0, 1.0, 1.0};
    const auto gen = EffectiveGenerator::from_params(p);
    const Amplitudes exact = evolve_closed_form(p, {}, 1.0);
    const auto err_at = [&](double h) {
        const Amplitudes num =
            ode::integrate_final(gen, {}, 0.0, 1.0, StepControl::fixed_step(h));
        return std::max(std::abs(num.a1 - exact.a1), std::abs(num.a2 - exact.a2));
    };
    const double e1 = err_at(0.02);
    const double e2 = err_at(0.01);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("measured convergence order is four")
{
    const auto damped = EffectiveGenerator::from_params({1.0, 2.0, 1.0});
    const auto order = ode::convergence_order(damped, {}, 1.0);
    REQUIRE(order.has_value());
    CHECK(*order == doctest::Approx(4.0).epsilon(0.05));

    const auto rabi = EffectiveGenerator::from_params({1.0, 0.0, 1.0});
    const auto order_rabi = ode::convergence_order(rabi, {}, 1.0);
    REQUIRE(order_rabi.has_value());
    CHECK(*order_rabi == doctest::Approx(4.0).epsilon(0.05));

    CHECK_THROWS_AS(ode::convergence_order(rabi, {}, 0.0), std::invalid_argument);

    // a zero generator leaves nothing to measure
    const auto zero = EffectiveGenerator::constant(ode::Mat2c{});
    CHECK_FALSE(ode::convergence_order(zero, {}, 1.0).has_value());
}

TEST_CASE("time-dependent couplings integrate against an analytic check")
{
    // d/dt psi = -i cos(t) (sigma_x) psi has solution
    // a1 = cos(sin t), a2 = -i sin(sin t) from the upper amplitude
    const EffectiveGenerator gen{[](double t) {
        ode::Mat2c g;
        g.m[0][1] = complexd{0.0, -std::cos(t)};
        g.m[1][0] = complexd{0.0, -std::cos(t)};
        return g;
    }};
    const double T = 2.0;
    const complexd a1_exact{std::cos(std::sin(T)), 0.0};
    const complexd a2_exact{0.0, -std::sin(std::sin(T))};

    const Amplitudes fixed =
        ode::integrate_final(gen, {}, 0.0, T, StepControl::fixed_step(1e-3));
    CHECK(std::abs(fixed.a1 - a1_exact) < 1e-8);
    CHECK(std::abs(fixed.a2 - a2_exact) < 1e-8);

    const Amplitudes adaptive =
        ode::integrate_final(gen, {}, 0.0, T, StepControl::adaptive(1e-10, 1e-12));
    CHECK(std::abs(adaptive.a1 - a1_exact) < 1e-8);
    CHECK(std::abs(adaptive.a2 - a2_exact) < 1e-8);
}

TEST_CASE("sampling at requested times chains exactly through them")
{
    const SystemParams p{1.0, 10.0, 1.0};
    const std::vector<double> times{0.0, 0.3, 0.9, 2.0};
    const auto samples = ode::integrate_at(EffectiveGenerator::from_params(p), {},
                                           times, StepControl::auto_for(p));
    REQUIRE(samples.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(samples[i].t == times[i]);
        const Amplitudes exact = evolve_closed_form(p, {}, times[i]);
        CHECK(std::abs(samples[i].state.a1 - exact.a1) < 1e-8);
        CHECK(std::abs(samples[i].state.a2 - exact.a2) < 1e-8);
        CHECK(samples[i].state.p_emit == doctest::Approx(exact.p_emit).epsilon(1e-8));
    }

    const std::vector<double> bad{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(ode::integrate_at(EffectiveGenerator::from_params(p), {}, bad,
                                      StepControl::auto_for(p)),
                    std::invalid_argument);
}

TEST_CASE("exact propagator reproduces the closed form and composes")
{
    for (double gamma : {0.0, 2.0, 10.0}) {
        const SystemParams p{1.0, gamma, 1.0};
        const ode::Mat2c g = EffectiveGenerator::from_params(p)(0.0);
        const ode::Mat2c prop = ode::propagator_exact(g, 0.7);
        const Amplitudes exact = evolve_closed_form(p, {}, 0.7);
        CAPTURE(gamma);
        CHECK(std::abs(prop.m[0][0] - exact.a1) < 1e-12);
        CHECK(std::abs(prop.m[1][0] - exact.a2) < 1e-12);
    }

    // semigroup property for a generic complex generator
    ode::Mat2c g;
    g.m[0][0] = {0.1, -0.3};
    g.m[0][1] = {-0.2, 0.5};
    g.m[1][0] = {0.4, 0.1};
    g.m[1][1] = {-0.6, 0.2};
    const ode::Mat2c p1 = ode::propagator_exact(g, 0.4);
    const ode::Mat2c p2 = ode::propagator_exact(g, 0.9);
    const ode::Mat2c p3 = ode::propagator_exact(g, 1.3);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const complexd composed =
                p2.m[r][0] * p1.m[0][c] + p2.m[r][1] * p1.m[1][c];
            CHECK(std::abs(composed - p3.m[r][c]) < 1e-12);
        }
    }

    // identity at t = 0
    const ode::Mat2c id = ode::propagator_exact(g, 0.0);
    CHECK(std::abs(id.m[0][0] - 1.0) < 1e-15);
    CHECK(std::abs(id.m[0][1]) < 1e-15);
    CHECK(std::abs(id.m[1][1] - 1.0) < 1e-15);
}

TEST_CASE("zero-length spans return the initial state only")
{
    const auto gen = EffectiveGenerator::from_params({1.0, 1.0, 1.0});
    const auto samples =
        ode::integrate(gen, {}, 2.0, 2.0, StepControl::fixed_step(0.01));
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].t == 2.0);
    CHECK(samples[0].state.a1 == complexd{1.0, 0.0});
}
