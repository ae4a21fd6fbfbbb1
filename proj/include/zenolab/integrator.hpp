#ifndef ZENOLAB_INTEGRATOR_HPP
#define ZENOLAB_INTEGRATOR_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "zenolab/core.hpp"

namespace zeno::ode {

/// 2x2 complex matrix, row-major.
struct Mat2c {
    complexd m[2][2]{};

    complexd operator()(int r, int c) const { return m[r][c]; }
};

/// Generator G(t) of the rotating-frame evolution d/dt psi = G(t) psi.
/// For the decaying two-level system G is constant:
///   ((0, -i omega), (-i omega, -gamma)).
struct EffectiveGenerator {
    std::function<Mat2c(double)> g;

    Mat2c operator()(double t) const { return g(t); }

    static EffectiveGenerator constant(const Mat2c& mat);
    static EffectiveGenerator from_params(const SystemParams& params);
};

/// Step control: exactly one of fixed-step or adaptive mode.
/// Auto-chosen fixed steps obey step <= 0.01 * min(1/omega, 1/gamma) so
/// that the fast decay scale stays resolved in the overdamped regime.
struct StepControl {
    double step = 0.0;      // > 0 selects fixed-step mode
    double rel_tol = 0.0;   // both > 0 select adaptive mode
    double abs_tol = 0.0;
    std::size_t max_steps = 10'000'000;

    bool fixed() const { return step > 0.0; }

    static StepControl fixed_step(double h);
    static StepControl adaptive(double rel, double abs);
    /// Fixed step 0.01/max(omega, gamma) (0.01 if both rates vanish).
    static StepControl auto_for(const SystemParams& params);
    static StepControl auto_for_rate(double rate);
};

struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaxStepsExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Sample {
    double t = 0.0;
    Amplitudes state;
};

/// Largest entry magnitude of G sampled on [t0, t1]; the inverse sets the
/// fastest time scale the stepper must resolve.
double rate_scale(const EffectiveGenerator& gen, double t0, double t1);

/// Integrate d/dt psi = G(t) psi from t0 to t1.  Fixed-step mode runs
/// classical RK4; adaptive mode a Dormand-Prince 5(4) embedded pair.
/// The emission probability p_emit is accumulated alongside as an extra
/// quadrature component (per step this reduces to Simpson's rule on the
/// stage values).  Returned samples include both endpoints.
///
/// Throws StepTooLarge if a fixed step exceeds the resolution rule
/// 0.01/rate by more than 10x, MaxStepsExceeded when max_steps runs out.
std::vector<Sample> integrate(const EffectiveGenerator& gen, const Amplitudes& init,
                              double t0, double t1, const StepControl& ctrl);

/// Endpoint state only.
Amplitudes integrate_final(const EffectiveGenerator& gen, const Amplitudes& init,
                           double t0, double t1, const StepControl& ctrl);

/// States at the given ascending times (chained sub-integrations, so the
/// requested times are hit exactly).
std::vector<Sample> integrate_at(const EffectiveGenerator& gen, const Amplitudes& init,
                                 std::span<const double> times, const StepControl& ctrl);

/// exp(G t) for a constant generator, via the 2x2 closed form
/// e^{mu t} (cosh(d t) I + t sinhc(d t) (G - mu I)).
Mat2c propagator_exact(const Mat2c& gen, double t);

/// Empirical order of the fixed-step integrator, measured against the
/// exact propagator at steps h, h/2, h/4.  Empty when the errors sit at
/// the floating-point floor (e.g. the zero generator) so no order can be
/// measured.  Assumes a constant generator.
std::optional<double> convergence_order(const EffectiveGenerator& gen, const Amplitudes& init,
                                        double t);

}  // namespace zeno::ode

#endif
