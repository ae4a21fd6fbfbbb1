#ifndef ZENOLAB_CORE_HPP
#define ZENOLAB_CORE_HPP

#include <complex>

namespace zeno {

using complexd = std::complex<double>;

/// Parameters of the driven two-level system whose upper level decays
/// irreversibly to an uncoupled third level.
///
/// Units: hbar = 1, so omega and gamma are angular rates in the same
/// inverse-time unit. gamma is the amplitude decay rate of level |2>;
/// the population |a2|^2 therefore decays at 2*gamma when omega = 0.
struct SystemParams {
    double omega = 0.0;        ///< Rabi coupling, rad per time unit (>= 0)
    double gamma = 0.0;        ///< decay rate of level |2> (>= 0)
    double delta_omega = 1.0;  ///< level splitting omega2 - omega1 (> 0)
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SystemParams& params);

/// Rotating-frame amplitudes (a1, a2) plus the photon-emission
/// probability accumulated so far.  For a normalized initial state,
/// |a1|^2 + |a2|^2 + p_emit stays 1 under evolution.
struct Amplitudes {
    complexd a1{1.0, 0.0};
    complexd a2{0.0, 0.0};
    double p_emit = 0.0;

    double norm2() const { return std::norm(a1) + std::norm(a2); }
    double p1() const { return std::norm(a1); }
    double p2() const { return std::norm(a2); }
};

enum class Regime {
    Rabi,        ///< omega > gamma/2: damped oscillations
    Overdamped,  ///< gamma/2 > omega: monotone freezing
    Critical,    ///< gamma = 2*omega within tolerance
};

const char* to_string(Regime r);

/// Omega_gamma = principal sqrt of (gamma^2/4 - omega^2).  Real in the
/// overdamped regime, purely imaginary in the Rabi regime.
complexd complex_rabi_rate(const SystemParams& params);

/// Propagate amplitudes by time t >= 0 using the closed-form solution of
///   da1/dt = -i omega a2,   da2/dt = -i omega a1 - gamma a2.
/// One complex-valued code path covers both regimes; near the critical
/// point (|Omega_gamma * t| < 1e-6) cosh and sinh(x)/x switch to their
/// Taylor series.  p_emit grows by the norm^2 lost during the step, so
/// composed evolutions preserve the conservation law.
Amplitudes evolve_closed_form(const SystemParams& params, const Amplitudes& init, double t);

/// |a1(t)|^2 for the system prepared on level |1>.  Lies in [0, 1].
double survival_probability(const SystemParams& params, double t);

/// Asymptotic permanent-survival law exp(-2 omega^2 t / gamma), valid for
/// gamma >> omega and t >> 1/gamma.  Requires gamma > 0.
double zeno_asymptote(const SystemParams& params, double t);

/// Scale-relative default: 1e-9 * max(omega, gamma).
double default_regime_tol(const SystemParams& params);

Regime classify_regime(const SystemParams& params, double tol);
Regime classify_regime(const SystemParams& params);

/// Time pi/(2 omega) after which an undamped drive has moved the system
/// from |1> to |2>.
double rabi_transfer_time(const SystemParams& params);

}  // namespace zeno

#endif
