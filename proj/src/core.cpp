#include "zenolab/core.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno {

void validate(const SystemParams& params)
{
    if (!(params.omega >= 0.0) || !std::isfinite(params.omega))
        throw std::invalid_argument("omega must be finite and >= 0");
    if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma))
        throw std::invalid_argument("gamma must be finite and >= 0");
    if (!(params.delta_omega > 0.0) || !std::isfinite(params.delta_omega))
        throw std::invalid_argument("delta_omega must be finite and > 0");
}

const char* to_string(Regime r)
{
    switch (r) {
        case Regime::Rabi: return "rabi";
        case Regime::Overdamped: return "overdamped";
        case Regime::Critical: return "critical";
    }
    return "?";
}

complexd complex_rabi_rate(const SystemParams& params)
{
    const double disc = params.gamma * params.gamma / 4.0 - params.omega * params.omega;
    if (disc >= 0.0)
        return complexd(std::sqrt(disc), 0.0);
    return complexd(0.0, std::sqrt(-disc));
}

namespace {

// e^{-gamma t/2} cosh(Og t) and e^{-gamma t/2} sinh(Og t)/Og, evaluated
// without overflow at large gamma t and without 0/0 at Og -> 0.
struct ScaledHyperbolics {
    complexd cosh_term;      // e^{-gamma t/2} cosh(Og t)
    complexd sinh_over_og;   // e^{-gamma t/2} sinh(Og t)/Og
};

ScaledHyperbolics scaled_hyperbolics(const SystemParams& params, complexd og, double t)
{
    const complexd z = og * t;
    ScaledHyperbolics out;
    if (std::abs(z) < 1e-6) {
        // 4-term series of cosh x and sinh(x)/x; truncation below 1e-24.
        const complexd z2 = z * z;
        const complexd ch = 1.0 + z2 * (1.0 / 2 + z2 * (1.0 / 24 + z2 * (1.0 / 720)));
        const complexd shc = 1.0 + z2 * (1.0 / 6 + z2 * (1.0 / 120 + z2 * (1.0 / 5040)));
        const double decay = std::exp(-params.gamma * t / 2.0);
        out.cosh_term = decay * ch;
        out.sinh_over_og = decay * t * shc;
        return out;
    }
    // Split into the two exponentials e^{(±Og - gamma/2) t}.  Re(Og) <=
    // gamma/2 always, so neither exponent has a positive real part and
    // cosh can never overflow ahead of the damping factor.
    complexd exp_plus;
    if (og.imag() == 0.0) {
        // gamma/2 - Og suffers cancellation for gamma >> omega; the
        // algebraically equal form omega^2/(gamma/2 + Og) does not.
        const double slow = params.omega * params.omega / (params.gamma / 2.0 + og.real());
        exp_plus = complexd(-slow * t, 0.0);
    } else {
        exp_plus = (og - params.gamma / 2.0) * t;
    }
    const complexd ep = std::exp(exp_plus);
    const complexd em = std::exp(-(og + params.gamma / 2.0) * t);
    out.cosh_term = (ep + em) / 2.0;
    out.sinh_over_og = (ep - em) / (2.0 * og);
    return out;
}

}  // namespace

Amplitudes evolve_closed_form(const SystemParams& params, const Amplitudes& init, double t)
{
    validate(params);
    if (t < 0.0 || !std::isfinite(t))
        throw std::invalid_argument("t must be finite and >= 0");

    const complexd og = complex_rabi_rate(params);
    const auto h = scaled_hyperbolics(params, og, t);
    const complexd i_omega(0.0, params.omega);
    const double half_gamma = params.gamma / 2.0;

    Amplitudes out;
    out.a1 = init.a1 * h.cosh_term + (half_gamma * init.a1 - i_omega * init.a2) * h.sinh_over_og;
    out.a2 = init.a2 * h.cosh_term - (i_omega * init.a1 + half_gamma * init.a2) * h.sinh_over_og;
    out.p_emit = init.p_emit + (init.norm2() - out.norm2());
    return out;
}

double survival_probability(const SystemParams& params, double t)
{
    const Amplitudes evolved = evolve_closed_form(params, Amplitudes{}, t);
    const double p = std::norm(evolved.a1);
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

double zeno_asymptote(const SystemParams& params, double t)
{
    validate(params);
    if (t < 0.0 || !std::isfinite(t))
        throw std::invalid_argument("t must be finite and >= 0");
    if (params.gamma == 0.0)
        throw std::invalid_argument("gamma must be > 0 for the Zeno asymptote");
    // Written as omega^2 * t * (2/gamma) so that the repeated-projection
    // limit exp(-omega^2 T tau) at tau = 2/gamma is the same expression.
    return std::exp(-(params.omega * params.omega) * t * (2.0 / params.gamma));
}

double default_regime_tol(const SystemParams& params)
{
    return 1e-9 * std::max(params.omega, params.gamma);
}

Regime classify_regime(const SystemParams& params, double tol)
{
    validate(params);
    if (tol < 0.0)
        throw std::invalid_argument("tol must be >= 0");
    const double margin = params.omega - params.gamma / 2.0;
    if (margin > tol) return Regime::Rabi;
    if (-margin > tol) return Regime::Overdamped;
    return Regime::Critical;
}

Regime classify_regime(const SystemParams& params)
{
    return classify_regime(params, default_regime_tol(params));
}

double rabi_transfer_time(const SystemParams& params)
{
    validate(params);
    if (params.omega == 0.0)
        throw std::invalid_argument("omega must be > 0 for a Rabi transfer time");
    return std::acos(-1.0) / (2.0 * params.omega);
}

}  // namespace zeno
