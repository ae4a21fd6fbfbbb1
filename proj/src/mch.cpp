#include "zenolab/mch.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno::mch {

void validate(const ReadoutModel& model)
{
    if (!std::isfinite(model.kappa) || model.kappa < 0.0)
        throw std::invalid_argument("kappa must be finite and non-negative");
    if (!std::isfinite(model.e1) || !std::isfinite(model.e2))
        throw std::invalid_argument("level energies must be finite");
    if (!model.readout) throw std::invalid_argument("readout must be callable");
}

double kappa_from_gamma(double gamma, double delta_omega)
{
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("gamma must be finite and non-negative");
    if (!(delta_omega > 0.0) || !std::isfinite(delta_omega))
        throw std::invalid_argument("delta_omega must be finite and positive");
    return gamma / (delta_omega * delta_omega);
}

ReadoutModel level1_readout_model(const SystemParams& params)
{
    validate(params);
    ReadoutModel model;
    model.e1 = 0.0;
    model.e2 = params.delta_omega;
    model.kappa = kappa_from_gamma(params.gamma, params.delta_omega);
    model.readout = [e1 = model.e1](double) { return e1; };
    return model;
}

ode::EffectiveGenerator build_effective_generator(const ReadoutModel& model,
                                                  double omega)
{
    validate(model);
    if (!std::isfinite(omega) || omega < 0.0)
        throw std::invalid_argument("omega must be finite and non-negative");
    return {[kappa = model.kappa, e1 = model.e1, e2 = model.e2,
             readout = model.readout, omega](double t) {
        const double e = readout(t);
        const double d1 = e1 - e;
        const double d2 = e2 - e;
        ode::Mat2c g;
        g.m[0][0] = complexd(-kappa * d1 * d1, 0.0);
        g.m[0][1] = complexd(0.0, -omega);
        g.m[1][0] = complexd(0.0, -omega);
        g.m[1][1] = complexd(-kappa * d2 * d2, 0.0);
        return g;
    }};
}

ZenoDiagnostics level_resolution_time(const ReadoutModel& model, double omega,
                                      double threshold)
{
    validate(model);
    if (!(model.kappa > 0.0))
        throw std::invalid_argument("kappa must be positive");
    const double dw = model.delta_omega();
    if (!(dw * dw > 0.0))
        throw std::invalid_argument("delta_omega must be nonzero");
    ZenoDiagnostics diag;
    diag.t_lr = 1.0 / (model.kappa * dw * dw);
    diag.zeno_regime = diag.t_lr * omega < threshold;
    return diag;
}

double readout_probability(const ReadoutModel& model, double omega, double T,
                           const ode::StepControl& ctrl)
{
    if (!(T >= 0.0) || !std::isfinite(T))
        throw std::invalid_argument("T must be finite and non-negative");
    const auto gen = build_effective_generator(model, omega);
    const Amplitudes end = ode::integrate_final(gen, Amplitudes{}, 0.0, T, ctrl);
    return end.p1();
}

}  // namespace zeno::mch
