#ifndef ZENOLAB_MCH_HPP
#define ZENOLAB_MCH_HPP

#include <functional>

#include "zenolab/core.hpp"
#include "zenolab/integrator.hpp"

namespace zeno::mch {

/// Continuous energy measurement in the complex-Hamiltonian picture:
/// the effective Hamiltonian gains -i*kappa*(H0 - E(t))^2 for a readout
/// E(t), with kappa the measurement strength.  Energies are angular
/// frequencies (hbar = 1).
struct ReadoutModel {
    double kappa = 0.0;
    std::function<double(double)> readout;
    double e1 = 0.0;
    double e2 = 0.0;

    double delta_omega() const { return e2 - e1; }
};

void validate(const ReadoutModel& model);

struct ZenoDiagnostics {
    double t_lr = 0.0;
    bool zeno_regime = false;
};

/// Measurement strength reproducing a given decay rate: gamma/delta_omega^2.
double kappa_from_gamma(double gamma, double delta_omega);

/// Model whose readout sits permanently on the level-1 energy, with
/// kappa chosen so the damping matches the decay rate of params.
ReadoutModel level1_readout_model(const SystemParams& params);

/// Rotating-frame generator for the driven two-level system under the
/// measurement penalty: diagonal -kappa*(e_i - E(t))^2, off-diagonal
/// -i*omega.
ode::EffectiveGenerator build_effective_generator(const ReadoutModel& model,
                                                  double omega);

/// Level resolution time t_lr = 1/(kappa*delta_omega^2); the Zeno
/// regime is t_lr*omega below the threshold.
ZenoDiagnostics level_resolution_time(const ReadoutModel& model, double omega,
                                      double threshold = 0.1);

/// Probability that the whole record reads the level-1 energy: evolve
/// |1> under the effective generator and return |a1(T)|^2.  Meaningful
/// for a constant readout on e1.
double readout_probability(const ReadoutModel& model, double omega, double T,
                           const ode::StepControl& ctrl);

}  // namespace zeno::mch

#endif
