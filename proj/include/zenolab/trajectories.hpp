#ifndef ZENOLAB_TRAJECTORIES_HPP
#define ZENOLAB_TRAJECTORIES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "zenolab/core.hpp"
#include "zenolab/integrator.hpp"

namespace zeno::traj {

/// Binned jump-time counts on a fixed interval.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;

    void add(double x);
};

/// One quantum-jump realization.  The state evolves unnormalized under
/// the decaying closed form until the norm crosses the trajectory's
/// random threshold; an absent jump_time means no photon in [0, T].
struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::optional<double> jump_time;
    std::vector<ode::Sample> samples;
};

struct EnsembleOptions {
    Amplitudes init{};
    std::size_t n_bins = 50;
    unsigned workers = 0;
};

struct EnsembleResult {
    std::size_t n_traj = 0;
    std::size_t n_survived = 0;
    double survival_fraction = 0.0;
    /// Mean renormalized |a1|^2 at T.  Taken over surviving
    /// trajectories for the absorbing model and over all trajectories
    /// for the damped-Rabi variant.
    double conditional_p1 = 0.0;
    std::uint64_t n_jumps_total = 0;
    std::vector<double> jump_times;
    Histogram jump_time_histogram;
};

/// Single-random-number unraveling: draw r once, jump at the first t
/// where the unnormalized norm^2 falls to r times its initial value,
/// located by bisection (time tolerance 1e-6/max(omega, gamma)).
/// When n_samples > 0 the record carries n_samples+1 uniform samples
/// of the surviving segment.
TrajectoryRecord run_trajectory(const SystemParams& params, double T,
                                std::uint64_t seed, const Amplitudes& init = {},
                                std::size_t n_samples = 0);

/// Absorbing ensemble: a jump removes the trajectory (the third level
/// is uncoupled).  Per-trajectory seeds are derived statelessly from
/// master_seed and the trajectory index, and reduction runs in index
/// order, so the result is identical for any worker count.
EnsembleResult run_ensemble(const SystemParams& params, double T,
                            std::size_t n_traj, std::uint64_t master_seed,
                            const EnsembleOptions& opt = {});

/// Radiative-damping comparison system: a jump emits a photon and
/// resets the state to level 1, after which evolution continues.
/// n_survived counts trajectories with no emission at all.
EnsembleResult run_damped_rabi_variant(const SystemParams& params, double T,
                                       std::size_t n_traj,
                                       std::uint64_t master_seed,
                                       const EnsembleOptions& opt = {});

}  // namespace zeno::traj

#endif
