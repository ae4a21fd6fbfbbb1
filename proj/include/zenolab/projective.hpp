#ifndef ZENOLAB_PROJECTIVE_HPP
#define ZENOLAB_PROJECTIVE_HPP

#include <cstdint>
#include <string>

namespace zeno::projective {

/// N instantaneous projective measurements separated by tau, after an
/// initial state-fixing measurement at t = 0.  Total time is n*tau.
struct MeasurementSchedule {
    double tau = 0.0;
    std::uint64_t n = 0;

    double total_time() const { return tau * static_cast<double>(n); }
};

void validate(const MeasurementSchedule& sched);

/// Per-interval transition (p) and stay (q) probabilities fixed by the
/// Rabi rotation accumulated between measurements.
struct IntervalProbabilities {
    double p = 0.0;
    double q = 1.0;
};

/// p = sin^2(omega*tau), q = cos^2(omega*tau).
IntervalProbabilities interval_probs(double omega, double tau);

/// Probability of finding the system back on the initial level after
/// the full schedule, regardless of intermediate outcomes: the even-k
/// binomial sum, evaluated in closed form as (1 + (q - p)^N) / 2.
double return_probability(const MeasurementSchedule& sched,
                          const IntervalProbabilities& probs);

/// Probability that every one of the N measurements finds the initial
/// level: cos^(2N)(omega*tau).  Evaluated as exp(2N ln cos) for small
/// omega*tau to keep precision at large N.
double permanent_survival(const MeasurementSchedule& sched, double omega);

/// Rapid-repetition limit of permanent survival: exp(-omega^2 T tau).
double rapid_repetition_limit(double omega, double tau, double T);

/// One simulated measurement record: the level each measurement finds.
struct ChainOutcome {
    std::string outcomes;
    int final_level = 1;
    std::uint64_t n_flips = 0;
    bool all_stayed = false;
    bool returned_to_initial = false;
};

/// Two-state Markov chain with flip probability p per step, starting
/// on level 1.  Deterministic for a fixed seed.
ChainOutcome simulate_measurement_chain(const MeasurementSchedule& sched,
                                        const IntervalProbabilities& probs,
                                        std::uint64_t seed);

struct ChainStats {
    std::uint64_t n_chains = 0;
    std::uint64_t n_returned = 0;
    std::uint64_t n_all_stayed = 0;
    double return_fraction = 0.0;
    double all_stay_fraction = 0.0;
};

/// Ensemble of chains with the same stateless per-index seeding as the
/// trajectory module; counts are independent of worker count.
ChainStats chain_ensemble(const MeasurementSchedule& sched,
                          const IntervalProbabilities& probs,
                          std::uint64_t n_chains, std::uint64_t master_seed,
                          unsigned workers = 0);

}  // namespace zeno::projective

#endif
