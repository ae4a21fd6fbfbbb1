#include "zenolab/projective.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "zenolab/parallel.hpp"
#include "zenolab/rng.hpp"

namespace zeno::projective {

void validate(const MeasurementSchedule& sched)
{
    if (!(sched.tau > 0.0) || !std::isfinite(sched.tau))
        throw std::invalid_argument("tau must be finite and positive");
    if (sched.n < 1) throw std::invalid_argument("n must be at least 1");
}

IntervalProbabilities interval_probs(double omega, double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("tau must be finite and positive");
    if (!std::isfinite(omega) || omega < 0.0)
        throw std::invalid_argument("omega must be finite and non-negative");
    const double s = std::sin(omega * tau);
    const double c = std::cos(omega * tau);
    return {s * s, c * c};
}

double return_probability(const MeasurementSchedule& sched,
                          const IntervalProbabilities& probs)
{
    validate(sched);
    return 0.5 * (1.0 + std::pow(probs.q - probs.p,
                                 static_cast<double>(sched.n)));
}

double permanent_survival(const MeasurementSchedule& sched, double omega)
{
    validate(sched);
    const double theta = omega * sched.tau;
    const double c = std::cos(theta);
    const double n = static_cast<double>(sched.n);
    if (std::abs(theta) < 0.1) return std::exp(2.0 * n * std::log(c));
    return std::pow(c * c, n);
}

double rapid_repetition_limit(double omega, double tau, double T)
{
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    return std::exp(-(omega * omega) * T * tau);
}

ChainOutcome simulate_measurement_chain(const MeasurementSchedule& sched,
                                        const IntervalProbabilities& probs,
                                        std::uint64_t seed)
{
    validate(sched);
    rng::SplitMix64 gen(seed);
    ChainOutcome out;
    out.outcomes.reserve(sched.n);
    int level = 1;
    for (std::uint64_t k = 0; k < sched.n; ++k) {
        if (gen.uniform() < probs.p) {
            level = 3 - level;
            ++out.n_flips;
        }
        out.outcomes.push_back(level == 1 ? '1' : '2');
    }
    out.final_level = level;
    out.all_stayed = out.n_flips == 0;
    out.returned_to_initial = level == 1;
    return out;
}

ChainStats chain_ensemble(const MeasurementSchedule& sched,
                          const IntervalProbabilities& probs,
                          std::uint64_t n_chains, std::uint64_t master_seed,
                          unsigned workers)
{
    validate(sched);
    if (n_chains < 1) throw std::invalid_argument("n_chains must be at least 1");

    std::atomic<std::uint64_t> returned{0};
    std::atomic<std::uint64_t> stayed{0};
    par::parallel_indexed(n_chains, par::resolve_workers(workers),
                          [&](std::size_t i) {
        const auto out = simulate_measurement_chain(
            sched, probs, rng::derive_seed(master_seed, i));
        if (out.returned_to_initial) returned.fetch_add(1, std::memory_order_relaxed);
        if (out.all_stayed) stayed.fetch_add(1, std::memory_order_relaxed);
    });

    ChainStats stats;
    stats.n_chains = n_chains;
    stats.n_returned = returned.load();
    stats.n_all_stayed = stayed.load();
    stats.return_fraction =
        static_cast<double>(stats.n_returned) / static_cast<double>(n_chains);
    stats.all_stay_fraction =
        static_cast<double>(stats.n_all_stayed) / static_cast<double>(n_chains);
    return stats;
}

}  // namespace zeno::projective
