#include "zenolab/trajectories.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "zenolab/parallel.hpp"
#include "zenolab/rng.hpp"

namespace zeno::traj {

namespace {

double norm2_at(const SystemParams& params, const Amplitudes& init, double t)
{
    return evolve_closed_form(params, init, t).norm2();
}

double bisection_tol(const SystemParams& params, double span)
{
    const double rate = std::max(params.omega, params.gamma);
    return rate > 0.0 ? 1e-6 / rate : 1e-6 * span;
}

/// First t in (0, span] with norm2(t) <= target, given norm2(0) > target
/// and norm2(span) <= target.  norm2 is non-increasing, so bisection
/// closes onto the first crossing.
double locate_jump(const SystemParams& params, const Amplitudes& init,
                   double span, double target)
{
    double lo = 0.0;
    double hi = span;
    const double tol = bisection_tol(params, span);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (norm2_at(params, init, mid) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

void check_ensemble_args(const SystemParams& params, double T,
                         std::size_t n_traj, const EnsembleOptions& opt)
{
    validate(params);
    if (!(T >= 0.0) || !std::isfinite(T))
        throw std::invalid_argument("T must be finite and non-negative");
    if (n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
    if (opt.n_bins < 1) throw std::invalid_argument("n_bins must be at least 1");
}

double renormalized_p1(const Amplitudes& a)
{
    const double n2 = a.norm2();
    return n2 > 0.0 ? a.p1() / n2 : 0.0;
}

}  // namespace

void Histogram::add(double x)
{
    if (counts.empty() || !(hi > lo)) return;
    const double width = (hi - lo) / static_cast<double>(counts.size());
    auto bin = static_cast<std::size_t>((x - lo) / width);
    if (bin >= counts.size()) bin = counts.size() - 1;
    ++counts[bin];
}

TrajectoryRecord run_trajectory(const SystemParams& params, double T,
                                std::uint64_t seed, const Amplitudes& init,
                                std::size_t n_samples)
{
    validate(params);
    if (!(T >= 0.0) || !std::isfinite(T))
        throw std::invalid_argument("T must be finite and non-negative");

    TrajectoryRecord rec;
    rec.seed = seed;

    rng::SplitMix64 gen(seed);
    const double r = gen.uniform();
    const double n0 = init.norm2();
    double t_end = T;
    if (n0 > 0.0 && T > 0.0) {
        const double target = r * n0;
        if (norm2_at(params, init, T) <= target) {
            t_end = locate_jump(params, init, T, target);
            rec.jump_time = t_end;
        }
    }

    if (n_samples > 0) {
        rec.samples.reserve(n_samples + 1);
        for (std::size_t i = 0; i <= n_samples; ++i) {
            const double t =
                t_end * static_cast<double>(i) / static_cast<double>(n_samples);
            rec.samples.push_back({t, evolve_closed_form(params, init, t)});
        }
    }
    return rec;
}

EnsembleResult run_ensemble(const SystemParams& params, double T,
                            std::size_t n_traj, std::uint64_t master_seed,
                            const EnsembleOptions& opt)
{
    check_ensemble_args(params, T, n_traj, opt);
    const unsigned workers = par::resolve_workers(opt.workers);

    constexpr double kNoJump = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_traj(n_traj, kNoJump);
    par::parallel_indexed(n_traj, workers, [&](std::size_t i) {
        const auto rec = run_trajectory(params, T, rng::derive_seed(master_seed, i),
                                        opt.init, 0);
        if (rec.jump_time) per_traj[i] = *rec.jump_time;
    });

    EnsembleResult res;
    res.n_traj = n_traj;
    res.jump_time_histogram = {0.0, T, std::vector<std::uint64_t>(opt.n_bins, 0)};

    const double p1_final = renormalized_p1(evolve_closed_form(params, opt.init, T));
    double p1_sum = 0.0;
    for (std::size_t i = 0; i < n_traj; ++i) {
        if (std::isnan(per_traj[i])) {
            ++res.n_survived;
            p1_sum += p1_final;
        } else {
            res.jump_times.push_back(per_traj[i]);
            res.jump_time_histogram.add(per_traj[i]);
        }
    }
    res.n_jumps_total = res.jump_times.size();
    res.survival_fraction =
        static_cast<double>(res.n_survived) / static_cast<double>(n_traj);
    res.conditional_p1 = res.n_survived > 0
                             ? p1_sum / static_cast<double>(res.n_survived)
                             : std::numeric_limits<double>::quiet_NaN();
    return res;
}

EnsembleResult run_damped_rabi_variant(const SystemParams& params, double T,
                                       std::size_t n_traj,
                                       std::uint64_t master_seed,
                                       const EnsembleOptions& opt)
{
    check_ensemble_args(params, T, n_traj, opt);
    const unsigned workers = par::resolve_workers(opt.workers);

    struct PerTraj {
        std::vector<double> jumps;
        double p1_at_T = 0.0;
    };
    std::vector<PerTraj> per_traj(n_traj);

    par::parallel_indexed(n_traj, workers, [&](std::size_t i) {
        rng::SplitMix64 gen(rng::derive_seed(master_seed, i));
        Amplitudes state = opt.init;
        double t = 0.0;
        auto& out = per_traj[i];
        while (t < T) {
            const double n0 = state.norm2();
            if (n0 <= 0.0) break;
            const double target = gen.uniform() * n0;
            const double span = T - t;
            if (norm2_at(params, state, span) > target) break;
            t += locate_jump(params, state, span, target);
            out.jumps.push_back(t);
            state = Amplitudes{};
        }
        out.p1_at_T = renormalized_p1(evolve_closed_form(params, state, T - t));
    });

    EnsembleResult res;
    res.n_traj = n_traj;
    res.jump_time_histogram = {0.0, T, std::vector<std::uint64_t>(opt.n_bins, 0)};

    double p1_sum = 0.0;
    for (const auto& traj : per_traj) {
        if (traj.jumps.empty()) ++res.n_survived;
        for (double jt : traj.jumps) {
            res.jump_times.push_back(jt);
            res.jump_time_histogram.add(jt);
        }
        p1_sum += traj.p1_at_T;
    }
    res.n_jumps_total = res.jump_times.size();
    res.survival_fraction =
        static_cast<double>(res.n_survived) / static_cast<double>(n_traj);
    res.conditional_p1 = p1_sum / static_cast<double>(n_traj);
    return res;
}

}  // namespace zeno::traj
