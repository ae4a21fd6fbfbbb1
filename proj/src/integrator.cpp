#include "zenolab/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace zeno::ode {

EffectiveGenerator EffectiveGenerator::constant(const Mat2c& mat)
{
    return EffectiveGenerator{[mat](double) { return mat; }};
}

EffectiveGenerator EffectiveGenerator::from_params(const SystemParams& params)
{
    validate(params);
    Mat2c g;
    const complexd mi_omega(0.0, -params.omega);
    g.m[0][0] = 0.0;
    g.m[0][1] = mi_omega;
    g.m[1][0] = mi_omega;
    g.m[1][1] = complexd(-params.gamma, 0.0);
    return constant(g);
}

StepControl StepControl::fixed_step(double h)
{
    if (!(h > 0.0))
        throw std::invalid_argument("fixed step must be > 0");
    StepControl c;
    c.step = h;
    return c;
}

StepControl StepControl::adaptive(double rel, double abs)
{
    if (!(rel > 0.0) || !(abs > 0.0))
        throw std::invalid_argument("adaptive tolerances must be > 0");
    StepControl c;
    c.rel_tol = rel;
    c.abs_tol = abs;
    return c;
}

StepControl StepControl::auto_for_rate(double rate)
{
    return fixed_step(rate > 0.0 ? 0.01 / rate : 0.01);
}

StepControl StepControl::auto_for(const SystemParams& params)
{
    return auto_for_rate(std::max(params.omega, params.gamma));
}

double rate_scale(const EffectiveGenerator& gen, double t0, double t1)
{
    double scale = 0.0;
    for (double t : {t0, 0.5 * (t0 + t1), t1}) {
        const Mat2c g = gen(t);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                scale = std::max(scale, std::abs(g.m[r][c]));
    }
    return scale;
}

namespace {

// State for the stepper: the two amplitudes plus the running emission
// probability d p/dt = -2 Re <psi, G psi>.
struct State {
    complexd a1, a2;
    double p;
};

State deriv(const EffectiveGenerator& gen, double t, const State& y)
{
    const Mat2c g = gen(t);
    State d;
    d.a1 = g.m[0][0] * y.a1 + g.m[0][1] * y.a2;
    d.a2 = g.m[1][0] * y.a1 + g.m[1][1] * y.a2;
    d.p = -2.0 * (std::conj(y.a1) * d.a1 + std::conj(y.a2) * d.a2).real();
    return d;
}

State axpy(const State& y, double h, const State& d)
{
    return {y.a1 + h * d.a1, y.a2 + h * d.a2, y.p + h * d.p};
}

State rk4_step(const EffectiveGenerator& gen, double t, const State& y, double h)
{
    const State k1 = deriv(gen, t, y);
    const State k2 = deriv(gen, t + h / 2, axpy(y, h / 2, k1));
    const State k3 = deriv(gen, t + h / 2, axpy(y, h / 2, k2));
    const State k4 = deriv(gen, t + h, axpy(y, h, k3));
    State out = y;
    out.a1 += h / 6 * (k1.a1 + 2.0 * k2.a1 + 2.0 * k3.a1 + k4.a1);
    out.a2 += h / 6 * (k1.a2 + 2.0 * k2.a2 + 2.0 * k3.a2 + k4.a2);
    out.p += h / 6 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    return out;
}

Amplitudes to_amplitudes(const State& y)
{
    return Amplitudes{y.a1, y.a2, y.p};
}

// Dormand-Prince 5(4) tableau.
constexpr double dp_c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double dp_b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr double dp_b4[7] = {5179.0 / 57600,    0,           7571.0 / 16695, 393.0 / 640,
                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

std::vector<Sample> integrate_fixed(const EffectiveGenerator& gen, const State& init,
                                    double t0, double t1, const StepControl& ctrl)
{
    const double span = t1 - t0;
    const double scale = rate_scale(gen, t0, t1);
    if (scale > 0.0 && ctrl.step > 10.0 * (0.01 / scale))
        throw StepTooLarge("fixed step " + std::to_string(ctrl.step) +
                           " exceeds 10x the resolution rule 0.01/rate with rate " +
                           std::to_string(scale));

    std::size_t n = span > 0.0 ? static_cast<std::size_t>(std::ceil(span / ctrl.step - 1e-12)) : 0;
    if (n == 0 && span > 0.0) n = 1;
    if (n > ctrl.max_steps)
        throw MaxStepsExceeded("fixed-step integration needs " + std::to_string(n) +
                               " steps, max_steps is " + std::to_string(ctrl.max_steps));

    std::vector<Sample> samples;
    samples.reserve(n + 1);
    State y = init;
    samples.push_back({t0, to_amplitudes(y)});
    const double h = span / static_cast<double>(n == 0 ? 1 : n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + h * static_cast<double>(i);
        y = rk4_step(gen, t, y, h);
        const double t_next = (i + 1 == n) ? t1 : t0 + h * static_cast<double>(i + 1);
        samples.push_back({t_next, to_amplitudes(y)});
    }
    return samples;
}

std::vector<Sample> integrate_adaptive(const EffectiveGenerator& gen, const State& init,
                                       double t0, double t1, const StepControl& ctrl)
{
    std::vector<Sample> samples;
    State y = init;
    double t = t0;
    samples.push_back({t, to_amplitudes(y)});
    if (t1 <= t0) return samples;

    const double scale = rate_scale(gen, t0, t1);
    double h = std::min(t1 - t0, scale > 0.0 ? 0.01 / scale : (t1 - t0) / 10.0);
    std::size_t attempts = 0;

    while (t < t1) {
        if (++attempts > ctrl.max_steps)
            throw MaxStepsExceeded("adaptive integration exceeded max_steps = " +
                                   std::to_string(ctrl.max_steps));
        h = std::min(h, t1 - t);

        State k[7];
        k[0] = deriv(gen, t, y);
        for (int s = 1; s < 7; ++s) {
            State ys = y;
            for (int j = 0; j < s; ++j) {
                ys.a1 += h * dp_a[s][j] * k[j].a1;
                ys.a2 += h * dp_a[s][j] * k[j].a2;
                ys.p += h * dp_a[s][j] * k[j].p;
            }
            k[s] = deriv(gen, t + dp_c[s] * h, ys);
        }
        State y5 = y, y4 = y;
        for (int s = 0; s < 7; ++s) {
            y5.a1 += h * dp_b5[s] * k[s].a1;
            y5.a2 += h * dp_b5[s] * k[s].a2;
            y5.p += h * dp_b5[s] * k[s].p;
            y4.a1 += h * dp_b4[s] * k[s].a1;
            y4.a2 += h * dp_b4[s] * k[s].a2;
            y4.p += h * dp_b4[s] * k[s].p;
        }

        // Scaled RMS error over the five real components.
        double err = 0.0;
        const double diffs[5] = {std::abs(y5.a1.real() - y4.a1.real()),
                                 std::abs(y5.a1.imag() - y4.a1.imag()),
                                 std::abs(y5.a2.real() - y4.a2.real()),
                                 std::abs(y5.a2.imag() - y4.a2.imag()),
                                 std::abs(y5.p - y4.p)};
        const double mags[5] = {std::abs(y.a1.real()), std::abs(y.a1.imag()),
                                std::abs(y.a2.real()), std::abs(y.a2.imag()), std::abs(y.p)};
        for (int i = 0; i < 5; ++i) {
            const double sc = ctrl.abs_tol + ctrl.rel_tol * std::max(mags[i], 1.0);
            err += (diffs[i] / sc) * (diffs[i] / sc);
        }
        err = std::sqrt(err / 5.0);

        if (err <= 1.0) {
            t += h;
            y = y5;
            samples.push_back({t, to_amplitudes(y)});
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return samples;
}

}  // namespace

std::vector<Sample> integrate(const EffectiveGenerator& gen, const Amplitudes& init,
                              double t0, double t1, const StepControl& ctrl)
{
    if (t1 < t0)
        throw std::invalid_argument("t1 must be >= t0");
    if (!ctrl.fixed() && !(ctrl.rel_tol > 0.0 && ctrl.abs_tol > 0.0))
        throw std::invalid_argument("StepControl must select fixed or adaptive mode");
    const State y0{init.a1, init.a2, init.p_emit};
    return ctrl.fixed() ? integrate_fixed(gen, y0, t0, t1, ctrl)
                        : integrate_adaptive(gen, y0, t0, t1, ctrl);
}

Amplitudes integrate_final(const EffectiveGenerator& gen, const Amplitudes& init,
                           double t0, double t1, const StepControl& ctrl)
{
    return integrate(gen, init, t0, t1, ctrl).back().state;
}

std::vector<Sample> integrate_at(const EffectiveGenerator& gen, const Amplitudes& init,
                                 std::span<const double> times, const StepControl& ctrl)
{
    std::vector<Sample> out;
    out.reserve(times.size());
    if (times.empty()) return out;
    Amplitudes state = init;
    double t_prev = times.front();
    out.push_back({t_prev, state});
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] < t_prev)
            throw std::invalid_argument("times must be ascending");
        state = integrate_final(gen, state, t_prev, times[i], ctrl);
        t_prev = times[i];
        out.push_back({t_prev, state});
    }
    return out;
}

Mat2c propagator_exact(const Mat2c& gen, double t)
{
    const complexd mu = (gen.m[0][0] + gen.m[1][1]) / 2.0;
    const complexd d = (gen.m[0][0] - gen.m[1][1]) / 2.0;
    const complexd delta = std::sqrt(d * d + gen.m[0][1] * gen.m[1][0]);
    const complexd z = delta * t;

    complexd ch, t_shc;
    if (std::abs(z) < 1e-6) {
        const complexd z2 = z * z;
        ch = 1.0 + z2 * (1.0 / 2 + z2 * (1.0 / 24 + z2 * (1.0 / 720)));
        t_shc = t * (1.0 + z2 * (1.0 / 6 + z2 * (1.0 / 120 + z2 * (1.0 / 5040))));
        const complexd scale = std::exp(mu * t);
        ch *= scale;
        t_shc *= scale;
    } else {
        const complexd ep = std::exp(mu * t + z);
        const complexd em = std::exp(mu * t - z);
        ch = (ep + em) / 2.0;
        t_shc = (ep - em) / (2.0 * delta);
    }

    Mat2c p;
    p.m[0][0] = ch + t_shc * (gen.m[0][0] - mu);
    p.m[0][1] = t_shc * gen.m[0][1];
    p.m[1][0] = t_shc * gen.m[1][0];
    p.m[1][1] = ch + t_shc * (gen.m[1][1] - mu);
    return p;
}

std::optional<double> convergence_order(const EffectiveGenerator& gen, const Amplitudes& init,
                                        double t)
{
    if (!(t > 0.0))
        throw std::invalid_argument("t must be > 0");
    const Mat2c g = gen(0.0);
    const Mat2c prop = propagator_exact(g, t);
    const complexd a1_exact = prop.m[0][0] * init.a1 + prop.m[0][1] * init.a2;
    const complexd a2_exact = prop.m[1][0] * init.a1 + prop.m[1][1] * init.a2;

    const double scale = rate_scale(gen, 0.0, t);
    const double h0 = scale > 0.0 ? 0.08 / scale : t / 8.0;

    double errs[3];
    for (int i = 0; i < 3; ++i) {
        const auto ctrl = StepControl::fixed_step(h0 / std::pow(2.0, i));
        const Amplitudes num = integrate_final(gen, init, 0.0, t, ctrl);
        errs[i] = std::max(std::abs(num.a1 - a1_exact), std::abs(num.a2 - a2_exact));
    }

    const double floor = 1e-13;
    if (errs[0] < floor || errs[1] < floor || errs[2] < floor)
        return std::nullopt;
    return 0.5 * (std::log2(errs[0] / errs[1]) + std::log2(errs[1] / errs[2]));
}

}  // namespace zeno::ode
