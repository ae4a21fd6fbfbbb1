#include "zenolab/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "zenolab/integrator.hpp"
#include "zenolab/mch.hpp"
#include "zenolab/projective.hpp"
#include "zenolab/trajectories.hpp"

namespace zeno::cli {

using ojson = nlohmann::ordered_json;

namespace {

std::string fmt_g(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

double rel_diff(double a, double b)
{
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom > 0.0 ? std::abs(a - b) / denom : 0.0;
}

std::vector<double> time_grid(double T, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = (i + 1 == n) ? T
                            : T * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return t;
}

std::vector<double> axis_points(const AxisSpec& axis)
{
    std::vector<double> v(axis.count);
    const double lo = axis.log ? std::log(axis.min) : axis.min;
    const double hi = axis.log ? std::log(axis.max) : axis.max;
    for (std::size_t i = 0; i < axis.count; ++i) {
        if (i == 0) {
            v[i] = axis.min;
        } else if (i + 1 == axis.count) {
            v[i] = axis.max;
        } else {
            const double f =
                static_cast<double>(i) / static_cast<double>(axis.count - 1);
            const double x = lo + (hi - lo) * f;
            v[i] = axis.log ? std::exp(x) : x;
        }
    }
    return v;
}

CsvTable series_table(const std::vector<ode::Sample>& series)
{
    CsvTable tab;
    tab.header = {"t",  "re_a1", "im_a1", "re_a2",  "im_a2",
                  "p1", "p2",    "norm2", "p_emit"};
    tab.rows.reserve(series.size());
    for (const auto& s : series) {
        tab.rows.push_back({s.t, s.state.a1.real(), s.state.a1.imag(),
                            s.state.a2.real(), s.state.a2.imag(), s.state.p1(),
                            s.state.p2(), s.state.norm2(), s.state.p_emit});
    }
    return tab;
}

// ---------------------------------------------------------------- SVG

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> pts;
};

std::string fmt_coord(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string svg_line_chart(const std::string& title, const std::string& xlabel,
                           bool log_x, const std::vector<SvgSeries>& series)
{
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e"};
    const double W = 840, H = 520, L = 70, R = 20, T = 40, B = 50;

    const auto tx = [log_x](double x) { return log_x ? std::log10(x) : x; };
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool seen = false;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.pts) {
            const double u = tx(x);
            if (!std::isfinite(u) || !std::isfinite(y)) continue;
            if (!seen) {
                xmin = xmax = u;
                ymin = ymax = y;
                seen = true;
            } else {
                xmin = std::min(xmin, u);
                xmax = std::max(xmax, u);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (xmax - xmin < 1e-300) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    const double pad = (ymax - ymin < 1e-300) ? 0.5 : 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const auto X = [&](double u) { return L + (u - xmin) / (xmax - xmin) * (W - L - R); };
    const auto Y = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n"
      << "<text x=\"" << W / 2
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\" fill=\"#333\">"
      << title << "</text>\n";

    for (int i = 0; i < 5; ++i) {
        const double f = i / 4.0;
        const double u = xmin + f * (xmax - xmin);
        const double y = ymin + f * (ymax - ymin);
        const double px = X(u);
        const double py = Y(y);
        s << "<line x1=\"" << fmt_coord(px) << "\" y1=\"" << T << "\" x2=\""
          << fmt_coord(px) << "\" y2=\"" << H - B
          << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
          << "<line x1=\"" << L << "\" y1=\"" << fmt_coord(py) << "\" x2=\""
          << W - R << "\" y2=\"" << fmt_coord(py)
          << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
          << "<text x=\"" << fmt_coord(px) << "\" y=\"" << H - B + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\" fill=\"#333\">"
          << fmt_tick(log_x ? std::pow(10.0, u) : u) << "</text>\n"
          << "<text x=\"" << L - 6 << "\" y=\"" << fmt_coord(py + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\" fill=\"#333\">"
          << fmt_tick(y) << "</text>\n";
    }
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
      << "\" y2=\"" << H - B << "\" stroke=\"#333\" stroke-width=\"1\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
      << H - B << "\" stroke=\"#333\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" fill=\"#333\">"
      << xlabel << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % 5];
        std::string pts;
        const auto flush = [&] {
            if (!pts.empty()) {
                s << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\""
                  << color << "\" stroke-width=\"1.5\"/>\n";
                pts.clear();
            }
        };
        for (const auto& [x, y] : series[k].pts) {
            const double u = tx(x);
            if (!std::isfinite(u) || !std::isfinite(y)) {
                flush();
                continue;
            }
            pts += fmt_coord(X(u)) + "," + fmt_coord(Y(y)) + " ";
        }
        flush();
        const double ly = T + 16 + 18.0 * static_cast<double>(k);
        s << "<line x1=\"" << W - R - 150 << "\" y1=\"" << fmt_coord(ly - 4)
          << "\" x2=\"" << W - R - 120 << "\" y2=\"" << fmt_coord(ly - 4)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << W - R - 114 << "\" y=\"" << fmt_coord(ly)
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">"
          << series[k].name << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& xlabel, bool log_x, const CsvTable& tab,
                     std::size_t x_col, const std::vector<std::size_t>& y_cols)
{
    std::vector<SvgSeries> series;
    for (std::size_t c : y_cols) {
        SvgSeries s;
        s.name = tab.header[c];
        for (const auto& row : tab.rows) s.pts.emplace_back(row[x_col], row[c]);
        series.push_back(std::move(s));
    }
    write_text_file(path, svg_line_chart(title, xlabel, log_x, series));
}

// ---------------------------------------------------------------- JSON

ojson axis_json(const AxisSpec& axis)
{
    return ojson{{"name", axis.name},
                 {"min", axis.min},
                 {"max", axis.max},
                 {"count", axis.count},
                 {"scale", axis.log ? "log" : "lin"}};
}

ojson params_json(const ScenarioConfig& c)
{
    ojson j;
    j["omega"] = c.params.omega;
    j["gamma"] = c.params.gamma;
    j["delta_omega"] = c.params.delta_omega;
    switch (c.scenario) {
    case Scenario::Evolve:
    case Scenario::Mch:
        j["time"] = c.time;
        j["sample_points"] = c.sample_points;
        break;
    case Scenario::Trajectories:
    case Scenario::DampedRabi:
        j["time"] = c.time;
        j["n_traj"] = c.n_traj;
        j["master_seed"] = c.master_seed;
        j["sample_points"] = c.sample_points;
        j["n_bins"] = c.n_bins;
        break;
    case Scenario::Projective:
        j["tau"] = *c.tau;
        j["n_measurements"] = *c.n_measurements;
        j["n_traj"] = c.n_traj;
        j["master_seed"] = c.master_seed;
        break;
    case Scenario::Compare:
        j["time"] = c.time;
        break;
    case Scenario::Sweep:
        j["time"] = c.time;
        j["axis"] = axis_json(*c.axis);
        break;
    }
    return j;
}

void write_summary(const ScenarioConfig& c, const ojson& results)
{
    ojson j;
    j["scenario"] = to_string(c.scenario);
    j["params"] = params_json(c);
    j["results"] = results;
    j["version"] = kVersion;
    write_text_file(sibling_path(c.output_path, ".json"), j.dump(2) + "\n");
}

// ---------------------------------------------------------------- scenarios

std::vector<ode::Sample> closed_form_series(const SystemParams& params,
                                            const std::vector<double>& times)
{
    std::vector<ode::Sample> series;
    series.reserve(times.size());
    for (double t : times)
        series.push_back({t, evolve_closed_form(params, Amplitudes{}, t)});
    return series;
}

void run_evolve(const ScenarioConfig& c)
{
    const auto series =
        closed_form_series(c.params, time_grid(c.time, c.sample_points));
    const CsvTable tab = series_table(series);
    write_csv(c.output_path, tab);

    const Amplitudes& end = series.back().state;
    ojson results;
    results["regime"] = to_string(classify_regime(c.params));
    results["p1_final"] = end.p1();
    results["p2_final"] = end.p2();
    results["norm2_final"] = end.norm2();
    results["p_emit_final"] = end.p_emit;
    results["survival_probability"] = survival_probability(c.params, c.time);
    write_summary(c, results);

    if (c.svg)
        write_svg_chart(sibling_path(c.output_path, ".svg"),
                        "Damped Rabi evolution", "t", false, tab, 0, {5, 7});
}

void run_mch(const ScenarioConfig& c)
{
    const auto model = mch::level1_readout_model(c.params);
    const auto gen = mch::build_effective_generator(model, c.params.omega);
    const auto ctrl = ode::StepControl::auto_for(c.params);
    const auto times = time_grid(c.time, c.sample_points);
    const auto series = ode::integrate_at(gen, Amplitudes{}, times, ctrl);
    const CsvTable tab = series_table(series);
    write_csv(c.output_path, tab);

    ojson results;
    results["kappa"] = model.kappa;
    if (model.kappa > 0.0) {
        const auto diag = mch::level_resolution_time(model, c.params.omega);
        results["t_lr"] = diag.t_lr;
        results["zeno_regime"] = diag.zeno_regime;
    }
    const double readout = series.back().state.p1();
    const double exact = survival_probability(c.params, c.time);
    results["readout_probability"] = readout;
    results["survival_exact"] = exact;
    results["rel_diff_vs_exact"] = rel_diff(readout, exact);
    write_summary(c, results);

    if (c.svg)
        write_svg_chart(sibling_path(c.output_path, ".svg"),
                        "Continuous-measurement evolution", "t", false, tab, 0,
                        {5, 7});
}

CsvTable histogram_table(const traj::Histogram& hist,
                         const SystemParams& params, std::size_t n_traj,
                         bool with_expected)
{
    CsvTable tab;
    tab.header = {"bin_lo", "bin_hi", "count"};
    if (with_expected) tab.header.push_back("expected");
    const std::size_t n_bins = hist.counts.size();
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double lo = hist.lo + (hist.hi - hist.lo) * static_cast<double>(b) /
                                        static_cast<double>(n_bins);
        const double hi = (b + 1 == n_bins)
                              ? hist.hi
                              : hist.lo + (hist.hi - hist.lo) *
                                              static_cast<double>(b + 1) /
                                              static_cast<double>(n_bins);
        std::vector<double> row{lo, hi, static_cast<double>(hist.counts[b])};
        if (with_expected) {
            const double expected =
                static_cast<double>(n_traj) *
                (evolve_closed_form(params, Amplitudes{}, lo).norm2() -
                 evolve_closed_form(params, Amplitudes{}, hi).norm2());
            row.push_back(expected);
        }
        tab.rows.push_back(std::move(row));
    }
    return tab;
}

void run_trajectories(const ScenarioConfig& c)
{
    traj::EnsembleOptions opt;
    opt.n_bins = c.n_bins;
    opt.workers = c.workers;
    const auto res =
        traj::run_ensemble(c.params, c.time, c.n_traj, c.master_seed, opt);

    const auto series =
        closed_form_series(c.params, time_grid(c.time, c.sample_points));
    const CsvTable tab = series_table(series);
    write_csv(c.output_path, tab);
    write_csv(sibling_path(c.output_path, "_hist.csv"),
              histogram_table(res.jump_time_histogram, c.params, c.n_traj, true));

    const Amplitudes& end = series.back().state;
    ojson results;
    results["n_traj"] = res.n_traj;
    results["n_survived"] = res.n_survived;
    results["survival_fraction"] = res.survival_fraction;
    results["conditional_p1"] = res.conditional_p1;
    results["n_jumps_total"] = res.n_jumps_total;
    results["no_jump_probability_exact"] = end.norm2();
    results["conditional_p1_exact"] =
        end.norm2() > 0.0 ? end.p1() / end.norm2() : 0.0;
    write_summary(c, results);

    if (c.svg)
        write_svg_chart(sibling_path(c.output_path, ".svg"),
                        "No-jump evolution", "t", false, tab, 0, {5, 7});
}

void run_damped_rabi(const ScenarioConfig& c)
{
    traj::EnsembleOptions opt;
    opt.n_bins = c.n_bins;
    opt.workers = c.workers;
    const auto res = traj::run_damped_rabi_variant(c.params, c.time, c.n_traj,
                                                   c.master_seed, opt);

    const auto series =
        closed_form_series(c.params, time_grid(c.time, c.sample_points));
    const CsvTable tab = series_table(series);
    write_csv(c.output_path, tab);
    write_csv(sibling_path(c.output_path, "_hist.csv"),
              histogram_table(res.jump_time_histogram, c.params, c.n_traj, false));

    ojson results;
    results["n_traj"] = res.n_traj;
    results["n_survived"] = res.n_survived;
    results["survival_fraction"] = res.survival_fraction;
    results["conditional_p1"] = res.conditional_p1;
    results["n_jumps_total"] = res.n_jumps_total;
    results["mean_jumps"] = static_cast<double>(res.n_jumps_total) /
                            static_cast<double>(res.n_traj);
    write_summary(c, results);

    if (c.svg)
        write_svg_chart(sibling_path(c.output_path, ".svg"),
                        "No-jump segment evolution", "t", false, tab, 0, {5, 7});
}

void run_projective(const ScenarioConfig& c)
{
    const double tau = *c.tau;
    const std::uint64_t n = *c.n_measurements;
    const projective::MeasurementSchedule full{tau, n};
    const auto probs = projective::interval_probs(c.params.omega, tau);

    CsvTable tab;
    tab.header = {"k", "t", "p_return", "p_permanent", "rapid_limit"};
    tab.rows.reserve(n);
    for (std::uint64_t k = 1; k <= n; ++k) {
        const projective::MeasurementSchedule partial{tau, k};
        const double t = partial.total_time();
        tab.rows.push_back(
            {static_cast<double>(k), t,
             projective::return_probability(partial, probs),
             projective::permanent_survival(partial, c.params.omega),
             projective::rapid_repetition_limit(c.params.omega, tau, t)});
    }
    write_csv(c.output_path, tab);

    const auto chain = projective::chain_ensemble(full, probs, c.n_traj,
                                                  c.master_seed, c.workers);

    ojson results;
    results["p"] = probs.p;
    results["q"] = probs.q;
    results["total_time"] = full.total_time();
    results["return_probability"] = projective::return_probability(full, probs);
    results["permanent_survival"] =
        projective::permanent_survival(full, c.params.omega);
    results["rapid_repetition_limit"] =
        projective::rapid_repetition_limit(c.params.omega, tau, full.total_time());
    results["rapid_limit_valid"] =
        c.params.omega * tau < std::numbers::pi / 2.0;
    results["chain"] = ojson{{"n_chains", chain.n_chains},
                             {"return_fraction", chain.return_fraction},
                             {"all_stay_fraction", chain.all_stay_fraction}};
    write_summary(c, results);

    if (c.svg)
        write_svg_chart(sibling_path(c.output_path, ".svg"),
                        "Repeated projective measurements", "t", false, tab, 1,
                        {2, 3, 4});
}

void run_compare(const ScenarioConfig& c)
{
    const double T = c.time;
    const double tau_id = 2.0 / c.params.gamma;
    const auto n_id = static_cast<std::uint64_t>(
        std::max<long long>(1, std::llround(T / tau_id)));

    const double exact = survival_probability(c.params, T);
    const double zeno = zeno_asymptote(c.params, T);
    const double proj_perm = projective::permanent_survival(
        projective::MeasurementSchedule{tau_id, n_id}, c.params.omega);
    const double proj_rapid =
        projective::rapid_repetition_limit(c.params.omega, tau_id, T);
    const auto model = mch::level1_readout_model(c.params);
    const double mch_prob = mch::readout_probability(
        model, c.params.omega, T, ode::StepControl::auto_for(c.params));

    CsvTable tab;
    tab.header = {"omega",          "gamma",
                  "time",           "tau_identified",
                  "n_measurements", "survival_exact",
                  "zeno_asymptote", "projective_permanent",
                  "projective_rapid", "mch_readout"};
    tab.rows.push_back({c.params.omega, c.params.gamma, T, tau_id,
                        static_cast<double>(n_id), exact, zeno, proj_perm,
                        proj_rapid, mch_prob});
    write_csv(c.output_path, tab);

    ojson results;
    results["tau_identified"] = tau_id;
    results["n_measurements_identified"] = n_id;
    results["survival_exact"] = exact;
    results["zeno_asymptote"] = zeno;
    results["projective_permanent"] = proj_perm;
    results["projective_rapid"] = proj_rapid;
    results["mch_readout"] = mch_prob;
    results["rel_diff"] =
        ojson{{"zeno_vs_exact", rel_diff(zeno, exact)},
              {"projective_vs_exact", rel_diff(proj_perm, exact)},
              {"mch_vs_exact", rel_diff(mch_prob, exact)},
              {"projective_vs_zeno", rel_diff(proj_perm, zeno)},
              {"mch_vs_zeno", rel_diff(mch_prob, zeno)},
              {"mch_vs_projective", rel_diff(mch_prob, proj_perm)},
              {"rapid_vs_zeno", rel_diff(proj_rapid, zeno)}};
    write_summary(c, results);
}

void run_sweep(const ScenarioConfig& c)
{
    const AxisSpec& axis = *c.axis;
    const auto values = axis_points(axis);
    const double T = c.time;
    constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

    CsvTable tab;
    tab.header = {axis.name,        "survival_exact",
                  "zeno_asymptote", "projective_permanent",
                  "projective_rapid", "mch_readout"};

    for (double value : values) {
        SystemParams p = c.params;
        if (axis.name == "omega") p.omega = value;
        if (axis.name == "gamma") p.gamma = value;
        const double tau_eff =
            axis.name == "tau" ? value : (p.gamma > 0.0 ? 2.0 / p.gamma : kNan);

        const double exact = survival_probability(p, T);
        const double zeno = p.gamma > 0.0 ? zeno_asymptote(p, T) : kNan;
        double proj_perm = kNan;
        double proj_rapid = kNan;
        if (std::isfinite(tau_eff)) {
            const auto n_eff = static_cast<std::uint64_t>(
                std::max<long long>(1, std::llround(T / tau_eff)));
            proj_perm = projective::permanent_survival(
                projective::MeasurementSchedule{tau_eff, n_eff}, p.omega);
            proj_rapid =
                projective::rapid_repetition_limit(p.omega, tau_eff, T);
        }
        const double mch_prob =
            mch::readout_probability(mch::level1_readout_model(p), p.omega, T,
                                     ode::StepControl::auto_for(p));
        tab.rows.push_back({value, exact, zeno, proj_perm, proj_rapid, mch_prob});
    }
    write_csv(c.output_path, tab);

    for (std::size_t q = 1; q < tab.header.size(); ++q) {
        std::string dat = "# " + axis.name + " " + tab.header[q] + "\n";
        for (const auto& row : tab.rows)
            dat += fmt_g(row[0]) + " " + fmt_g(row[q]) + "\n";
        write_text_file(sibling_path(c.output_path, "_" + tab.header[q] + ".dat"),
                        dat);
    }

    ojson results;
    results["axis"] = axis_json(axis);
    for (std::size_t q = 0; q < tab.header.size(); ++q) {
        std::vector<double> v;
        v.reserve(tab.rows.size());
        for (const auto& row : tab.rows) v.push_back(row[q]);
        results[q == 0 ? "values" : tab.header[q]] = v;
    }
    write_summary(c, results);

    if (c.svg)
        write_svg_chart(sibling_path(c.output_path, ".svg"),
                        "Survival vs " + axis.name, axis.name, axis.log, tab, 0,
                        {1, 2, 3, 4, 5});
}

}  // namespace

// ---------------------------------------------------------------- names

const char* to_string(Scenario scenario)
{
    switch (scenario) {
    case Scenario::Evolve: return "evolve";
    case Scenario::Trajectories: return "trajectories";
    case Scenario::DampedRabi: return "damped-rabi";
    case Scenario::Projective: return "projective";
    case Scenario::Mch: return "mch";
    case Scenario::Compare: return "compare";
    case Scenario::Sweep: return "sweep";
    }
    return "?";
}

std::optional<Scenario> scenario_from_string(std::string_view name)
{
    for (Scenario s : {Scenario::Evolve, Scenario::Trajectories,
                       Scenario::DampedRabi, Scenario::Projective, Scenario::Mch,
                       Scenario::Compare, Scenario::Sweep}) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- CSV

std::string sibling_path(const std::string& output_path,
                         const std::string& suffix)
{
    const std::filesystem::path p(output_path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void write_csv(const std::string& path, const CsvTable& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i > 0) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += fmt_g(row[i]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    CsvTable tab;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tab.header = split(line, ',');
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = split(line, ',');
        if (parts.size() != tab.header.size())
            throw std::runtime_error("'" + path + "' line " +
                                     std::to_string(lineno) +
                                     ": wrong field count");
        std::vector<double> row;
        row.reserve(parts.size());
        for (const auto& part : parts) {
            const char* begin = part.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin || *end != '\0')
                throw std::runtime_error("'" + path + "' line " +
                                         std::to_string(lineno) +
                                         ": bad number '" + part + "'");
            row.push_back(v);
        }
        tab.rows.push_back(std::move(row));
    }
    return tab;
}

// ---------------------------------------------------------------- validate

void validate(const ScenarioConfig& c)
{
    const auto& p = c.params;
    if (!std::isfinite(p.omega) || p.omega < 0.0)
        throw ConfigError("omega", "must be finite and non-negative");
    if (!std::isfinite(p.gamma) || p.gamma < 0.0)
        throw ConfigError("gamma", "must be finite and non-negative");
    if (!std::isfinite(p.delta_omega) || !(p.delta_omega > 0.0))
        throw ConfigError("delta-omega", "must be finite and positive");
    if (c.output_path.empty())
        throw ConfigError("out", "an output path is required");
    if (c.sample_points < 2)
        throw ConfigError("samples", "need at least 2 sample points");
    if (c.n_bins < 1) throw ConfigError("bins", "need at least 1 bin");

    if (c.scenario != Scenario::Projective &&
        (!std::isfinite(c.time) || !(c.time > 0.0)))
        throw ConfigError("time", "must be finite and positive");

    switch (c.scenario) {
    case Scenario::Projective:
        if (!c.tau) throw ConfigError("tau", "required for 'projective'");
        if (!std::isfinite(*c.tau) || !(*c.tau > 0.0))
            throw ConfigError("tau", "must be finite and positive");
        if (!c.n_measurements)
            throw ConfigError("n-measurements", "required for 'projective'");
        if (*c.n_measurements < 1)
            throw ConfigError("n-measurements", "must be at least 1");
        if (c.n_traj < 1) throw ConfigError("n-traj", "must be at least 1");
        break;
    case Scenario::Trajectories:
    case Scenario::DampedRabi:
        if (c.n_traj < 1) throw ConfigError("n-traj", "must be at least 1");
        break;
    case Scenario::Compare:
        if (!(p.gamma > 0.0))
            throw ConfigError("gamma",
                              "'compare' requires gamma > 0 (tau = 2/gamma)");
        break;
    case Scenario::Sweep: {
        if (!c.axis) throw ConfigError("axis", "required for 'sweep'");
        const AxisSpec& a = *c.axis;
        if (a.name != "omega" && a.name != "gamma" && a.name != "tau")
            throw ConfigError("axis", "name must be omega, gamma or tau");
        if (!std::isfinite(a.min) || !std::isfinite(a.max))
            throw ConfigError("axis", "bounds must be finite");
        if (!(a.min < a.max)) throw ConfigError("axis", "min must be below max");
        if (a.count < 2) throw ConfigError("axis", "need at least 2 points");
        if (a.log && !(a.min > 0.0))
            throw ConfigError("axis", "log scale needs min > 0");
        if (a.name == "tau" && !(a.min > 0.0))
            throw ConfigError("axis", "tau values must be positive");
        if ((a.name == "omega" || a.name == "gamma") && a.min < 0.0)
            throw ConfigError("axis", "values must be non-negative");
        break;
    }
    default: break;
    }
}

void run_scenario(const ScenarioConfig& c)
{
    validate(c);
    switch (c.scenario) {
    case Scenario::Evolve: run_evolve(c); break;
    case Scenario::Trajectories: run_trajectories(c); break;
    case Scenario::DampedRabi: run_damped_rabi(c); break;
    case Scenario::Projective: run_projective(c); break;
    case Scenario::Mch: run_mch(c); break;
    case Scenario::Compare: run_compare(c); break;
    case Scenario::Sweep: run_sweep(c); break;
    }
}

// ---------------------------------------------------------------- CLI

namespace {

struct RawArgs {
    std::optional<double> omega, gamma, delta_omega, time, tau;
    std::optional<std::uint64_t> n_measurements, n_traj, seed;
    std::optional<std::size_t> samples, bins;
    std::optional<unsigned> workers;
    std::optional<std::string> out, axis;
    std::optional<bool> svg;
};

std::string trim(const std::string& s)
{
    auto begin = s.find_first_not_of(" \t");
    auto end = s.find_last_not_of(" \t");
    if (begin == std::string::npos) return {};
    return s.substr(begin, end - begin + 1);
}

double parse_double_str(const std::string& s, const std::string& field)
{
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end == begin || *end != '\0')
        throw ConfigError(field, "invalid number '" + s + "'");
    return v;
}

std::uint64_t parse_u64_str(const std::string& s, const std::string& field)
{
    if (s.empty() || s[0] == '-')
        throw ConfigError(field, "invalid count '" + s + "'");
    const char* begin = s.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError(field, "invalid count '" + s + "'");
    return v;
}

bool parse_bool_str(const std::string& s, const std::string& field)
{
    std::string t;
    for (char ch : s) t.push_back(static_cast<char>(std::tolower(ch)));
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(field, "expected a boolean, got '" + s + "'");
}

AxisSpec parse_axis(const std::string& s)
{
    const auto parts = split(s, ':');
    if (parts.size() != 5)
        throw ConfigError("axis", "expected name:min:max:count:lin|log");
    AxisSpec axis;
    axis.name = parts[0];
    axis.min = parse_double_str(parts[1], "axis");
    axis.max = parse_double_str(parts[2], "axis");
    axis.count = static_cast<std::size_t>(parse_u64_str(parts[3], "axis"));
    if (parts[4] == "lin")
        axis.log = false;
    else if (parts[4] == "log")
        axis.log = true;
    else
        throw ConfigError("axis", "scale must be 'lin' or 'log'");
    return axis;
}

RawArgs load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    RawArgs raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) +
                                            ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "omega") raw.omega = parse_double_str(value, key);
        else if (key == "gamma") raw.gamma = parse_double_str(value, key);
        else if (key == "delta-omega") raw.delta_omega = parse_double_str(value, key);
        else if (key == "time") raw.time = parse_double_str(value, key);
        else if (key == "tau") raw.tau = parse_double_str(value, key);
        else if (key == "n-measurements") raw.n_measurements = parse_u64_str(value, key);
        else if (key == "n-traj") raw.n_traj = parse_u64_str(value, key);
        else if (key == "seed") raw.seed = parse_u64_str(value, key);
        else if (key == "samples") raw.samples = static_cast<std::size_t>(parse_u64_str(value, key));
        else if (key == "bins") raw.bins = static_cast<std::size_t>(parse_u64_str(value, key));
        else if (key == "workers") raw.workers = static_cast<unsigned>(parse_u64_str(value, key));
        else if (key == "out") raw.out = value;
        else if (key == "axis") raw.axis = value;
        else if (key == "svg") raw.svg = parse_bool_str(value, key);
        else throw ConfigError(key, "unknown config key");
    }
    return raw;
}

void apply_raw(const RawArgs& raw, ScenarioConfig& c)
{
    if (raw.omega) c.params.omega = *raw.omega;
    if (raw.gamma) c.params.gamma = *raw.gamma;
    if (raw.delta_omega) c.params.delta_omega = *raw.delta_omega;
    if (raw.time) c.time = *raw.time;
    if (raw.tau) c.tau = *raw.tau;
    if (raw.n_measurements) c.n_measurements = *raw.n_measurements;
    if (raw.n_traj) c.n_traj = static_cast<std::size_t>(*raw.n_traj);
    if (raw.seed) c.master_seed = *raw.seed;
    if (raw.samples) c.sample_points = *raw.samples;
    if (raw.bins) c.n_bins = *raw.bins;
    if (raw.workers) c.workers = *raw.workers;
    if (raw.out) c.output_path = *raw.out;
    if (raw.axis) c.axis = parse_axis(*raw.axis);
    if (raw.svg) c.svg = *raw.svg;
}

bool is_monte_carlo(Scenario s)
{
    return s == Scenario::Trajectories || s == Scenario::DampedRabi ||
           s == Scenario::Projective;
}

/// Command-line flags that the chosen scenario would silently ignore are
/// rejected; config-file entries are a shared defaults pool and may
/// carry keys other scenarios use.
void reject_unused_flags(Scenario s, const RawArgs& cli)
{
    if (cli.time && s == Scenario::Projective)
        throw ConfigError("time",
                          "not used by 'projective' (time is n-measurements * tau)");
    if (cli.tau && s != Scenario::Projective)
        throw ConfigError("tau", "only used by 'projective'");
    if (cli.n_measurements && s != Scenario::Projective)
        throw ConfigError("n-measurements", "only used by 'projective'");
    if (cli.n_traj && !is_monte_carlo(s))
        throw ConfigError("n-traj", "not used by this scenario");
    if (cli.seed && !is_monte_carlo(s))
        throw ConfigError("seed", "not used by this scenario");
    if (cli.workers && !is_monte_carlo(s))
        throw ConfigError("workers", "not used by this scenario");
    if (cli.samples &&
        (s == Scenario::Projective || s == Scenario::Compare ||
         s == Scenario::Sweep))
        throw ConfigError("samples", "not used by this scenario");
    if (cli.bins && s != Scenario::Trajectories && s != Scenario::DampedRabi)
        throw ConfigError("bins",
                          "only used by 'trajectories' and 'damped-rabi'");
    if (cli.axis && s != Scenario::Sweep)
        throw ConfigError("axis", "only used by 'sweep'");
    if (cli.svg && s == Scenario::Compare)
        throw ConfigError("svg", "not used by 'compare'");
}

}  // namespace

ScenarioConfig parse_args(const std::vector<std::string>& args)
{
    RawArgs cli;
    std::string config_path;

    CLI::App app{"Quantum Zeno effect toolkit: exact decaying-Rabi evolution, "
                 "quantum-jump ensembles, repeated projective measurements and "
                 "continuous measurement, with a three-model comparison.",
                 "zenolab"};
    app.require_subcommand(1);

    static constexpr struct {
        const char* name;
        const char* desc;
    } kScenarios[] = {
        {"evolve", "Exact amplitude evolution time series"},
        {"trajectories", "Quantum-jump ensemble with an absorbing emission channel"},
        {"damped-rabi", "Quantum-jump ensemble where emission resets to level 1"},
        {"projective", "Repeated instantaneous measurements: return and survival laws"},
        {"mch", "Continuous measurement via a complex-Hamiltonian penalty"},
        {"compare", "Three-model survival comparison at one parameter point"},
        {"sweep", "Parameter sweep of the comparison quantities"},
    };
    // one counter per subcommand: a shared counting-flag target would be
    // zeroed again by the unparsed subcommands' forced callbacks
    std::array<int, std::size(kScenarios)> svg_counts{};
    std::size_t scenario_index = 0;
    for (const auto& [name, desc] : kScenarios) {
        int& svg_count = svg_counts[scenario_index++];
        CLI::App* sc = app.add_subcommand(name, desc);
        sc->add_option("--omega", cli.omega, "Rabi coupling (rad per time unit)");
        sc->add_option("--gamma", cli.gamma, "decay rate of the upper level");
        sc->add_option("--delta-omega", cli.delta_omega, "level splitting");
        sc->add_option("--time", cli.time, "total evolution time");
        sc->add_option("--tau", cli.tau, "interval between projective measurements");
        sc->add_option("--n-measurements", cli.n_measurements,
                       "number of projective measurements");
        sc->add_option("--n-traj", cli.n_traj,
                       "trajectories (or chains) in the ensemble");
        sc->add_option("--seed", cli.seed, "master seed for the ensemble");
        sc->add_option("--out", cli.out,
                       "output CSV path; the JSON summary lands beside it");
        sc->add_option("--samples", cli.samples, "rows in the time-series output");
        sc->add_option("--config", config_path,
                       "flat key=value config file (command line wins)");
        sc->add_option("--axis", cli.axis, "sweep axis name:min:max:count:lin|log");
        sc->add_option("--bins", cli.bins, "jump-time histogram bin count");
        sc->add_option("--workers", cli.workers, "worker threads (0 = auto)");
        sc->add_flag("--svg", svg_count, "also emit an SVG chart");
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested{subs.empty() ? app.help() : subs[0]->help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw ConfigError("args", e.what());
    }
    for (int count : svg_counts)
        if (count > 0) cli.svg = true;

    const auto parsed = app.get_subcommands();
    const auto scenario = scenario_from_string(parsed.at(0)->get_name());

    ScenarioConfig config;
    config.scenario = *scenario;
    if (!config_path.empty()) apply_raw(load_config_file(config_path), config);
    apply_raw(cli, config);
    reject_unused_flags(config.scenario, cli);
    validate(config);
    return config;
}

int run_cli(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    args.reserve(argc > 1 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        run_scenario(parse_args(args));
        return 0;
    } catch (const HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "zenolab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "zenolab: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace zeno::cli
