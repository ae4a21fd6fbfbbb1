#ifndef ZENOLAB_SCENARIO_HPP
#define ZENOLAB_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zenolab/core.hpp"

namespace zeno::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Scenario {
    Evolve,
    Trajectories,
    DampedRabi,
    Projective,
    Mch,
    Compare,
    Sweep,
};

const char* to_string(Scenario scenario);
std::optional<Scenario> scenario_from_string(std::string_view name);

/// Sweep axis: which parameter to scan and how.
struct AxisSpec {
    std::string name;  // omega | gamma | tau
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    bool log = false;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::Evolve;
    SystemParams params{};
    double time = 0.0;
    std::optional<double> tau;
    std::optional<std::uint64_t> n_measurements;
    std::size_t n_traj = 10000;
    std::uint64_t master_seed = 0;
    std::string output_path;
    std::size_t sample_points = 500;
    std::optional<AxisSpec> axis;
    std::size_t n_bins = 50;
    unsigned workers = 0;
    bool svg = false;
};

/// Configuration rejection carrying the offending field's name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field))
    {
    }

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Checks ranges and per-scenario required fields; throws ConfigError.
/// Runs before any output file is opened.
void validate(const ScenarioConfig& config);

/// Executes a validated configuration and writes its output files
/// (CSV at output_path, JSON summary and friends beside it).
void run_scenario(const ScenarioConfig& config);

/// Parses command-line arguments (without the program name): subcommand
/// plus flags, with an optional flat key=value config file whose values
/// the command line overrides.  Throws ConfigError on invalid input and
/// HelpRequested when help is asked for.
ScenarioConfig parse_args(const std::vector<std::string>& args);

struct HelpRequested {
    std::string text;
};

/// Full process entry point; returns the exit code (0 success, 2 config
/// rejection, 1 runtime failure).
int run_cli(int argc, const char* const* argv);

/// Plain comma-separated table with one header row, written with 12
/// significant digits.  The reader accepts anything the writer emits,
/// including nan cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

/// Path helper: output sibling with the same stem, e.g. suffix ".json"
/// or "_hist.csv".
std::string sibling_path(const std::string& output_path,
                         const std::string& suffix);

}  // namespace zeno::cli

#endif
