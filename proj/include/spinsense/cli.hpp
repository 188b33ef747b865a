#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsense/estimate.hpp"
#include "spinsense/model.hpp"
#include "spinsense/montecarlo.hpp"

namespace spinsense::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scenario { Estimate, Discriminate };

struct SweepSpec {
    std::string variable;  // chi, z, p_max, pixel, delta_e
    double lo = 0.0;
    double hi = 0.0;
    int points = 2;
    bool log_scale = false;

    std::vector<double> grid() const;
};

struct MonteCarloOptions {
    bool enabled = false;  // uniform-ball calG from Monte Carlo
    McSpec spec;
};

struct RunConfig {
    Scenario scenario = Scenario::Estimate;
    EstimationConfig point;
    std::optional<SweepSpec> sweep;
    double snr = 3.0;
    double cl = 0.87;
    MonteCarloOptions mc;
    std::string out_dir = ".";
    std::string out_name = "sweep";
    nlohmann::json source;  // the merged input, echoed in metadata
};

// --- config ---------------------------------------------------------------

nlohmann::json load_json_file(const std::string& path);

// key.sub=value; value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

RunConfig parse_config(const nlohmann::json& doc);

// --- tables ---------------------------------------------------------------

struct Column {
    std::string name;
    std::string unit;
};

struct Table {
    std::vector<std::string> comments;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
};

// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

std::string render_csv(const Table& table);

struct Output {
    std::string name;  // file stem
    Table table;
    nlohmann::json metadata;
};

// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_output(const std::string& dir, const Output& out);

// --- runs -----------------------------------------------------------------

struct RunOptions {
    int workers = 0;
    std::optional<std::uint64_t> seed;
};

Output run_sweep(const RunConfig& config, const RunOptions& options = {});

// Single-point report as JSON.
nlohmann::json run_report(const RunConfig& config);

const std::vector<std::string>& figure_names();

std::vector<Output> run_figure(const std::string& name, const RunOptions& options = {});

}  // namespace spinsense::cli
