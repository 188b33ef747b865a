#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "spinsense/cli.hpp"

namespace fs = std::filesystem;
using namespace spinsense;
using namespace spinsense::cli;
using nlohmann::json;

namespace {

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("spinsense_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string(SPINSENSE_TOOL) + " " + args + " >" + (scratch() / "stdout.txt").string() +
                            " 2>" + (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv parse_csv(const std::string& text)
{
    Csv c;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("# ", 0) == 0) {
            c.comments.push_back(line);
        } else if (c.header.empty()) {
            c.header = split(line);
        } else {
            std::vector<double> row;
            for (const auto& cell : split(line)) {
                double v = 0;
                std::from_chars(cell.data(), cell.data() + cell.size(), v);
                row.push_back(v);
            }
            c.rows.push_back(row);
        }
    }
    return c;
}

std::vector<std::string> golden_names()
{
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(SPINSENSE_GOLDEN_DIR))
        if (e.path().extension() == ".csv") names.push_back(e.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

std::string column_name(const std::string& header_cell) { return header_cell.substr(0, header_cell.find(" [")); }

// Deterministic columns must match exactly; Monte Carlo columns within 3 standard errors.
void compare_to_golden(const std::string& name, const std::string& got_text, bool same_seed = true)
{
    const Csv want = parse_csv(slurp(fs::path(SPINSENSE_GOLDEN_DIR) / (name + ".csv")));
    const Csv got = parse_csv(got_text);
    CAPTURE(name);
    REQUIRE(got.header == want.header);
    REQUIRE(got.rows.size() == want.rows.size());
    if (same_seed) CHECK(got.comments == want.comments);
    std::map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < want.header.size(); ++j) index[column_name(want.header[j])] = j;
    for (std::size_t j = 0; j < want.header.size(); ++j) {
        const std::string col = column_name(want.header[j]);
        const bool mc = col.find("_mc") != std::string::npos;
        for (std::size_t i = 0; i < want.rows.size(); ++i) {
            const double a = got.rows[i][j], b = want.rows[i][j];
            CAPTURE(col);
            CAPTURE(i);
            if (!mc) {
                CHECK(a == b);
                continue;
            }
            // locate the standard error of the Monte Carlo value this column derives from
            const std::string base = col.substr(0, col.find("_mc") + 3);
            const std::string value_col = col.find("n_qfi_") == 0 ? "calG_" + base.substr(6) : base;
            const std::size_t se_j = index.at(value_col + "_std_error"), v_j = index.at(value_col);
            const double se = std::max(got.rows[i][se_j], want.rows[i][se_j]);
            const double value = want.rows[i][v_j];
            if (col == value_col)
                CHECK(std::abs(a - b) <= 3.0 * se);
            else if (col == value_col + "_std_error")
                CHECK(std::max(a, b) <= 3.0 * std::min(a, b));  // batch estimates of heavy-tailed samples
            else
                CHECK(std::abs(a - b) <= 3.0 * se / value * 1.01 * b + 1.0);
        }
    }
}

json base_config()
{
    return json::parse(R"({
      "scenario": "estimate",
      "density": {"kind": "gaussian", "width": 1e-9},
      "sample": {"moment_bohr": 10.0, "mode": "NB", "orientation": [1, 0, 0]},
      "probe": {"delta_e": 1e-9},
      "measurement": {"kind": "momentum"},
      "sweep": {"variable": "chi", "lo": 0.2, "hi": 5, "points": 7, "log_scale": true}
    })");
}

}  // namespace

TEST_CASE("figure commands reproduce the goldens at any worker count")
{
    std::map<std::string, std::string> first;
    for (int workers : {1, 4, 8}) {
        const fs::path dir = scratch() / ("fig_w" + std::to_string(workers));
        REQUIRE(run_tool("figure all --workers " + std::to_string(workers) + " --out " + dir.string()) == 0);
        const auto names = golden_names();
        REQUIRE(names.size() >= figure_names().size());
        for (const auto& name : names) {
            const std::string text = slurp(dir / (name + ".csv"));
            REQUIRE_FALSE(text.empty());
            if (workers == 1) {
                first[name] = text;
                compare_to_golden(name, text);
                const json meta = json::parse(slurp(dir / (name + ".json")));
                CHECK(meta.at("schema_version") == kSchemaVersion);
                CHECK(meta.at("columns").size() == parse_csv(text).header.size());
            } else {
                CAPTURE(name);
                CAPTURE(workers);
                CHECK(text == first[name]);
            }
        }
    }
}

TEST_CASE("Monte Carlo columns follow the seed")
{
    const fs::path a = scratch() / "seed_a", b = scratch() / "seed_b";
    REQUIRE(run_tool("figure fig5a --seed 5 --out " + a.string()) == 0);
    REQUIRE(run_tool("figure fig5a --seed 5 --workers 3 --out " + b.string()) == 0);
    CHECK(slurp(a / "fig5a.csv") == slurp(b / "fig5a.csv"));
    compare_to_golden("fig5a", slurp(a / "fig5a.csv"), false);
    REQUIRE(run_tool("figure fig5a --seed 6 --out " + b.string()) == 0);
    CHECK(slurp(a / "fig5a.csv") != slurp(b / "fig5a.csv"));
}

TEST_CASE("shortest round-trip number format")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mant(-10.0, 10.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 20000; ++i) {
        const double v = mant(rng) * std::pow(10.0, expo(rng));
        const std::string s = format_number(v);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-9) == "1e-09");
}

TEST_CASE("table rendering")
{
    Table t;
    t.comments = {"note"};
    t.columns = {{"chi", "1"}, {"n", "electrons"}};
    t.add_row({1.5, 2.0});
    CHECK(render_csv(t) == "# note\nchi [1],n [electrons]\n1.5,2\n");
    CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
    CHECK_THROWS_AS(t.add_row({1.0, NAN}), std::domain_error);
}

TEST_CASE("config parsing and overrides")
{
    json doc = base_config();
    apply_override(doc, "density.kind=ball");
    apply_override(doc, "probe.delta_e=2e-9");
    apply_override(doc, "output.name=custom");
    const RunConfig c = parse_config(doc);
    CHECK(c.point.density.kind == DensityKind::UniformBall);
    CHECK(c.point.probe.delta_e == 2e-9);
    CHECK(c.out_name == "custom");
    REQUIRE(c.sweep);
    const auto grid = c.sweep->grid();
    REQUIRE(grid.size() == 7);
    CHECK(grid.front() == doctest::Approx(0.2));
    CHECK(grid.back() == doctest::Approx(5.0));
    CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "density.kind.x=1"), ConfigError);

    const std::vector<std::pair<std::string, std::string>> bad = {
        {"density.colour", "1"},
        {"density.kind", "\"cube\""},
        {"sample.mode", "\"XY\""},
        {"sample.orientation", "[0.5, 0, 0]"},
        {"sweep.points", "1"},
        {"sweep.lo", "10"},
        {"sweep.variable", "\"z\""},
        {"measurement.pixel", "1e8"},
        {"measurement.q_max", "-1"},
        {"cl", "0.3"},
        {"mc.enabled", "true"},
        {"scenario", "\"guess\""},
    };
    for (const auto& [key, value] : bad) {
        json d = base_config();
        apply_override(d, key + "=" + value);
        CAPTURE(key);
        CHECK_THROWS_AS(parse_config(d), ConfigError);
    }
    json d = base_config();
    d["measurement"] = {{"kind", "defocus"}, {"z", 3e-3}, {"f", 2e-3}};
    d.erase("sweep");
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    d["measurement"]["z"] = 1e-3;
    CHECK_NOTHROW(parse_config(d));
    d["sample"]["mode"] = "BA";
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    json q = base_config();
    q["scenario"] = "discriminate";
    q["measurement"]["q_max"] = 1e9;
    CHECK_THROWS_AS(parse_config(q), ConfigError);
}

TEST_CASE("estimate sweep output")
{
    const RunConfig c = parse_config(base_config());
    const Output one = run_sweep(c, {1, std::nullopt});
    const Output four = run_sweep(c, {4, std::nullopt});
    CHECK(render_csv(one.table) == render_csv(four.table));
    const Csv csv = parse_csv(render_csv(one.table));
    REQUIRE(csv.rows.size() == 7);
    CHECK(csv.header.front() == "chi [1]");
    for (std::size_t i = 1; i < csv.rows.size(); ++i) CHECK(csv.rows[i][0] > csv.rows[i - 1][0]);
    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < csv.header.size(); ++j) col[column_name(csv.header[j])] = j;
    for (const auto& row : csv.rows) {
        CHECK(row[col.at("cfi_momentum")] <= row[col.at("qfi")] + 1e-9);
        CHECK(row[col.at("n_cfi")] >= row[col.at("n_qfi")]);
        CHECK(row[col.at("valid")] == 1.0);
    }
    CHECK(one.metadata.at("schema_version") == kSchemaVersion);
    CHECK(one.metadata.at("rows") == 7);
    CHECK(one.metadata.at("config").at("density").at("kind") == "gaussian");
}

TEST_CASE("discrimination sweep and report")
{
    json doc = base_config();
    doc["scenario"] = "discriminate";
    doc["sample"]["mode"] = "BA";
    doc["sample"]["orientation"] = {0.5, 0.0, 0.1};
    const RunConfig c = parse_config(doc);
    const Csv csv = parse_csv(render_csv(run_sweep(c).table));
    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < csv.header.size(); ++j) col[column_name(csv.header[j])] = j;
    for (const auto& row : csv.rows) {
        CHECK(row[col.at("d_momentum")] <= row[col.at("dq")] + 1e-9);
        CHECK(row[col.at("shots_required")] >= row[col.at("shots_quantum")]);
        CHECK(row[col.at("success_probability")] == doctest::Approx(0.5 * (1.0 + row[col.at("d_momentum")])));
    }
    const json rep = run_report(c);
    CHECK(rep.at("calG").get<double>() > 0.0);
    CHECK(rep.at("cfi").at("position") == 0.0);
    CHECK(rep.contains("trace_distance"));
    CHECK(rep.contains("shots"));

    json pos = doc;
    pos["measurement"]["kind"] = "position";
    CHECK_THROWS_AS(run_sweep(parse_config(pos)), InsensitiveConfiguration);
}

TEST_CASE("Monte Carlo sweep is independent of the worker count")
{
    json doc = base_config();
    doc["density"]["kind"] = "ball";
    doc["sweep"]["points"] = 3;
    doc["mc"] = {{"enabled", true}, {"samples", 20000}, {"batches", 20}, {"seed", 9}};
    const RunConfig c = parse_config(doc);
    CHECK(render_csv(run_sweep(c, {1, std::nullopt}).table) == render_csv(run_sweep(c, {8, std::nullopt}).table));
    CHECK(render_csv(run_sweep(c, {1, 10}).table) != render_csv(run_sweep(c, {1, 9}).table));
}

TEST_CASE("command-line interface")
{
    const fs::path dir = scratch() / "cli";
    fs::create_directories(dir);
    for (const char* name : {"estimate_chi", "discriminate_ba", "ball_mc", "defocus_z"}) {
        const fs::path cfg = fs::path(SPINSENSE_CONFIG_DIR) / (std::string(name) + ".json");
        CAPTURE(name);
        CHECK(run_tool("sweep --config " + cfg.string() + " --out " + dir.string()) == 0);
        CHECK(fs::exists(dir / (std::string(name) + ".csv")));
        CHECK(fs::exists(dir / (std::string(name) + ".json")));
        CHECK(run_tool("report --config " + cfg.string()) == 0);
        CHECK_NOTHROW(json::parse(slurp(scratch() / "stdout.txt")));
    }
    const std::string est = (fs::path(SPINSENSE_CONFIG_DIR) / "estimate_chi.json").string();
    CHECK(run_tool("sweep --config " + est + " --set sweep.points=3 --set output.name=small --out " + dir.string()) == 0);
    CHECK(parse_csv(slurp(dir / "small.csv")).rows.size() == 3);

    // exit status 2 for configuration problems
    CHECK(run_tool("figure nosuchfigure") == 2);
    CHECK(run_tool("sweep") == 2);
    CHECK(run_tool("sweep --config " + (dir / "missing.json").string()) == 2);
    write_file(dir / "broken.json", "{ \"scenario\": ");
    CHECK(run_tool("sweep --config " + (dir / "broken.json").string()) == 2);
    CHECK(run_tool("sweep --config " + est + " --set density.width=-1") == 2);
    CHECK(run_tool("sweep --config " + est + " --set sample.orientation=[1,1,0]") == 2);
    const std::string def = (fs::path(SPINSENSE_CONFIG_DIR) / "defocus_z.json").string();
    CHECK(run_tool("sweep --config " + def + " --set sweep.lo=0 --out " + dir.string()) == 2);
    CHECK(slurp(scratch() / "stderr.txt").find("insensitive") != std::string::npos);
    CHECK(run_tool("--version") == 0);
    CHECK(slurp(scratch() / "stdout.txt").find(kVersion) != std::string::npos);
}
