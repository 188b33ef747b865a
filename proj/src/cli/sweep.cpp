#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "spinsense/cli.hpp"
#include "spinsense/discriminate.hpp"
#include "spinsense/parallel.hpp"
#include "spinsense/quadrature.hpp"
#include "spinsense/scatter.hpp"

namespace spinsense::cli {

using nlohmann::json;

namespace {

struct PointResult {
    double chi = 0, delta_e = 0, theta = 0;
    double calG = 0, calG_err = 0, calF = 0, calV = 0;
    double qfi = 0;
    bool qfi_valid = true;
    double cfi_momentum = 0, cfi_oam = 0;
    std::optional<double> cfi_defocus;
    bool cfi_valid = true;

    double dq = 0;
    std::optional<double> d_momentum;
    double d_oam = 0;
    std::optional<DefocusDistance> d_defocus;
    bool d_valid = true;
};

bool restricted(const Measurement& m) { return m.pixel > 0 || std::isfinite(m.q_max); }

void apply_sweep_value(EstimationConfig& cfg, const std::string& var, double v)
{
    if (var == "chi")
        cfg.probe.delta_e = v * cfg.density.width;
    else if (var == "delta_e")
        cfg.probe.delta_e = v;
    else if (var == "z")
        cfg.measurement.z = v;
    else if (var == "p_max")
        cfg.measurement.q_max = v;
    else if (var == "pixel")
        cfg.measurement.pixel = v;
}

std::string sweep_unit(const std::string& var)
{
    if (var == "chi") return "1";
    if (var == "delta_e" || var == "z") return "m";
    return "1/m";
}

void evaluate_estimate(const EstimationConfig& cfg, const MonteCarloOptions& mc, std::uint64_t seed, PointResult& r)
{
    const Sample& s = cfg.sample;
    const double perp = s.perp();
    r.calF = calF(cfg.density, cfg.probe);
    if (mc.enabled) {
        McSpec spec = mc.spec;
        spec.seed = seed;
        const McResult m = calG_ball_mc(cfg.density.width, cfg.probe, spec, 1);
        r.calG = m.value;
        r.calG_err = m.std_error;
    } else {
        r.calG = calG(cfg.density, cfg.probe);
    }
    r.calV = calV(r.calG, r.calF);
    r.qfi = s.mode == Mode::NB ? qfi_nb(perp, r.calG) : qfi_ba(r.calG);
    r.qfi_valid = s.mode == Mode::NB || r.theta < 0.1;

    const Measurement& m = cfg.measurement;
    if (m.kind == MeasurementKind::Momentum && restricted(m)) {
        EstimationConfig c = cfg;
        r.cfi_momentum = cfi(c).value;
    } else {
        r.cfi_momentum = perp * perp * r.calG;
    }
    r.cfi_oam = cfi_oam(s.mode, r.theta, perp, cfg.density, cfg.probe);
    if (m.kind == MeasurementKind::Defocus) r.cfi_defocus = cfi_defocus(m.z, m.f, perp, cfg.probe, cfg.density);
    if (m.kind == MeasurementKind::Momentum) r.cfi_valid = s.mode == Mode::NB || r.theta < 0.1;
    if (m.kind == MeasurementKind::Defocus) r.cfi_valid = r.theta <= 1e-2;
}

void evaluate_discriminate(const EstimationConfig& cfg, PointResult& r)
{
    const Sample& s = cfg.sample;
    const double perp = s.perp();
    const Measurement& m = cfg.measurement;
    r.d_oam = d_oam(s.mode, r.theta, perp, cfg.density, cfg.probe);
    if (s.mode == Mode::NB) {
        r.dq = dq_nb(r.theta, perp, cfg.density, cfg.probe).exact;
        if (!restricted(m)) r.d_momentum = d_momentum_nb(r.theta, perp, cfg.density, cfg.probe);
        if (m.kind == MeasurementKind::Momentum) r.d_valid = r.theta * perp <= 1e-2;
        if (m.kind == MeasurementKind::Defocus) {
            r.d_defocus = d_defocus(m.z, m.f, r.theta, perp, cfg.probe, cfg.density);
            r.d_valid = r.d_defocus->valid;
        }
    } else {
        r.dq = dq_ba(r.theta, s.orientation, cfg.density, cfg.probe).eigen;
        if (!restricted(m)) r.d_momentum = d_momentum_ba(r.theta, s.orientation, cfg.density, cfg.probe);
        if (m.kind == MeasurementKind::Momentum) r.d_valid = r.theta <= 1e-2;
    }
}

PointResult evaluate(const EstimationConfig& cfg, Scenario scenario, const MonteCarloOptions& mc, std::uint64_t seed,
                     bool both)
{
    PointResult r;
    r.chi = cfg.chi();
    r.delta_e = cfg.probe.delta_e;
    r.theta = cfg.theta();
    if (both || scenario == Scenario::Estimate) evaluate_estimate(cfg, mc, seed, r);
    if (both || scenario == Scenario::Discriminate) {
        if (!both) {
            r.calG = calG(cfg.density, cfg.probe);
            r.calF = calF(cfg.density, cfg.probe);
            r.calV = calV(r.calG, r.calF);
        }
        evaluate_discriminate(cfg, r);
    }
    return r;
}

double selected_cfi(const PointResult& r, const Measurement& m)
{
    switch (m.kind) {
    case MeasurementKind::Position: return 0.0;
    case MeasurementKind::Momentum: return r.cfi_momentum;
    case MeasurementKind::Oam: return r.cfi_oam;
    case MeasurementKind::Defocus: return r.cfi_defocus.value_or(0.0);
    }
    return 0.0;
}

double selected_distance(const PointResult& r, const Measurement& m)
{
    switch (m.kind) {
    case MeasurementKind::Position: return 0.0;
    case MeasurementKind::Momentum: return r.d_momentum.value_or(0.0);
    case MeasurementKind::Oam: return r.d_oam;
    case MeasurementKind::Defocus: return r.d_defocus ? r.d_defocus->value : 0.0;
    }
    return 0.0;
}

double shots(double cl, double d)
{
    if (!(d > 0)) throw InsensitiveConfiguration("insensitive configuration: trace distance is zero");
    return shots_for_confidence(cl, std::min(1.0, d));
}

json maybe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Output run_sweep(const RunConfig& config, const RunOptions& options)
{
    if (!config.sweep) throw ConfigError("sweep: missing sweep section");
    const auto t0 = std::chrono::steady_clock::now();
    const SweepSpec& sw = *config.sweep;
    const std::vector<double> grid = sw.grid();
    const std::uint64_t master = options.seed.value_or(config.mc.spec.seed);
    const Measurement& m = config.point.measurement;
    const bool estimate = config.scenario == Scenario::Estimate;

    Table t;
    t.comments.push_back(std::string("spinsense ") + kVersion + " sweep");
    t.comments.push_back(std::string("scenario ") + (estimate ? "estimate" : "discriminate") + ", measurement " +
                         m.name() + ", density " + config.point.density.name() + ", regime " +
                         (config.point.sample.mode == Mode::NB ? "NB" : "BA"));
    if (config.mc.enabled) t.comments.push_back("calG from Monte Carlo, seed " + std::to_string(master));
    t.columns = {{sw.variable, sweep_unit(sw.variable)}, {"chi", "1"}, {"delta_e", "m"}, {"theta", "1"},
                 {"calG", "1"}};
    if (config.mc.enabled) t.columns.push_back({"calG_std_error", "1"});
    t.columns.push_back({"calF", "1"});
    t.columns.push_back({"calV", "1"});
    const bool defocus = m.kind == MeasurementKind::Defocus;
    if (estimate) {
        for (const char* n : {"qfi", "cfi_position", "cfi_momentum", "cfi_oam"}) t.columns.push_back({n, "1"});
        if (defocus) t.columns.push_back({"cfi_defocus", "1"});
        t.columns.push_back({"n_qfi", "electrons"});
        t.columns.push_back({"n_cfi", "electrons"});
    } else {
        for (const char* n : {"dq", "d_position", "d_momentum", "d_oam"}) t.columns.push_back({n, "1"});
        if (defocus) {
            t.columns.push_back({"d_defocus", "1"});
            t.columns.push_back({"d_defocus_tail_bound", "1"});
        }
        t.columns.push_back({"success_probability", "1"});
        t.columns.push_back({"shots_quantum", "shots"});
        t.columns.push_back({"shots_required", "shots"});
    }
    t.columns.push_back({"valid", "bool"});

    auto row = [&](std::size_t i) {
        EstimationConfig cfg = config.point;
        apply_sweep_value(cfg, sw.variable, grid[i]);
        const PointResult r = evaluate(cfg, config.scenario, config.mc, derive_seed(master, i), false);
        std::vector<double> v{grid[i], r.chi, r.delta_e, r.theta, r.calG};
        if (config.mc.enabled) v.push_back(r.calG_err);
        v.push_back(r.calF);
        v.push_back(r.calV);
        bool valid;
        if (estimate) {
            v.insert(v.end(), {r.qfi, 0.0, r.cfi_momentum, r.cfi_oam});
            if (defocus) v.push_back(*r.cfi_defocus);
            v.push_back(electrons_for_snr(config.snr, r.theta, r.qfi));
            v.push_back(electrons_for_snr(config.snr, r.theta, selected_cfi(r, cfg.measurement)));
            valid = r.qfi_valid && r.cfi_valid;
        } else {
            if (!r.d_momentum) throw ConfigError("measurement: trace distances need an unrestricted momentum detector");
            v.insert(v.end(), {r.dq, 0.0, *r.d_momentum, r.d_oam});
            if (defocus) {
                v.push_back(r.d_defocus->value);
                v.push_back(r.d_defocus->tail_bound);
            }
            const double d = selected_distance(r, cfg.measurement);
            v.push_back(success_probability(std::min(1.0, d)));
            v.push_back(shots(config.cl, r.dq));
            v.push_back(shots(config.cl, d));
            valid = r.d_valid;
        }
        v.push_back(valid ? 1.0 : 0.0);
        return v;
    };
    const auto rows = parallel_map<std::vector<double>>(grid.size(), row, options.workers);
    for (const auto& r : rows) t.add_row(r);

    Output out;
    out.name = config.out_name;
    out.table = std::move(t);
    json cols = json::array();
    for (const auto& c : out.table.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.metadata = {{"schema_version", kSchemaVersion},
                    {"library_version", kVersion},
                    {"command", "sweep"},
                    {"config", config.source},
                    {"seed", master},
                    {"columns", cols},
                    {"rows", out.table.rows.size()},
                    {"timings", {{"wall_seconds", secs}}}};
    return out;
}

json run_report(const RunConfig& config)
{
    const EstimationConfig& cfg = config.point;
    const std::uint64_t seed = config.mc.spec.seed;
    const PointResult r = evaluate(cfg, config.scenario, config.mc, seed, true);
    const Measurement& m = cfg.measurement;

    json cfi_j = {{"position", 0.0}, {"momentum", r.cfi_momentum}, {"oam", r.cfi_oam}};
    if (r.cfi_defocus) cfi_j["defocus"] = *r.cfi_defocus;
    auto n_for = [&](double info) { return info > 0 ? maybe(electrons_for_snr(config.snr, r.theta, info)) : json(nullptr); };
    json electrons = {{"qfi", n_for(r.qfi)}, {"position", nullptr}, {"momentum", n_for(r.cfi_momentum)},
                      {"oam", n_for(r.cfi_oam)}};
    if (r.cfi_defocus) electrons["defocus"] = n_for(*r.cfi_defocus);

    json dist = {{"quantum", r.dq}, {"position", 0.0}, {"oam", r.d_oam}};
    dist["momentum"] = r.d_momentum ? json(*r.d_momentum) : json(nullptr);
    if (r.d_defocus) {
        dist["defocus"] = r.d_defocus->value;
        dist["defocus_tail_bound"] = r.d_defocus->tail_bound;
    }
    auto shots_for = [&](double d) { return d > 0 ? json(shots_for_confidence(config.cl, std::min(1.0, d))) : json(nullptr); };
    json shots_j = {{"quantum", shots_for(r.dq)}, {"position", nullptr}, {"oam", shots_for(r.d_oam)}};
    shots_j["momentum"] = r.d_momentum ? shots_for(*r.d_momentum) : json(nullptr);
    if (r.d_defocus) shots_j["defocus"] = shots_for(r.d_defocus->value);

    json out = {{"schema_version", kSchemaVersion},
                {"library_version", kVersion},
                {"scenario", config.scenario == Scenario::Estimate ? "estimate" : "discriminate"},
                {"measurement", m.name()},
                {"regime", cfg.sample.mode == Mode::NB ? "NB" : "BA"},
                {"density", cfg.density.name()},
                {"theta", r.theta},
                {"chi", r.chi},
                {"delta_e", r.delta_e},
                {"calG", r.calG},
                {"calF", r.calF},
                {"calV", r.calV},
                {"qfi", r.qfi},
                {"qfi_valid", r.qfi_valid},
                {"cfi", cfi_j},
                {"cfi_valid", r.cfi_valid},
                {"snr", config.snr},
                {"electrons", electrons},
                {"trace_distance", dist},
                {"trace_distance_valid", r.d_valid},
                {"confidence", config.cl},
                {"shots", shots_j},
                {"success_probability", success_probability(std::min(1.0, selected_distance(r, m)))},
                {"config", config.source}};
    if (config.mc.enabled) out["calG_std_error"] = r.calG_err;
    return out;
}

}  // namespace spinsense::cli
