#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spinsense/cli.hpp"

namespace spinsense::cli {

using nlohmann::json;

namespace {

const json* find(const json& obj, const std::string& key)
{
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& key, const std::string& path, double fallback)
{
    const json* v = find(obj, key);
    if (!v || v->is_null()) return fallback;
    if (v->is_string() && (*v == "inf" || *v == "infinity")) return std::numeric_limits<double>::infinity();
    if (!v->is_number()) throw ConfigError(path + "." + key + ": expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(path + "." + key + ": must be finite");
    return x;
}

double positive(const json& obj, const std::string& key, const std::string& path, double fallback)
{
    const double x = number(obj, key, path, fallback);
    if (!(x > 0)) throw ConfigError(path + "." + key + ": must be positive");
    return x;
}

std::string text(const json& obj, const std::string& key, const std::string& path, const std::string& fallback)
{
    const json* v = find(obj, key);
    if (!v || v->is_null()) return fallback;
    if (!v->is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v->get<std::string>();
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& path, std::uint64_t fallback)
{
    const json* v = find(obj, key);
    if (!v || v->is_null()) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<long long>() >= 0) return std::uint64_t(v->get<long long>());
    if (v->is_number_float()) {
        const double x = v->get<double>();
        if (x >= 0 && x == std::floor(x) && x < 1.8e19) return std::uint64_t(x);
    }
    throw ConfigError(path + "." + key + ": expected a non-negative integer");
}

const json& section(const json& doc, const std::string& key)
{
    static const json empty = json::object();
    const json* v = find(doc, key);
    if (!v || v->is_null()) return empty;
    if (!v->is_object()) throw ConfigError(key + ": expected an object");
    return *v;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError((path.empty() ? "" : path + ".") + it.key() + ": unknown field");
    }
}

SpinDensity parse_density(const json& d)
{
    check_keys(d, "density", {"kind", "width"});
    const std::string kind = text(d, "kind", "density", "gaussian");
    const double width = positive(d, "width", "density", 1e-9);
    if (kind == "gaussian") return SpinDensity::gaussian(width);
    if (kind == "ball") return SpinDensity::ball(width);
    if (kind == "hydrogen") return SpinDensity::hydrogen(width);
    throw ConfigError("density.kind: expected gaussian, ball or hydrogen, got '" + kind + "'");
}

Sample parse_sample(const json& s)
{
    check_keys(s, "sample", {"moment_bohr", "mode", "orientation"});
    Sample out;
    out.moment_bohr = number(s, "moment_bohr", "sample", 1.0);
    const std::string mode = text(s, "mode", "sample", "NB");
    if (mode == "NB" || mode == "nb")
        out.mode = Mode::NB;
    else if (mode == "BA" || mode == "ba")
        out.mode = Mode::BA;
    else
        throw ConfigError("sample.mode: expected NB or BA, got '" + mode + "'");
    if (const json* o = find(s, "orientation"); o && !o->is_null()) {
        if (!o->is_array() || o->size() != 3) throw ConfigError("sample.orientation: expected three numbers");
        for (int i = 0; i < 3; ++i) {
            if (!(*o)[i].is_number()) throw ConfigError("sample.orientation: expected three numbers");
            out.orientation[i] = (*o)[i].get<double>();
        }
    }
    try {
        out.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("sample: ") + e.what());
    }
    return out;
}

Probe parse_probe(const json& p)
{
    check_keys(p, "probe", {"delta_e", "lambda0", "energy_keV"});
    Probe out;
    out.delta_e = positive(p, "delta_e", "probe", out.delta_e);
    out.lambda0 = positive(p, "lambda0", "probe", out.lambda0);
    out.energy_keV = positive(p, "energy_keV", "probe", out.energy_keV);
    return out;
}

Measurement parse_measurement(const json& m)
{
    check_keys(m, "measurement", {"kind", "q_max", "pixel", "z", "f"});
    Measurement out;
    const std::string kind = text(m, "kind", "measurement", "momentum");
    if (kind == "position")
        out.kind = MeasurementKind::Position;
    else if (kind == "momentum")
        out.kind = MeasurementKind::Momentum;
    else if (kind == "oam")
        out.kind = MeasurementKind::Oam;
    else if (kind == "defocus")
        out.kind = MeasurementKind::Defocus;
    else
        throw ConfigError("measurement.kind: expected position, momentum, oam or defocus, got '" + kind + "'");
    out.q_max = number(m, "q_max", "measurement", out.q_max);
    if (!(out.q_max > 0)) throw ConfigError("measurement.q_max: must be positive");
    out.pixel = number(m, "pixel", "measurement", 0.0);
    if (out.pixel < 0) throw ConfigError("measurement.pixel: must be non-negative");
    if (out.pixel > 0 && !std::isfinite(out.q_max))
        throw ConfigError("measurement.pixel: a pixelated detector needs a finite q_max");
    out.f = positive(m, "f", "measurement", out.f);
    out.z = number(m, "z", "measurement", 0.0);
    if (out.z < 0 || out.z > out.f) throw ConfigError("measurement.z: must lie in [0, f]");
    return out;
}

SweepSpec parse_sweep(const json& s)
{
    check_keys(s, "sweep", {"variable", "lo", "hi", "points", "log_scale"});
    SweepSpec out;
    out.variable = text(s, "variable", "sweep", "");
    if (out.variable != "chi" && out.variable != "z" && out.variable != "p_max" && out.variable != "pixel" &&
        out.variable != "delta_e")
        throw ConfigError("sweep.variable: expected one of chi, z, p_max, pixel, delta_e");
    out.lo = number(s, "lo", "sweep", 0.0);
    out.hi = number(s, "hi", "sweep", 0.0);
    const std::uint64_t pts = count(s, "points", "sweep", 2);
    if (pts < 2 || pts > 100000) throw ConfigError("sweep.points: must lie in [2, 100000]");
    out.points = int(pts);
    if (!(out.lo < out.hi)) throw ConfigError("sweep: lo must be smaller than hi");
    if (const json* l = find(s, "log_scale"); l && !l->is_null()) {
        if (!l->is_boolean()) throw ConfigError("sweep.log_scale: expected true or false");
        out.log_scale = l->get<bool>();
    }
    if (out.log_scale && !(out.lo > 0)) throw ConfigError("sweep.lo: must be positive on a log scale");
    if (out.variable != "z" && !(out.lo > 0)) throw ConfigError("sweep.lo: must be positive for " + out.variable);
    return out;
}

}  // namespace

std::vector<double> SweepSpec::grid() const
{
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        const double t = double(i) / (points - 1);
        g[i] = log_scale ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("--set: '" + parts[i] + "' is not an object in '" + key + "'");
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) throw ConfigError("--set: cannot assign into '" + key + "'");
    (*node)[parts.back()] = value;
}

RunConfig parse_config(const json& doc)
{
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object at top level");
    check_keys(doc, "", {"scenario", "sample", "probe", "density", "measurement", "sweep", "snr", "cl", "mc", "output"});
    RunConfig c;
    c.source = doc;
    const std::string scenario = text(doc, "scenario", "config", "estimate");
    if (scenario == "estimate")
        c.scenario = Scenario::Estimate;
    else if (scenario == "discriminate")
        c.scenario = Scenario::Discriminate;
    else
        throw ConfigError("scenario: expected estimate or discriminate, got '" + scenario + "'");
    c.point.sample = parse_sample(section(doc, "sample"));
    c.point.probe = parse_probe(section(doc, "probe"));
    c.point.density = parse_density(section(doc, "density"));
    c.point.measurement = parse_measurement(section(doc, "measurement"));
    if (find(doc, "sweep") && !doc["sweep"].is_null()) c.sweep = parse_sweep(section(doc, "sweep"));
    c.snr = positive(doc, "snr", "config", 3.0);
    c.cl = number(doc, "cl", "config", 0.87);
    if (!(c.cl > 0.5 && c.cl < 1.0)) throw ConfigError("cl: must lie in (0.5, 1)");

    const json& mc = section(doc, "mc");
    check_keys(mc, "mc", {"enabled", "samples", "seed", "batches"});
    if (const json* e = find(mc, "enabled"); e && !e->is_null()) {
        if (!e->is_boolean()) throw ConfigError("mc.enabled: expected true or false");
        c.mc.enabled = e->get<bool>();
    }
    c.mc.spec.samples = count(mc, "samples", "mc", c.mc.spec.samples);
    c.mc.spec.seed = count(mc, "seed", "mc", c.mc.spec.seed);
    c.mc.spec.batch_count = count(mc, "batches", "mc", c.mc.spec.batch_count);
    if (c.mc.spec.batch_count < 2) throw ConfigError("mc.batches: need at least 2 batches");
    if (c.mc.enabled && c.mc.spec.samples < 10000) throw ConfigError("mc.samples: need at least 10000 samples");
    if (c.mc.enabled && c.point.density.kind != DensityKind::UniformBall)
        throw ConfigError("mc.enabled: Monte Carlo is available for the ball density only");

    const json& out = section(doc, "output");
    check_keys(out, "output", {"dir", "name"});
    c.out_dir = text(out, "dir", "output", ".");
    c.out_name = text(out, "name", "output", "sweep");
    if (c.out_name.empty() || c.out_name.find('/') != std::string::npos)
        throw ConfigError("output.name: must be a plain file stem");

    if (c.scenario == Scenario::Discriminate) {
        const Measurement& m = c.point.measurement;
        if (m.kind == MeasurementKind::Momentum && (m.pixel > 0 || std::isfinite(m.q_max)))
            throw ConfigError("measurement: trace distances need an unrestricted momentum detector");
        if (c.sweep && (c.sweep->variable == "p_max" || c.sweep->variable == "pixel"))
            throw ConfigError("sweep.variable: detector sweeps apply to the estimate scenario only");
    }
    if (c.sweep && c.sweep->variable == "z" && c.point.measurement.kind != MeasurementKind::Defocus)
        throw ConfigError("sweep.variable: z sweeps need measurement.kind = defocus");
    if (c.sweep && c.sweep->variable == "z" && c.sweep->hi > c.point.measurement.f)
        throw ConfigError("sweep.hi: z must not exceed measurement.f");
    if (c.sweep && (c.sweep->variable == "p_max" || c.sweep->variable == "pixel") &&
        c.point.measurement.kind != MeasurementKind::Momentum)
        throw ConfigError("sweep.variable: detector sweeps need measurement.kind = momentum");
    if (c.sweep && c.sweep->variable == "pixel" && !std::isfinite(c.point.measurement.q_max))
        throw ConfigError("sweep.variable: pixel sweeps need a finite measurement.q_max");
    if (c.point.measurement.kind == MeasurementKind::Defocus) {
        if (c.point.density.kind != DensityKind::Gaussian)
            throw ConfigError("measurement: defocus detection is available for gaussian densities only");
        if (c.point.sample.mode == Mode::BA)
            throw ConfigError("measurement: defocus detection is available for the NB regime only");
    }
    return c;
}

}  // namespace spinsense::cli
