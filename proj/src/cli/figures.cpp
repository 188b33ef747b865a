#include <chrono>
#include <cmath>
#include <functional>

#include "spinsense/cli.hpp"
#include "spinsense/discriminate.hpp"
#include "spinsense/parallel.hpp"

namespace spinsense::cli {

using nlohmann::json;

namespace {

std::vector<double> log_grid(double lo, double hi, int n)
{
    SweepSpec s;
    s.lo = lo;
    s.hi = hi;
    s.points = n;
    s.log_scale = true;
    return s.grid();
}

using RowFn = std::function<std::vector<double>(std::size_t)>;

struct Builder {
    std::string name;
    json parameters;
    std::vector<std::string> comments;
    std::vector<Column> columns;
    std::uint64_t seed = 0;
    bool stochastic = false;

    Output build(std::size_t n, const RowFn& row, int workers,
                 std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now()) const
    {
        Output out;
        out.name = name;
        out.table.comments.push_back(std::string("spinsense ") + kVersion + " figure " + name);
        for (const auto& c : comments) out.table.comments.push_back(c);
        out.table.columns = columns;
        const auto rows = parallel_map<std::vector<double>>(n, row, workers);
        for (const auto& r : rows) out.table.add_row(r);
        json cols = json::array();
        for (const auto& c : columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.metadata = {{"schema_version", kSchemaVersion},
                        {"library_version", kVersion},
                        {"command", "figure"},
                        {"figure", name},
                        {"parameters", parameters},
                        {"columns", cols},
                        {"rows", out.table.rows.size()},
                        {"timings", {{"wall_seconds", secs}}}};
        if (stochastic) out.metadata["seed"] = seed;
        return out;
    }
};

std::string sci(double v) { return format_number(v); }

constexpr double kSnr = 3.0;
constexpr double kCl = 0.87;

double shots(double d) { return shots_for_confidence(kCl, std::min(1.0, d)); }

// Gaussian spin, Delta_s = 50 pm, mu = mu_B; electrons at SNR 3 versus chi.
std::vector<Output> fig2(const RunOptions& opt)
{
    const SpinDensity dens = SpinDensity::gaussian(50e-12);
    Sample s;
    s.moment_bohr = 1.0;
    const double th = theta(s, dens);
    const auto chis = log_grid(0.1, 10.0, 41);
    Builder b;
    b.name = "fig2";
    b.parameters = {{"density", "gaussian"}, {"delta_s", 50e-12}, {"moment_bohr", 1.0}, {"theta", th}, {"snr", kSnr},
                    {"chi", {{"lo", 0.1}, {"hi", 10.0}, {"points", 41}, {"log_scale", true}}}};
    b.comments = {"gaussian spin delta_s = 50 pm, mu = mu_B, theta = " + sci(th) + ", SNR = 3",
                  "NB with n_perp = 1, BA with c_perp = 1"};
    b.columns = {{"chi", "1"},
                 {"calG", "1"},
                 {"n_qfi_nb", "electrons"},
                 {"n_qfi_ba", "electrons"},
                 {"n_cfi_momentum_nb", "electrons"},
                 {"n_cfi_momentum_ba", "electrons"},
                 {"n_cfi_oam_nb", "electrons"},
                 {"n_cfi_oam_ba", "electrons"}};
    auto row = [&](std::size_t i) {
        const Probe p = probe_at_chi(dens, chis[i]);
        const double g = calG(dens, p);
        auto n = [&](double info) { return electrons_for_snr(kSnr, th, info); };
        return std::vector<double>{chis[i],
                                   g,
                                   n(qfi_nb(1.0, g)),
                                   n(qfi_ba(g)),
                                   n(g),
                                   n(g),
                                   n(cfi_oam(Mode::NB, th, 1.0, dens, p)),
                                   n(cfi_oam(Mode::BA, th, 1.0, dens, p))};
    };
    return {b.build(chis.size(), row, opt.workers)};
}

// Defocus-plane trace distance, three probe sizes; z = 0 row then log z/f in [1e-12, 1].
std::vector<Output> fig3(const RunOptions& opt)
{
    const double ds = 1e-9, f = 2e-3;
    const SpinDensity dens = SpinDensity::gaussian(ds);
    Sample s;
    s.moment_bohr = 100.0;
    const double th = theta(s, dens);
    const double ratios[3] = {0.2, 1.0, 5.0};
    Probe probes[3];
    double d_diff[3], d_q[3];
    for (int k = 0; k < 3; ++k) {
        probes[k].delta_e = ratios[k] * ds;
        d_diff[k] = d_momentum_nb(th, 1.0, dens, probes[k]);
        d_q[k] = dq_nb(th, 1.0, dens, probes[k]).exact;
    }
    std::vector<double> zf{0.0};
    for (double v : log_grid(1e-12, 1.0, 97)) zf.push_back(v);

    Builder b;
    b.name = "fig3";
    b.parameters = {{"density", "gaussian"},     {"delta_s", ds},       {"moment_bohr", 100.0},
                    {"theta", th},               {"f", f},              {"lambda0", Probe{}.lambda0},
                    {"delta_e_over_delta_s", {0.2, 1.0, 5.0}},
                    {"z_over_f", {{"zero_row", true}, {"lo", 1e-12}, {"hi", 1.0}, {"points", 97}, {"log_scale", true}}}};
    b.comments = {"gaussian spin delta_s = 1 nm, mu = 100 mu_B, theta = " + sci(th) + ", f = 2 mm, lambda0 = 2.5 pm",
                  "panels a, b, c: delta_e = delta_s/5, delta_s, 5 delta_s; NB with n_perp = 1",
                  "z/f grid: z = 0 then 97 log-spaced points on [1e-12, 1]"};
    b.columns = {{"z_over_f", "1"}, {"z", "m"}};
    for (const char* p : {"a", "b", "c"}) {
        b.columns.push_back({std::string("d_") + p, "1"});
        b.columns.push_back({std::string("tail_bound_") + p, "1"});
        b.columns.push_back({std::string("d_diffraction_") + p, "1"});
        b.columns.push_back({std::string("dq_") + p, "1"});
    }
    auto row = [&](std::size_t i) {
        const double z = zf[i] * f;
        std::vector<double> v{zf[i], z};
        for (int k = 0; k < 3; ++k) {
            const DefocusDistance d = d_defocus(z, f, th, 1.0, probes[k], dens);
            v.insert(v.end(), {d.value, d.tail_bound, d_diff[k], d_q[k]});
        }
        return v;
    };
    return {b.build(zf.size(), row, opt.workers)};
}

// Shots at CL 87% versus chi; a: spin along the axis, b: transverse.
std::vector<Output> fig4(const RunOptions& opt)
{
    const SpinDensity dens = SpinDensity::gaussian(1e-9);
    Sample s;
    s.moment_bohr = 100.0;
    const double th = theta(s, dens);
    const auto chis = log_grid(0.1, 10.0, 41);
    const json params = {{"density", "gaussian"}, {"delta_s", 1e-9}, {"moment_bohr", 100.0}, {"theta", th},
                         {"cl", kCl}, {"chi", {{"lo", 0.1}, {"hi", 10.0}, {"points", 41}, {"log_scale", true}}}};

    Builder a;
    a.name = "fig4a";
    a.parameters = params;
    a.parameters["orientation"] = {0.0, 0.0, 1.0};
    a.comments = {"gaussian spin delta_s = 1 nm, mu = 100 mu_B, theta = " + sci(th) + ", CL = 87%",
                  "spin along the beam axis, c = (0, 0, 1); NB and momentum distances vanish here"};
    a.columns = {{"chi", "1"}, {"dq_ba", "1"}, {"d_oam_ba", "1"}, {"shots_quantum_ba", "shots"}, {"shots_oam_ba", "shots"}};
    const Vec3 axial{0.0, 0.0, 1.0};
    auto row_a = [&](std::size_t i) {
        const Probe p = probe_at_chi(dens, chis[i]);
        const double dq = dq_ba(th, axial, dens, p).eigen;
        const double dl = d_oam(Mode::BA, th, 0.0, dens, p);
        return std::vector<double>{chis[i], dq, dl, shots(dq), shots(dl)};
    };

    Builder t;
    t.name = "fig4b";
    t.parameters = params;
    t.parameters["orientation"] = {1.0, 0.0, 0.0};
    t.comments = {"gaussian spin delta_s = 1 nm, mu = 100 mu_B, theta = " + sci(th) + ", CL = 87%",
                  "transverse spin, n = c = (1, 0, 0)"};
    t.columns = {{"chi", "1"},
                 {"shots_quantum_nb", "shots"},
                 {"shots_quantum_ba", "shots"},
                 {"shots_momentum_nb", "shots"},
                 {"shots_momentum_ba", "shots"},
                 {"shots_oam_nb", "shots"},
                 {"shots_oam_ba", "shots"}};
    const Vec3 trans{1.0, 0.0, 0.0};
    auto row_t = [&](std::size_t i) {
        const Probe p = probe_at_chi(dens, chis[i]);
        return std::vector<double>{chis[i],
                                   shots(dq_nb(th, 1.0, dens, p).exact),
                                   shots(dq_ba(th, trans, dens, p).eigen),
                                   shots(d_momentum_nb(th, 1.0, dens, p)),
                                   shots(d_momentum_ba(th, trans, dens, p)),
                                   shots(d_oam(Mode::NB, th, 1.0, dens, p)),
                                   shots(d_oam(Mode::BA, th, 1.0, dens, p))};
    };
    return {a.build(chis.size(), row_a, opt.workers), t.build(chis.size(), row_t, opt.workers)};
}

// Uniform ball R = 1 nm, mu = 100 mu_B, NB: quadrature route, Monte Carlo route and the Gaussian model.
std::vector<Output> fig5a(const RunOptions& opt)
{
    const double radius = 1e-9;
    const SpinDensity ball = SpinDensity::ball(radius);
    const SpinDensity gauss = SpinDensity::gaussian(radius);
    Sample s;
    s.moment_bohr = 100.0;
    const double th = theta(s, ball);
    const double th_g = theta(s, gauss);
    const auto des = log_grid(1e-10, 1e-8, 31);
    McSpec mc;
    mc.samples = 200000;
    mc.batch_count = 100;
    mc.seed = opt.seed.value_or(1);

    Builder b;
    b.name = "fig5a";
    b.stochastic = true;
    b.seed = mc.seed;
    b.parameters = {{"density", "ball"}, {"radius", radius}, {"moment_bohr", 100.0}, {"theta", th}, {"snr", kSnr},
                    {"mc_samples", mc.samples}, {"mc_batches", mc.batch_count},
                    {"delta_e", {{"lo", 1e-10}, {"hi", 1e-8}, {"points", 31}, {"log_scale", true}}}};
    b.comments = {"uniform ball R = 1 nm, mu = 100 mu_B, theta = " + sci(th) + ", SNR = 3, NB with n_perp = 1",
                  "Monte Carlo columns: " + std::to_string(mc.samples) + " samples per point, seed " +
                      std::to_string(mc.seed) + " split per row",
                  "gaussian model with delta_s = R"};
    b.columns = {{"delta_e", "m"},
                 {"chi", "1"},
                 {"calG_ball", "1"},
                 {"n_qfi_ball", "electrons"},
                 {"calG_ball_mc", "1"},
                 {"calG_ball_mc_std_error", "1"},
                 {"n_qfi_ball_mc", "electrons"},
                 {"calG_gaussian", "1"},
                 {"n_qfi_gaussian", "electrons"}};
    auto row = [&](std::size_t i) {
        Probe p;
        p.delta_e = des[i];
        McSpec spec = mc;
        spec.seed = derive_seed(mc.seed, i);
        const McResult m = calG_ball_mc(radius, p, spec, 1);
        const double g = calG(ball, p);
        const double gg = calG(gauss, p);
        return std::vector<double>{des[i],
                                   des[i] / radius,
                                   g,
                                   electrons_for_snr(kSnr, th, g),
                                   m.value,
                                   m.std_error,
                                   electrons_for_snr(kSnr, th, m.value),
                                   gg,
                                   electrons_for_snr(kSnr, th_g, gg)};
    };
    return {b.build(des.size(), row, opt.workers)};
}

// Hydrogen 1s, a0 = 52 pm, mu = mu_B, BA with c_perp = 1.
std::vector<Output> fig5b(const RunOptions& opt)
{
    const double a0 = 52e-12;
    const SpinDensity hyd = SpinDensity::hydrogen(a0);
    const SpinDensity gauss = SpinDensity::gaussian(a0);
    Sample s;
    s.moment_bohr = 1.0;
    s.mode = Mode::BA;
    const double th = theta(s, hyd);
    const double th_g = theta(s, gauss);
    const auto des = log_grid(1e-11, 1e-9, 31);
    Builder b;
    b.name = "fig5b";
    b.parameters = {{"density", "hydrogen"}, {"a0", a0}, {"moment_bohr", 1.0}, {"theta", th}, {"snr", kSnr},
                    {"regime", "BA"}, {"delta_e", {{"lo", 1e-11}, {"hi", 1e-9}, {"points", 31}, {"log_scale", true}}}};
    b.comments = {"hydrogen 1s a0 = 52 pm, mu = mu_B, theta = " + sci(th) + ", SNR = 3, BA with c_perp = 1",
                  "gaussian model with delta_s = a0"};
    b.columns = {{"delta_e", "m"},          {"chi", "1"},          {"calG_hydrogen", "1"},
                 {"n_qfi_hydrogen", "electrons"}, {"calG_gaussian", "1"}, {"n_qfi_gaussian", "electrons"}};
    auto row = [&](std::size_t i) {
        Probe p;
        p.delta_e = des[i];
        const double g = calG(hyd, p);
        const double gg = calG(gauss, p);
        return std::vector<double>{des[i], des[i] / a0, g, electrons_for_snr(kSnr, th, qfi_ba(g)), gg,
                                   electrons_for_snr(kSnr, th_g, qfi_ba(gg))};
    };
    return {b.build(des.size(), row, opt.workers)};
}

// Momentum CFI restricted to q <= q_max; delta_e = 10 nm, delta_s = 1 nm.
std::vector<Output> figC1a(const RunOptions& opt)
{
    const double ds = 1e-9;
    const SpinDensity dens = SpinDensity::gaussian(ds);
    Probe p;
    p.delta_e = 10e-9;
    const double g = calG(dens, p);
    const auto qs = log_grid(1e-2, 10.0, 31);
    Builder b;
    b.name = "figC1a";
    b.parameters = {{"density", "gaussian"}, {"delta_s", ds}, {"delta_e", p.delta_e}, {"regime", "NB"},
                    {"q_max_delta_s", {{"lo", 1e-2}, {"hi", 10.0}, {"points", 31}, {"log_scale", true}}}};
    b.comments = {"gaussian spin delta_s = 1 nm, delta_e = 10 nm, NB with n_perp = 1",
                  "q_max is a wavenumber; q_max_delta_s = q_max * delta_s"};
    b.columns = {{"q_max", "1/m"}, {"q_max_delta_s", "1"}, {"cfi_momentum", "1"}, {"qfi", "1"}};
    auto row = [&](std::size_t i) {
        const double q = qs[i] / ds;
        return std::vector<double>{q, qs[i], cfi_momentum_restricted(q, 1.0, p, dens), g};
    };
    return {b.build(qs.size(), row, opt.workers)};
}

// Pixelated detector with q_max = 5/delta_s; pixel sides on a factor-3 ladder.
std::vector<Output> figC1b(const RunOptions& opt)
{
    const double ds = 1e-9;
    const SpinDensity dens = SpinDensity::gaussian(ds);
    Probe p;
    p.delta_e = 10e-9;
    const double q_max = 5.0 / ds;
    const double restricted = cfi_momentum_restricted(q_max, 1.0, p, dens);
    std::vector<double> px;
    for (int k = 6; k >= 0; --k) px.push_back(10.0 * std::pow(3.0, -k));
    Builder b;
    b.name = "figC1b";
    b.parameters = {{"density", "gaussian"}, {"delta_s", ds},        {"delta_e", p.delta_e},
                    {"regime", "NB"},        {"q_max", q_max},       {"pixel_delta_s", px}};
    b.comments = {"gaussian spin delta_s = 1 nm, delta_e = 10 nm, q_max = 5/delta_s, NB with n_perp = 1",
                  "square pixels, central pixel centred on the axis; pixel_delta_s = pixel * delta_s = 10 * 3^-k"};
    b.columns = {{"pixel", "1/m"}, {"pixel_delta_s", "1"}, {"cfi_pixelated", "1"}, {"cfi_restricted", "1"}};
    PixelOptions po;
    po.workers = opt.workers;
    // Parallelism lives inside each point; rows run one after another.
    auto row = [&](std::size_t i) {
        const double pixel = px[i] / ds;
        return std::vector<double>{pixel, px[i], cfi_momentum_pixelated(pixel, q_max, 1.0, p, dens, po), restricted};
    };
    return {b.build(px.size(), row, 1)};
}

// BA quantum trace distance at theta = 1e-2, c_z = 0.1, eigenvalue route against the perturbative formula.
std::vector<Output> figE1(const RunOptions& opt)
{
    const double th = 1e-2;
    const SpinDensity dens = SpinDensity::gaussian(1e-9);
    const double cps[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const auto chis = log_grid(0.1, 10.0, 41);
    Builder b;
    b.name = "figE1";
    b.parameters = {{"theta", th}, {"c_z", 0.1}, {"c_perp", {0.0, 0.25, 0.5, 0.75, 1.0}},
                    {"chi", {{"lo", 0.1}, {"hi", 10.0}, {"points", 41}, {"log_scale", true}}}};
    b.comments = {"gaussian model, theta = 1e-2, c_z = 0.1 (c_z = 0 at |c_perp| = 1 to stay on the Bloch ball)"};
    b.columns = {{"chi", "1"}};
    for (double c : cps) {
        const std::string tag = format_number(c);
        b.columns.push_back({"dq_eigen_cperp_" + tag, "1"});
        b.columns.push_back({"dq_perturbative_cperp_" + tag, "1"});
    }
    auto row = [&](std::size_t i) {
        const Probe p = probe_at_chi(dens, chis[i]);
        const double g = calG(dens, p), f = calF(dens, p);
        std::vector<double> v{chis[i]};
        for (double c : cps) {
            const Vec3 bloch{c, 0.0, c < 1.0 ? 0.1 : 0.0};
            v.push_back(dq_ba(th, bloch, dens, p).eigen);
            v.push_back(dq_ba_perturbative(th, c, g, f));
        }
        return v;
    };
    return {b.build(chis.size(), row, opt.workers)};
}

// Nuclear spin: gaussian delta_s = 1 pm, mu = mu_B/1836; delta_e from 10 pm (paraxial limit) to 1 nm.
std::vector<Output> figG1(const RunOptions& opt)
{
    const double ds = 1e-12;
    const SpinDensity dens = SpinDensity::gaussian(ds);
    Sample s;
    s.moment_bohr = 1.0 / 1836.0;
    const double th = theta(s, dens);
    const auto des = log_grid(1e-11, 1e-9, 21);
    Builder b;
    b.name = "figG1";
    b.parameters = {{"density", "gaussian"}, {"delta_s", ds}, {"moment_bohr", 1.0 / 1836.0}, {"theta", th},
                    {"snr", kSnr}, {"cl", kCl},
                    {"delta_e", {{"lo", 1e-11}, {"hi", 1e-9}, {"points", 21}, {"log_scale", true}}}};
    b.comments = {"nuclear spin, gaussian delta_s = 1 pm, mu = mu_B/1836, theta = " + sci(th),
                  "estimation at SNR = 3 and discrimination at CL = 87%; n = c = (1, 0, 0)"};
    b.columns = {{"delta_e", "m"},
                 {"chi", "1"},
                 {"calG", "1"},
                 {"n_qfi_nb", "electrons"},
                 {"n_qfi_ba", "electrons"},
                 {"n_cfi_momentum", "electrons"},
                 {"n_cfi_oam_nb", "electrons"},
                 {"n_cfi_oam_ba", "electrons"},
                 {"shots_quantum_nb", "shots"},
                 {"shots_quantum_ba", "shots"},
                 {"shots_momentum", "shots"},
                 {"shots_oam_nb", "shots"},
                 {"shots_oam_ba", "shots"}};
    const Vec3 trans{1.0, 0.0, 0.0};
    auto row = [&](std::size_t i) {
        Probe p;
        p.delta_e = des[i];
        const double g = calG(dens, p);
        auto n = [&](double info) { return electrons_for_snr(kSnr, th, info); };
        return std::vector<double>{des[i],
                                   des[i] / ds,
                                   g,
                                   n(qfi_nb(1.0, g)),
                                   n(qfi_ba(g)),
                                   n(g),
                                   n(cfi_oam(Mode::NB, th, 1.0, dens, p)),
                                   n(cfi_oam(Mode::BA, th, 1.0, dens, p)),
                                   shots(dq_nb(th, 1.0, dens, p).exact),
                                   shots(dq_ba(th, trans, dens, p).eigen),
                                   shots(d_momentum_nb(th, 1.0, dens, p)),
                                   shots(d_oam(Mode::NB, th, 1.0, dens, p)),
                                   shots(d_oam(Mode::BA, th, 1.0, dens, p))};
    };
    return {b.build(des.size(), row, opt.workers)};
}

}  // namespace

const std::vector<std::string>& figure_names()
{
    static const std::vector<std::string> names{"fig2",   "fig3",   "fig4",  "fig5a", "fig5b",
                                                "figC1a", "figC1b", "figE1", "figG1"};
    return names;
}

std::vector<Output> run_figure(const std::string& name, const RunOptions& options)
{
    if (name == "fig2") return fig2(options);
    if (name == "fig3") return fig3(options);
    if (name == "fig4") return fig4(options);
    if (name == "fig5a") return fig5a(options);
    if (name == "fig5b") return fig5b(options);
    if (name == "figC1a") return figC1a(options);
    if (name == "figC1b") return figC1b(options);
    if (name == "figE1") return figE1(options);
    if (name == "figG1") return figG1(options);
    std::string known;
    for (const auto& n : figure_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown figure '" + name + "'; expected one of " + known);
}

}  // namespace spinsense::cli
