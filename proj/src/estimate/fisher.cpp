#include <algorithm>
#include <cmath>
#include <vector>

#include "spinsense/estimate.hpp"
#include "spinsense/quadrature.hpp"
#include "spinsense/scatter.hpp"
#include "spinsense/specfun.hpp"

namespace spinsense {

std::string Measurement::name() const
{
    switch (kind) {
    case MeasurementKind::Position: return "position";
    case MeasurementKind::Momentum: return "momentum";
    case MeasurementKind::Oam: return "oam";
    case MeasurementKind::Defocus: return "defocus";
    }
    return "unknown";
}

double EstimationConfig::theta() const { return spinsense::theta(sample, density, constants); }

double EstimationConfig::chi() const { return spinsense::chi(probe, density); }

double qfi_nb(double n_perp, double g) { return n_perp * n_perp * g; }

double qfi_ba(double g) { return 2.0 * g; }

QfiResult qfi(const EstimationConfig& config)
{
    const double g = calG(config.density, config.probe);
    if (config.sample.mode == Mode::NB) return {qfi_nb(config.sample.perp(), g), true};
    return {qfi_ba(g), config.theta() < 0.1};
}

double p0_likelihood(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("p0: theta must be non-negative");
    if (mode == Mode::NB) {
        return probe_average(
            [&](double r) {
                const double j = bessel_j(0, theta * perp * g_profile(density, r));
                return j * j;
            },
            probe, density);
    }
    return probe_average(
        [&](double r) {
            const double c = std::cos(theta * g_profile(density, r));
            return c * c;
        },
        probe, density);
}

double p0_complement(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("p0: theta must be non-negative");
    if (mode == Mode::NB) {
        return probe_average(
            [&](double r) {
                const double x = theta * perp * g_profile(density, r);
                return one_minus_j0(x) * (1.0 + bessel_j(0, x));
            },
            probe, density);
    }
    return probe_average(
        [&](double r) {
            const double s = std::sin(theta * g_profile(density, r));
            return s * s;
        },
        probe, density);
}

double p0_derivative(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe)
{
    if (mode == Mode::NB) {
        return -2.0 * perp *
               probe_average(
                   [&](double r) {
                       const double g = g_profile(density, r);
                       const double x = theta * perp * g;
                       return bessel_j(0, x) * bessel_j(1, x) * g;
                   },
                   probe, density);
    }
    return -probe_average(
        [&](double r) {
            const double g = g_profile(density, r);
            return std::sin(2.0 * theta * g) * g;
        },
        probe, density);
}

double cfi_oam(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("cfi_oam: theta must be non-negative");
    if (mode == Mode::NB && perp == 0.0) return 0.0;
    if (theta == 0.0) {
        const double g = calG(density, probe);
        return mode == Mode::NB ? perp * perp * g : 2.0 * g;
    }
    const double q = p0_complement(mode, theta, perp, density, probe);
    const double d = p0_derivative(mode, theta, perp, density, probe);
    return d * d / ((1.0 - q) * q);
}

double cfi_momentum_restricted(double q_max, double perp, const Probe& probe, const SpinDensity& density)
{
    if (q_max < 0) throw std::domain_error("cfi_momentum_restricted: q_max must be non-negative");
    if (q_max == 0.0 || perp == 0.0) return 0.0;
    if (!std::isfinite(q_max)) return perp * perp * calG(density, probe);
    const double de = probe.delta_e;
    const double t_max = q_max * de;
    auto f = [&](double t) {
        const double x = xi_f(t / de, probe, density) / de;
        return t * x * x;
    };
    std::vector<double> pts{0.0, t_max};
    for (double t = 0.25; t < t_max; t *= 2.0) pts.push_back(t);
    const double ratio = de / density.width;
    for (double k : {0.5, 1.0, 2.0, 4.0, 8.0})
        if (k * ratio < t_max) pts.push_back(k * ratio);
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-16;  // per piece; pieces far in the Gaussian tail are tiny
    return 4.0 * kPi * perp * perp * integrate_pieces(f, pts, spec).value;
}

double cfi_defocus(double z, double f, double perp, const Probe& probe, const SpinDensity& density)
{
    if (perp == 0.0) return 0.0;
    if (z == 0.0) return 0.0;
    const DefocusPlane plane{z, f, probe.k0()};
    plane.validate();
    const DefocusDecay decay = defocus_decay_rates(plane, probe, density);
    const double r_max = std::sqrt(45.0 / decay.xi);
    auto h = [&](double r) {
        const double re = defocus_overlap(r, plane, probe, density).re_over_abs;
        return r * re * re;
    };
    std::vector<double> pts{0.0, r_max};
    for (double k : {0.05, 0.1, 0.2, 0.4}) pts.push_back(k * r_max);
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    return 4.0 * kPi * perp * perp * integrate_pieces(h, pts, spec).value;
}

QfiResult cfi(const EstimationConfig& config)
{
    const Measurement& m = config.measurement;
    const Sample& s = config.sample;
    const double perp = s.perp();
    const double th = config.theta();
    switch (m.kind) {
    case MeasurementKind::Position: return {0.0, true};
    case MeasurementKind::Momentum: {
        const bool valid = s.mode == Mode::NB || th < 0.1;
        if (m.pixel > 0) {
            if (!std::isfinite(m.q_max)) throw std::invalid_argument("pixelated momentum CFI needs a finite q_max");
            return {cfi_momentum_pixelated(m.pixel, m.q_max, perp, config.probe, config.density), valid};
        }
        return {cfi_momentum_restricted(m.q_max, perp, config.probe, config.density), valid};
    }
    case MeasurementKind::Oam: return {cfi_oam(s.mode, th, perp, config.density, config.probe), true};
    case MeasurementKind::Defocus:
        if (s.mode == Mode::BA) throw std::invalid_argument("defocus CFI is available for the NB regime only");
        return {cfi_defocus(m.z, m.f, perp, config.probe, config.density), th <= 1e-2};
    }
    return {0.0, false};
}

double electrons_for_snr(double snr, double theta, double info)
{
    if (!(info > 0)) throw InsensitiveConfiguration("insensitive configuration: information is zero");
    if (!(theta > 0)) throw std::domain_error("electrons_for_snr: theta must be positive");
    if (!(snr > 0)) throw std::domain_error("electrons_for_snr: snr must be positive");
    return std::ceil(snr * snr / (theta * theta * info));
}

FisherReport fisher_report(const EstimationConfig& config)
{
    FisherReport r;
    r.calG = calG(config.density, config.probe);
    r.calF = calF(config.density, config.probe);
    r.qfi_nb = qfi_nb(config.sample.perp(), r.calG);
    r.qfi_ba = qfi_ba(r.calG);
    const QfiResult c = cfi(config);
    r.cfi = c.value;
    r.valid = c.valid;
    r.measurement = config.measurement;
    return r;
}

}  // namespace spinsense
