#include "spinsense/discriminate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinsense/quadrature.hpp"
#include "spinsense/scatter.hpp"
#include "spinsense/specfun.hpp"

namespace spinsense {

DqNbResult dq_nb(double theta, double n_perp, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("dq_nb: theta must be non-negative");
    DqNbResult r;
    r.perturbative = 0.5 * theta * n_perp * std::sqrt(calG(density, probe));
    r.perturbative_valid = theta * n_perp <= 1e-2;
    if (theta == 0.0 || n_perp == 0.0) return r;
    const double one_m = probe_average(
        [&](double x) { return one_minus_j0(theta * n_perp * g_profile(density, x)); }, probe, density);
    r.exact = std::sqrt(std::max(0.0, one_m * (2.0 - one_m)));
    return r;
}

double d_oam(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("d_oam: theta must be non-negative");
    if (theta == 0.0) return 0.0;
    return p0_complement(mode, theta, perp, density, probe);
}

double d_momentum_coefficient(const SpinDensity& density, const Probe& probe)
{
    if (density.kind != DensityKind::Gaussian) return d_momentum_coefficient_quadrature(density, probe);
    const double c = chi(probe, density);
    if (!(c > 0)) throw std::domain_error("chi must be positive");
    const double a = c * c;
    const double eps = a / (1.0 + a);
    return std::sqrt(2.0 / kPi) / c * eps / (std::sqrt(1.0 + eps) + 1.0);
}

double d_momentum_coefficient_quadrature(const SpinDensity& density, const Probe& probe)
{
    const double de = probe.delta_e;
    // 4 int q |psi(q) Xi(q)| dq with t = q delta_e
    auto f = [&](double t) { return t * std::exp(-t * t) * xi_f(t / de, probe, density) / de; };
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-15;  // per sign-change piece; tail pieces are tiny
    return 4.0 * std::sqrt(2.0 / kPi) * integrate_abs(f, 0.0, 7.0, spec).value;
}

double d_momentum_nb(double theta, double n_perp, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("d_momentum: theta must be non-negative");
    if (theta == 0.0 || n_perp == 0.0) return 0.0;
    return theta * n_perp * d_momentum_coefficient(density, probe);
}

double d_momentum_ba(double theta, const Vec3& bloch, const SpinDensity& density, const Probe& probe)
{
    return d_momentum_nb(theta, std::hypot(bloch[0], bloch[1]), density, probe);
}

DefocusDistance d_defocus(double z, double f, double theta, double n_perp, const Probe& probe,
                          const SpinDensity& density)
{
    if (theta < 0) throw std::domain_error("d_defocus: theta must be non-negative");
    if (z < 0 || z > f) throw std::domain_error("d_defocus: requires 0 <= z <= f");
    DefocusDistance out;
    out.valid = theta <= 1e-2;
    if (z == 0.0 || theta == 0.0 || n_perp == 0.0) return out;
    const DefocusPlane plane{z, f, probe.k0()};
    const DefocusDecay decay = defocus_decay_rates(plane, probe, density);
    const double gamma = decay.unscattered + decay.xi;
    const double r_max = std::sqrt(45.0 / gamma);
    auto h = [&](double r) { return r * defocus_overlap(r, plane, probe, density).re; };
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    const double integral = integrate_abs(h, 0.0, r_max, spec).value;
    const double scale = 4.0 * theta * n_perp;
    out.value = scale * integral;
    // r|u Xi| <= |u(0)| (2 delta_s/(sqrt(2 pi) delta_e)) e^{-gamma r^2}
    const double amp = std::abs(defocus_unscattered(0.0, plane, probe));
    const double xi_amp = 2.0 * density.width / (std::sqrt(2.0 * kPi) * probe.delta_e);
    out.tail_bound = scale * amp * xi_amp * std::exp(-gamma * r_max * r_max) / (2.0 * gamma * r_max);
    return out;
}

double dq_ba_perturbative(double theta, double c_perp, double g, double f)
{
    const double first = 0.5 * theta * c_perp * std::sqrt(g);
    const double second = 0.25 * theta * theta * (g + f);
    if (c_perp > theta / std::sqrt(8.0)) return first;
    if (c_perp == 0.0) return second;
    return std::max(first, second);
}

DqBaResult dq_ba(double theta, const Vec3& bloch, const SpinDensity& density, const Probe& probe)
{
    if (theta < 0) throw std::domain_error("dq_ba: theta must be non-negative");
    const double g = calG(density, probe);
    const double f = calF(density, probe);
    DqBaResult r;
    r.theta_bar = theta * std::sqrt(0.5 * g);
    if (r.theta_bar > 0.1)
        throw std::domain_error("dq_ba: theta_bar = " + std::to_string(r.theta_bar) +
                                " exceeds 0.1, second-order matrix not valid");
    const double cp = std::hypot(bloch[0], bloch[1]);
    r.perturbative = dq_ba_perturbative(theta, cp, g, f);
    r.perturbative_advisory = cp > 0 && cp <= theta / std::sqrt(8.0);
    if (theta == 0.0) return r;
    r.eigenvalues = hermitian_eigenvalues(ba_difference_matrix_unrotated(theta, bloch, g, calV(g, f)));
    double sum = 0.0;
    for (double l : r.eigenvalues) sum += std::abs(l);
    r.eigen = 0.5 * sum;
    return r;
}

double zeta_for_confidence(double cl)
{
    if (!(cl > 0.5) || !(cl < 1.0)) throw std::domain_error("confidence level must lie in (0.5, 1)");
    return std::sqrt(2.0) * erf_inv(cl);
}

double shots_for_confidence(double cl, double d)
{
    const double zeta = zeta_for_confidence(cl);
    if (!(d > 0) || d > 1.0) throw std::domain_error("shots_for_confidence: trace distance must lie in (0, 1]");
    const double n = std::ceil((1.0 / (d * d) - 1.0) * zeta * zeta);
    return std::max(1.0, n);
}

double cfi_bound_on_distance(double theta, double info)
{
    if (theta < 0 || info < 0) throw std::domain_error("cfi_bound_on_distance: inputs must be non-negative");
    return 0.5 * theta * std::sqrt(info);
}

double success_probability(double d)
{
    if (d < 0 || d > 1.0) throw std::domain_error("success_probability: trace distance must lie in [0, 1]");
    return 0.5 * (1.0 + d);
}

DiscriminationReport discrimination_report(const EstimationConfig& config, double cl)
{
    const Measurement& m = config.measurement;
    if (m.kind == MeasurementKind::Momentum && (m.pixel > 0 || std::isfinite(m.q_max)))
        throw std::invalid_argument("trace distances are available for unrestricted momentum detection only");
    DiscriminationReport r;
    r.measurement = m;
    r.regime = config.sample.mode;
    r.confidence = cl;
    const double th = config.theta();
    const double perp = config.sample.perp();
    const SpinDensity& dens = config.density;
    const Probe& probe = config.probe;
    r.d_by_measurement["position"] = 0.0;
    r.d_by_measurement["oam"] = d_oam(r.regime, th, perp, dens, probe);
    if (r.regime == Mode::NB) {
        r.dq = dq_nb(th, perp, dens, probe).exact;
        r.d_by_measurement["momentum"] = d_momentum_nb(th, perp, dens, probe);
        if (m.kind == MeasurementKind::Defocus) {
            const DefocusDistance d = d_defocus(m.z, m.f, th, perp, probe, dens);
            r.d_by_measurement["defocus"] = d.value;
            r.valid = d.valid;
        }
        if (m.kind == MeasurementKind::Momentum) r.valid = th * perp <= 1e-2;
    } else {
        if (m.kind == MeasurementKind::Defocus)
            throw std::invalid_argument("defocus trace distances are available for the NB regime only");
        r.dq = dq_ba(th, config.sample.orientation, dens, probe).eigen;
        r.d_by_measurement["momentum"] = d_momentum_ba(th, config.sample.orientation, dens, probe);
        if (m.kind == MeasurementKind::Momentum) r.valid = th <= 1e-2;
    }
    r.d_classical = r.d_by_measurement.at(m.name());
    constexpr double inf = std::numeric_limits<double>::infinity();
    r.shots_required = r.d_classical > 0 ? shots_for_confidence(cl, std::min(1.0, r.d_classical)) : inf;
    r.shots_quantum = r.dq > 0 ? shots_for_confidence(cl, std::min(1.0, r.dq)) : inf;
    return r;
}

}  // namespace spinsense
