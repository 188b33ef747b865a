#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "spinsense/quadrature.hpp"
#include "spinsense/scatter.hpp"
#include "spinsense/specfun.hpp"

namespace spinsense {

namespace {

constexpr double kRhoMax = 13.5;  // e^{-rho^2/4} < 1e-19 beyond, rho = r/delta_e

// (Delta_e^2 - tilde Delta_e^2) for the Gaussian closed form
double gaussian_gap(double de, double ds)
{
    const double de2 = de * de;
    return 2.0 * de2 * de2 / (ds * ds + 2.0 * de2);
}

double gaussian_xi_over_q(double q, double de, double ds)
{
    const double d = gaussian_gap(de, ds);
    const double x = q * q * d;
    const double pref = ds / (std::sqrt(2.0 * kPi) * de);
    const double tilde2 = de * de - d;
    double ratio;  // (1 - e^{-x})/q^2
    if (x < 1e-8)
        ratio = d * (1.0 - 0.5 * x);
    else
        ratio = -std::expm1(-x) / (q * q);
    return pref * std::exp(-q * q * tilde2) * ratio;
}

// int r (J1(q r)/q) g(r) psi0(r) dr, with J1(qr)/q -> r/2 at q = 0
double hankel_over_q(double q, const Probe& probe, const SpinDensity& density)
{
    const double de = probe.delta_e;
    const double norm = 1.0 / (std::sqrt(2.0 * kPi));
    auto f = [&](double rho) {
        const double r = rho * de;
        const double j = q > 0 ? bessel_j(1, q * r) / q : 0.5 * r;
        return rho * j * g_profile(density, r) * std::exp(-0.25 * rho * rho) * norm;
    };
    const double phase = q * de * kRhoMax;
    const int pieces = std::max(1, int(std::ceil(phase / (2.0 * kPi))));
    std::vector<double> pts;
    for (int i = 0; i <= pieces; ++i) pts.push_back(kRhoMax * i / pieces);
    const double kink = density.width / de;
    if (density.kind == DensityKind::UniformBall && kink < kRhoMax) pts.push_back(kink);
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-17;
    return de * integrate_pieces(f, pts, spec).value;
}

}  // namespace

double momentum_amplitude_unscattered(double q, const Probe& probe)
{
    if (q < 0) throw std::domain_error("momentum amplitude: q must be non-negative");
    const double de = probe.delta_e;
    return de * std::sqrt(2.0 / kPi) * std::exp(-q * q * de * de);
}

double xi_f(double q, const Probe& probe, const SpinDensity& density)
{
    if (q < 0) throw std::domain_error("xi_f: q must be non-negative");
    if (density.kind == DensityKind::Gaussian) return q * gaussian_xi_over_q(q, probe.delta_e, density.width);
    return xi_f_hankel(q, probe, density);
}

double xi_f_hankel(double q, const Probe& probe, const SpinDensity& density)
{
    if (q < 0) throw std::domain_error("xi_f: q must be non-negative");
    if (q == 0) return 0.0;
    return q * hankel_over_q(q, probe, density);
}

std::function<double(double)> xi_over_q(const Probe& probe, const SpinDensity& density, double q_max)
{
    if (density.kind == DensityKind::Gaussian) {
        const double de = probe.delta_e, ds = density.width;
        return [de, ds](double q) { return gaussian_xi_over_q(q, de, ds); };
    }
    // uniform table with 4-point Lagrange interpolation
    const int n = 2048;
    const double h = q_max / (n - 1);
    auto table = std::make_shared<std::vector<double>>(n + 2);
    for (int i = 0; i < n + 2; ++i) (*table)[i] = hankel_over_q(h * i, probe, density);
    return [table, h, n](double q) {
        const double t = q / h;
        int i = std::clamp(int(t), 1, n - 1);
        const double s = t - i;
        const auto& v = *table;
        const double p0 = v[i - 1], p1 = v[i], p2 = v[i + 1], p3 = v[i + 2];
        return p1 + s * (0.5 * (p2 - p0) +
                         s * (p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3 + s * (1.5 * (p1 - p2) + 0.5 * (p3 - p0))));
    };
}

}  // namespace spinsense
