#include <algorithm>
#include <cmath>
#include <vector>

#include "spinsense/estimate.hpp"
#include "spinsense/quadrature.hpp"
#include "spinsense/specfun.hpp"

namespace spinsense {

namespace {

constexpr double kSMax = 60.0;  // e^{-60} ~ 1e-26

std::vector<double> probe_breakpoints(const Probe& probe, const SpinDensity& density)
{
    std::vector<double> pts{0.0, 1.0, 5.0, 20.0, kSMax};
    const double de2 = 2.0 * probe.delta_e * probe.delta_e;
    for (double k : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        const double r = k * density.width;
        const double s = r * r / de2;
        if (s > 0 && s < kSMax) pts.push_back(s);
    }
    if (std::isfinite(density.support_radius)) {
        const double s = density.support_radius * density.support_radius / de2;
        if (s < kSMax) pts.push_back(s);
    }
    return pts;
}

}  // namespace

double probe_average(const std::function<double(double)>& h, const Probe& probe, const SpinDensity& density)
{
    if (!(probe.delta_e > 0)) throw std::invalid_argument("probe: delta_e must be positive");
    const double de = probe.delta_e;
    auto f = [&](double s) { return std::exp(-s) * h(de * std::sqrt(2.0 * s)); };
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    return integrate_pieces(f, probe_breakpoints(probe, density), spec).value;
}

double calG_gaussian(double c)
{
    if (!(c > 0)) throw std::domain_error("chi must be positive");
    const double a = c * c;
    if (a < 0.05) {
        // 2<g^2> = sum_{n>=2} a^{n-1} (-1)^n (2^n - 2)/n
        double sum = 0.0, an = 1.0, p2 = 2.0;
        for (int n = 2; n < 60; ++n) {
            an *= a;
            p2 *= 2.0;
            const double term = an * (p2 - 2.0) / n * (n % 2 ? -1.0 : 1.0);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return 2.0 / a * (std::log1p(a) - 0.5 * std::log1p(2.0 * a));
}

double g4_gaussian(double c)
{
    if (!(c > 0)) throw std::domain_error("chi must be positive");
    const double a = c * c;
    if (a < 0.05) {
        // (1/4) sum_{n>=4} a^{n-2} d_n/(n(n-1)), d_n = sum_k C(4,k)(-1)^{k+n} k^n
        static const double binom[5] = {1, 4, 6, 4, 1};
        double sum = 0.0, an = a;
        for (int n = 4; n < 80; ++n) {
            an *= a;
            double d = 0.0;
            for (int k = 1; k <= 4; ++k) d += binom[k] * ((k + n) % 2 ? -1.0 : 1.0) * std::pow(double(k), n);
            const double term = an * d / (double(n) * (n - 1));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return 0.25 * sum;
    }
    const double l1 = std::log1p(a), l2 = std::log1p(2.0 * a), l3 = std::log1p(3.0 * a), l4 = std::log1p(4.0 * a);
    const double first = 3.0 * l2 - 3.0 * l1 - l3;
    const double second = (4.0 * a + 1.0) * (l4 + 3.0 * l2 - l1 - 3.0 * l3);
    return (first + second) / (4.0 * a * a);
}

double calG_quadrature(const SpinDensity& density, const Probe& probe, GEval strategy)
{
    const InteractionProfile g{density, strategy};
    return 2.0 * probe_average([&](double r) { const double v = g(r); return v * v; }, probe, density);
}

double calF_quadrature(const SpinDensity& density, const Probe& probe, GEval strategy)
{
    const InteractionProfile g{density, strategy};
    const double m4 = probe_average([&](double r) { const double v = g(r); return v * v * v * v; }, probe, density);
    return 2.0 * std::sqrt(m4);
}

double calG(const SpinDensity& density, const Probe& probe)
{
    if (density.kind == DensityKind::Gaussian) return calG_gaussian(chi(probe, density));
    return calG_quadrature(density, probe);
}

double calF(const SpinDensity& density, const Probe& probe)
{
    if (density.kind == DensityKind::Gaussian) return 2.0 * std::sqrt(g4_gaussian(chi(probe, density)));
    return calF_quadrature(density, probe);
}

double calV(double g, double f)
{
    if (!(g > 0)) throw std::domain_error("calV: calG must be positive");
    const double ratio = f / g;
    return 0.5 * std::sqrt(std::max(0.0, (ratio - 1.0) * (ratio + 1.0)));
}

FocusResult optimal_focus(const SpinDensity& density, double lo, double hi, double tol)
{
    if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("optimal_focus: need 0 < chi_lo < chi_hi");
    auto value = [&](double c) { return calG(density, probe_at_chi(density, c)); };
    const int n = 49;
    std::vector<double> xs(n), vs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
        vs[i] = value(xs[i]);
    }
    const int best = int(std::max_element(vs.begin(), vs.end()) - vs.begin());
    if (best == 0 || best == n - 1)
        throw NonUnimodal("optimal_focus: maximum lies on the bracket edge; widen [chi_lo, chi_hi]");
    int peaks = 0;
    for (int i = 1; i + 1 < n; ++i)
        if (vs[i] > vs[i - 1] && vs[i] >= vs[i + 1]) ++peaks;
    if (peaks != 1) throw NonUnimodal("optimal_focus: calG is not unimodal on the bracket");

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = xs[best - 1], b = xs[best + 1];
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = value(x1), f2 = value(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = value(x1);
        }
    }
    const double c = 0.5 * (a + b);
    return {c, value(c)};
}

}  // namespace spinsense
