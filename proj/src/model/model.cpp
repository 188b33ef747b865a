#include "spinsense/model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinsense/quadrature.hpp"
#include "spinsense/specfun.hpp"

namespace spinsense {

namespace {

void require_width(double w)
{
    if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("spin density width must be positive");
}

double gaussian_regularizer(double y)
{
    if (y < 0.5) {
        // sqrt(2/pi) sum_{k>=1} (-1)^{k+1} 2k y^{2k+1} / ((2k+1) 2^k k!)
        double term = y;  // y^{2k+1}/(2^k k!) at k = 0
        double sum = 0.0;
        const double y2 = 0.5 * y * y;
        for (int k = 1; k < 30; ++k) {
            term *= y2 / k;
            const double c = (k % 2 ? 1.0 : -1.0) * 2.0 * k / (2.0 * k + 1.0);
            sum += c * term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return std::sqrt(2.0 / kPi) * sum;
    }
    return std::erf(y / std::sqrt(2.0)) - std::sqrt(2.0 / kPi) * y * std::exp(-0.5 * y * y);
}

double hydrogen_regularizer(double y)
{
    const double t = 2.0 * y;
    if (t < 1.0) {
        // e^{-t} sum_{k>=3} t^k/k!
        double term = t * t * t / 6.0;
        double sum = term;
        for (int k = 4; k < 40; ++k) {
            term *= t / k;
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::exp(-t) * sum;
    }
    return 1.0 - (1.0 + t + 0.5 * t * t) * std::exp(-t);
}

double gaussian_g(double y)
{
    if (y < 1e-4) {
        const double y2 = y * y;
        return y * (0.5 - y2 / 8.0 + y2 * y2 / 48.0);
    }
    return -std::expm1(-0.5 * y * y) / y;
}

double ball_g(double y)
{
    if (y >= 1.0) return 1.0 / y;
    const double s = std::sqrt((1.0 - y) * (1.0 + y));
    return y / (1.0 + s) + y * s;
}

double hydrogen_g(double y)
{
    const double t = 2.0 * y;
    if (t > 2.0) return 2.0 / t - t * bessel_k(0, t) - 2.0 * bessel_k(1, t);
    if (t == 0.0) return 0.0;
    const double q = 0.25 * t * t;
    const double l = std::log(0.5 * t);
    double w = 1.0;  // q^k/(k!)^2
    double hk = 0.0;
    double sum = 0.0;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            w *= q / (double(k) * k);
            hk += 1.0 / k;
        }
        const double hk1 = hk + 1.0 / (k + 1);
        const double c = l * k / (k + 1.0) + kEulerGamma - hk + (hk + hk1 - 2.0 * kEulerGamma) / (2.0 * (k + 1));
        const double term = w * c;
        sum += term;
        if (k > 1 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return t * sum;
}

}  // namespace

double Constants::derived_r_e() const { return mu0 * e_charge * e_charge / (4.0 * kPi * m_e); }

SpinDensity SpinDensity::gaussian(double delta_s)
{
    require_width(delta_s);
    SpinDensity d;
    d.kind = DensityKind::Gaussian;
    d.width = delta_s;
    return d;
}

SpinDensity SpinDensity::ball(double radius)
{
    require_width(radius);
    SpinDensity d;
    d.kind = DensityKind::UniformBall;
    d.width = radius;
    d.support_radius = radius;
    return d;
}

SpinDensity SpinDensity::hydrogen(double a0)
{
    require_width(a0);
    SpinDensity d;
    d.kind = DensityKind::Hydrogen1s;
    d.width = a0;
    return d;
}

SpinDensity SpinDensity::custom_radial(std::function<double(double)> density, double width, double support_radius,
                                       double decay_length)
{
    require_width(width);
    if (!density) throw std::invalid_argument("custom density: missing function");
    const bool has_support = std::isfinite(support_radius) && support_radius > 0;
    if (!has_support && !(decay_length > 0))
        throw std::invalid_argument("custom density: needs a finite support radius or a decay length");
    SpinDensity d;
    d.kind = DensityKind::CustomRadial;
    d.width = width;
    d.custom = std::move(density);
    d.support_radius = has_support ? support_radius : std::numeric_limits<double>::infinity();
    d.decay_length = decay_length;
    const double norm = d.normalization();
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("custom density: 4*pi*int r^2 P dr = " + std::to_string(norm) + ", expected 1");
    return d;
}

double SpinDensity::density(double r) const
{
    switch (kind) {
    case DensityKind::Gaussian: {
        const double y = r / width;
        return std::exp(-0.5 * y * y) / (std::pow(2.0 * kPi, 1.5) * width * width * width);
    }
    case DensityKind::UniformBall:
        return r <= width ? 3.0 / (4.0 * kPi * width * width * width) : 0.0;
    case DensityKind::Hydrogen1s:
        return std::exp(-2.0 * r / width) / (kPi * width * width * width);
    case DensityKind::CustomRadial:
        return custom(r);
    }
    return 0.0;
}

double SpinDensity::cutoff() const
{
    switch (kind) {
    case DensityKind::Gaussian: return 12.0 * width;
    case DensityKind::UniformBall: return width;
    case DensityKind::Hydrogen1s: return 25.0 * width;
    case DensityKind::CustomRadial:
        return std::isfinite(support_radius) ? support_radius : 45.0 * decay_length;
    }
    return width;
}

double SpinDensity::normalization() const
{
    const double c = cutoff();
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    const double w = width;
    auto f = [this, w](double t) {
        const double r = t * w;
        return 4.0 * kPi * r * r * density(r) * w;
    };
    return integrate(f, 0.0, c / w, spec).value;
}

std::string SpinDensity::name() const
{
    switch (kind) {
    case DensityKind::Gaussian: return "gaussian";
    case DensityKind::UniformBall: return "ball";
    case DensityKind::Hydrogen1s: return "hydrogen";
    case DensityKind::CustomRadial: return "custom";
    }
    return "unknown";
}

double Probe::k0() const
{
    if (!(lambda0 > 0)) throw std::invalid_argument("probe: wavelength must be positive");
    return 2.0 * kPi / lambda0;
}

double Sample::perp() const { return std::hypot(orientation[0], orientation[1]); }

double Sample::azimuth() const { return std::atan2(orientation[1], orientation[0]); }

void Sample::validate() const
{
    if (!(moment_bohr > 0)) throw std::invalid_argument("sample: moment must be positive");
    const double len = std::sqrt(orientation[0] * orientation[0] + orientation[1] * orientation[1] +
                                 orientation[2] * orientation[2]);
    if (mode == Mode::NB && std::abs(len - 1.0) > 1e-9)
        throw std::invalid_argument("sample: orientation n must be a unit vector");
    if (mode == Mode::BA && len > 1.0 + 1e-9) throw std::invalid_argument("sample: Bloch vector length exceeds 1");
}

double InteractionProfile::operator()(double r) const
{
    return strategy == GEval::Numeric ? g_profile_numeric(density, r) : g_profile(density, r);
}

double chi(const Probe& probe, const SpinDensity& density) { return probe.delta_e / density.width; }

Probe probe_at_chi(const SpinDensity& density, double c, const Probe& base)
{
    if (!(c > 0)) throw std::invalid_argument("chi must be positive");
    Probe p = base;
    p.delta_e = c * density.width;
    return p;
}

double regularizer(const SpinDensity& density, double x)
{
    if (x < 0) throw std::domain_error("regularizer: x must be non-negative");
    const double y = x / density.width;
    switch (density.kind) {
    case DensityKind::Gaussian: return gaussian_regularizer(y);
    case DensityKind::UniformBall: return std::min(1.0, y * y * y);
    case DensityKind::Hydrogen1s: return hydrogen_regularizer(y);
    case DensityKind::CustomRadial: return regularizer_quadrature(density, x);
    }
    return 0.0;
}

double regularizer_quadrature(const SpinDensity& density, double x)
{
    if (x < 0) throw std::domain_error("regularizer: x must be non-negative");
    if (x == 0.0) return 0.0;
    // work in units of the density width
    const double w = density.width;
    const double xs = x / w;
    const double cs = density.cutoff() / w;
    const bool compact = std::isfinite(density.support_radius);
    const double rs = compact ? density.support_radius / w : cs;
    QuadratureSpec inner_spec;
    inner_spec.rel_tol = 1e-12;
    inner_spec.abs_tol = 1e-14;
    QuadratureSpec outer_spec;
    outer_spec.rel_tol = 1e-10;
    outer_spec.abs_tol = 1e-13;
    const double w3 = w * w * w;
    // F = pi int du/u^2 int_{|u-x|}^{u+x} s (u^2+x^2-s^2) P(s) ds; with a = min(u,x), b = max(u,x)
    // and s = b + a t the inner integral is a^2 int (b+at)(a-2bt-at^2) P(b+at) dt, free of cancellation
    auto outer = [&](double u) {
        if (u <= 0) return 0.0;
        const double a = std::min(u, xs), b = std::max(u, xs);
        const double t_hi = std::min(1.0, (cs - b) / a);
        if (t_hi <= -1.0) return 0.0;
        auto inner = [&](double t) {
            const double s = b + a * t;
            return s * (a - 2.0 * b * t - a * t * t) * density.density(s * w) * w3;
        };
        std::vector<double> pts{-1.0, t_hi};
        const double t_edge = (rs - b) / a;
        if (compact && t_edge > -1.0 && t_edge < t_hi) pts.push_back(t_edge);
        const double ratio = a / u;
        return ratio * ratio * integrate_pieces(inner, pts, inner_spec).value;
    };
    std::vector<double> pts{0.0, xs + cs};
    for (double b : {xs - rs, xs + rs, rs - xs, cs - xs})
        if (b > 0 && b < xs + cs) pts.push_back(b);
    return kPi * integrate_pieces(outer, pts, outer_spec).value;
}

double g_profile(const SpinDensity& density, double r)
{
    if (r < 0) throw std::domain_error("g_profile: r must be non-negative");
    const double y = r / density.width;
    switch (density.kind) {
    case DensityKind::Gaussian: return gaussian_g(y);
    case DensityKind::UniformBall: return ball_g(y);
    case DensityKind::Hydrogen1s: return hydrogen_g(y);
    case DensityKind::CustomRadial: return g_profile_numeric(density, r);
    }
    return 0.0;
}

double g_profile_numeric(const SpinDensity& density, double r)
{
    if (r < 0) throw std::domain_error("g_profile: r must be non-negative");
    if (r == 0.0) return 0.0;
    const double w = density.width;
    const double y = r / w;
    const double cs = density.cutoff() / w;
    // beyond the cutoff F = 1 and the z-integral is elementary
    const double zc = y < cs ? std::sqrt((cs - y) * (cs + y)) : 0.0;
    const double rho_c = std::sqrt(y * y + zc * zc);
    const double tail = 1.0 / (rho_c * (rho_c + zc));
    double body = 0.0;
    if (zc > 0) {
        QuadratureSpec spec;
        spec.rel_tol = 1e-13;
        auto f = [&](double z) {
            const double rho = std::sqrt(y * y + z * z);
            return regularizer(density, rho * w) / (rho * rho * rho);
        };
        std::vector<double> pts{0.0, zc};
        for (double scale : {0.5, 1.0, 2.0, 4.0}) {
            if (scale * scale > y * y) {
                const double zb = std::sqrt(scale * scale - y * y);
                if (zb < zc) pts.push_back(zb);
            }
        }
        body = integrate_pieces(f, pts, spec).value;
    }
    return y * (body + tail);
}

double theta(const Sample& sample, const SpinDensity& density, const Constants& constants)
{
    return constants.r_e * sample.moment_bohr / density.width;
}

}  // namespace spinsense
