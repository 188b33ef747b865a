#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsense/scatter.hpp"
#include "spinsense/specfun.hpp"

namespace spinsense {

namespace {

struct Params {
    double kappa2;
    double alpha;
    double beta;         // 1 - 2 kappa^2/kappa'^2
    double one_m_beta;
    double one_p_beta;
    double bbar;         // 1 - 2 kappa^2/kappa_bar^2
    double one_m_bbar;
    double one_p_bbar;
    double bbar_minus_beta;
};

Params make_params(const DefocusPlane& plane, const Probe& probe, double ds)
{
    plane.validate();
    Params p{};
    const double de = probe.delta_e;
    p.kappa2 = plane.kappa_sq();
    p.alpha = plane.alpha();
    const double kp2 = p.kappa2 + 0.5 / (de * de);
    p.one_m_beta = 2.0 * p.kappa2 / kp2;
    p.one_p_beta = 1.0 / (de * de * kp2);
    p.beta = 1.0 - p.one_m_beta;
    if (ds > 0) {
        const double kb2 = kp2 + 1.0 / (ds * ds);
        p.one_m_bbar = 2.0 * p.kappa2 / kb2;
        p.one_p_bbar = (1.0 / (de * de) + 2.0 / (ds * ds)) / kb2;
        p.bbar = 1.0 - p.one_m_bbar;
        p.bbar_minus_beta = 2.0 * p.kappa2 / (ds * ds * kp2 * kb2);
    }
    return p;
}

// 1 - b e^{-2i alpha} and 1 + b e^{-2i alpha} without cancellation
cplx one_minus_w(double b, double one_m_b, double alpha)
{
    const cplx d = 2.0 * cplx(0.0, std::sin(alpha)) * std::polar(1.0, -alpha);  // 1 - e^{-2i alpha}
    return one_m_b + b * d;
}

cplx one_plus_w(double b, double one_p_b, double alpha)
{
    const cplx d = 2.0 * cplx(0.0, std::sin(alpha)) * std::polar(1.0, -alpha);
    return one_p_b - b * d;
}

cplx gamma_coeff(double kappa2, double b, double one_m_b, double one_p_b, double alpha)
{
    return kappa2 * one_plus_w(b, one_p_b, alpha) / (2.0 * one_minus_w(b, one_m_b, alpha));
}

// Re Gamma_b = kappa^2 (1 - b^2) / (2 |zeta_b|^2)
double re_gamma(double kappa2, double one_m_b, double one_p_b, double alpha)
{
    const double a = one_m_b * std::cos(alpha), b = one_p_b * std::sin(alpha);
    return kappa2 * one_m_b * one_p_b / (2.0 * (a * a + b * b));
}

cplx expm1c(cplx z)
{
    const double a = z.real(), b = z.imag();
    const double s = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

void require_gaussian(const SpinDensity& density)
{
    if (density.kind != DensityKind::Gaussian)
        throw std::invalid_argument("defocus amplitudes are available for Gaussian densities only");
}

}  // namespace

double DefocusPlane::alpha() const
{
    // arccos(1 - z/f) written to stay accurate for small z
    return 2.0 * std::asin(std::sqrt(0.5 * z / f));
}

double DefocusPlane::kappa_sq() const { return k0 / std::sqrt(z * (2.0 * f - z)); }

void DefocusPlane::validate() const
{
    if (!(f > 0)) throw std::invalid_argument("defocus plane: focal length must be positive");
    if (!(k0 > 0)) throw std::invalid_argument("defocus plane: k0 must be positive");
    if (!(z > 0) || !(z < 2.0 * f)) throw std::domain_error("defocus plane: requires 0 < z < 2f");
}

cplx defocus_unscattered(double r, const DefocusPlane& plane, const Probe& probe)
{
    if (r < 0) throw std::domain_error("defocus: r must be non-negative");
    const Params p = make_params(plane, probe, 0.0);
    const double de = probe.delta_e;
    const double kp2 = p.kappa2 + 0.5 / (de * de);
    const cplx omw = one_minus_w(p.beta, p.one_m_beta, p.alpha);
    const cplx g = gamma_coeff(p.kappa2, p.beta, p.one_m_beta, p.one_p_beta, p.alpha);
    const double pref = std::sqrt(2.0 / kPi) * p.kappa2 / (kp2 * de);
    return std::polar(pref, -p.alpha) * std::exp(-g * r * r) / omw;
}

cplx defocus_xi(double r, const DefocusPlane& plane, const Probe& probe, const SpinDensity& density)
{
    require_gaussian(density);
    if (r < 0) throw std::domain_error("defocus: r must be non-negative");
    if (r == 0.0) return {0.0, 0.0};
    const double ds = density.width;
    const Params p = make_params(plane, probe, ds);
    const cplx omw_beta = one_minus_w(p.beta, p.one_m_beta, p.alpha);
    const cplx omw_bbar = one_minus_w(p.bbar, p.one_m_bbar, p.alpha);
    const cplx g_beta = gamma_coeff(p.kappa2, p.beta, p.one_m_beta, p.one_p_beta, p.alpha);
    const cplx dgamma = p.kappa2 * p.bbar_minus_beta * std::polar(1.0, -2.0 * p.alpha) / (omw_bbar * omw_beta);
    const double r2 = r * r;
    const cplx bracket = -std::exp(-g_beta * r2) * expm1c(-dgamma * r2);
    const cplx pref(0.0, -ds / (std::sqrt(2.0 * kPi) * probe.delta_e * r));
    return pref * bracket;
}

DefocusDecay defocus_decay_rates(const DefocusPlane& plane, const Probe& probe, const SpinDensity& density)
{
    require_gaussian(density);
    const Params p = make_params(plane, probe, density.width);
    const double g_beta = re_gamma(p.kappa2, p.one_m_beta, p.one_p_beta, p.alpha);
    const double g_bbar = re_gamma(p.kappa2, p.one_m_bbar, p.one_p_bbar, p.alpha);
    DefocusDecay d;
    d.unscattered = g_beta;
    d.xi = std::min(g_beta, g_bbar);
    return d;
}

DefocusOverlap defocus_overlap(double r, const DefocusPlane& plane, const Probe& probe, const SpinDensity& density)
{
    require_gaussian(density);
    if (r < 0) throw std::domain_error("defocus: r must be non-negative");
    DefocusOverlap out;
    if (r == 0.0) return out;
    const double de = probe.delta_e, ds = density.width;
    const Params p = make_params(plane, probe, ds);
    const double kp2 = p.kappa2 + 0.5 / (de * de);
    const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    // 1 - b e^{-2i alpha} = e^{-i alpha} zeta_b
    const double zb_re = p.one_m_beta * ca, zb_im = p.one_p_beta * sa;
    const double zbar_re = p.one_m_bbar * ca, zbar_im = p.one_p_bbar * sa;
    const double abs_zb = std::hypot(zb_re, zb_im), abs_zbar = std::hypot(zbar_re, zbar_im);
    const double th_b = std::atan2(zb_im, zb_re), th_bar = std::atan2(zbar_im, zbar_re);
    // Delta Gamma r^2 = rho e^{-i psi}
    const double rho = p.kappa2 * p.bbar_minus_beta * r * r / (abs_zb * abs_zbar);
    const double psi = th_b + th_bar;
    const double rc = rho * std::cos(psi), rs = rho * std::sin(psi);
    const double h = std::sin(0.5 * rs);
    const double u0 = std::sqrt(2.0 / kPi) * p.kappa2 / (kp2 * de);
    const double c = ds / (std::sqrt(2.0 * kPi) * de * r);
    const double g = re_gamma(p.kappa2, p.one_m_beta, p.one_p_beta, p.alpha) * r * r;
    // e^{-g} Im{zeta_b (1 - e^{-Delta Gamma r^2})} / |zeta_b|; exponents merged when e^{-rc} is large
    double im;
    if (rc > -1.0) {
        im = std::exp(-g) * (std::sin(th_b) * (2.0 * h * h - std::cos(rs) * std::expm1(-rc)) -
                             std::exp(-rc) * std::cos(th_b) * std::sin(rs));
    } else {
        const double eg = std::exp(-g), egr = std::exp(-g - rc);
        im = std::sin(th_b) * (2.0 * h * h * eg - std::cos(rs) * (egr - eg)) - egr * std::cos(th_b) * std::sin(rs);
    }
    out.re_over_abs = c * im;
    out.re = u0 / abs_zb * std::exp(-g) * out.re_over_abs;
    return out;
}

double defocus_c_n0(int n, const DefocusPlane& plane, const Probe& probe)
{
    if (n < 0) throw std::domain_error("defocus: mode index must be non-negative");
    const Params p = make_params(plane, probe, 0.0);
    const double de = probe.delta_e;
    const double kp2 = p.kappa2 + 0.5 / (de * de);
    return std::sqrt(2.0) / de * std::sqrt(p.kappa2) / kp2 * std::pow(p.beta, n);
}

double defocus_c_tilde(int n, const DefocusPlane& plane, const Probe& probe, const SpinDensity& density)
{
    require_gaussian(density);
    if (n < 0) throw std::domain_error("defocus: mode index must be non-negative");
    const Params p = make_params(plane, probe, density.width);
    const double ds = density.width;
    return std::sqrt(0.5 / (n + 1)) * ds / (2.0 * probe.delta_e) *
           (std::pow(p.bbar, n + 1) - std::pow(p.beta, n + 1));
}

DefocusSeries defocus_series_oracle(double r, const DefocusPlane& plane, const Probe& probe,
                                    const SpinDensity& density, int n_max, double rel_stop)
{
    require_gaussian(density);
    if (n_max < 1) throw std::invalid_argument("defocus series: n_max must be at least 1");
    if (r < 0) throw std::domain_error("defocus: r must be non-negative");
    const Params p = make_params(plane, probe, density.width);
    const double de = probe.delta_e, ds = density.width;
    const double kappa = std::sqrt(p.kappa2);
    const double kp2 = p.kappa2 + 0.5 / (de * de);
    const double x = p.kappa2 * r * r;
    const double damp = std::exp(-0.5 * x);
    const double u_pref = kappa / std::sqrt(kPi) * std::sqrt(2.0) / de * kappa / kp2;
    const double xi_pref = p.kappa2 * r * ds / (std::sqrt(2.0 * kPi) * de);
    const double ab = std::abs(p.beta), abar = std::abs(p.bbar);

    DefocusSeries s;
    double beta_n = 1.0, bbar_n1 = p.bbar, beta_n1 = p.beta;
    // L_n^0 and L_n^1 advanced by their three-term recurrences
    double l0_prev = 0.0, l0 = 1.0, l1_prev = 0.0, l1 = 1.0;
    for (int n = 0; n < n_max; ++n) {
        if (n > 0) {
            const double l0_next = ((2.0 * n - 1.0 - x) * l0 - (n - 1.0) * l0_prev) / n;
            const double l1_next = ((2.0 * n - x) * l1 - double(n) * l1_prev) / n;
            l0_prev = l0;
            l0 = l0_next;
            l1_prev = l1;
            l1 = l1_next;
        }
        const cplx ph0 = std::polar(1.0, -p.alpha * (2.0 * n + 1.0));
        const cplx ph1 = std::polar(1.0, -2.0 * p.alpha * (n + 1.0));
        s.unscattered += ph0 * (u_pref * damp * l0 * beta_n);
        s.xi += cplx(0.0, -1.0) * ph1 * (xi_pref * damp * l1 * (bbar_n1 - beta_n1) / (n + 1.0));
        beta_n *= p.beta;
        bbar_n1 *= p.bbar;
        beta_n1 *= p.beta;
        s.terms = n + 1;
        // |e^{-x/2} L_n| <= 1 and |e^{-x/2} L_n^1| <= n + 1
        const double tail_u = u_pref * std::abs(beta_n) / (1.0 - ab);
        const double tail_x = xi_pref * (std::abs(bbar_n1) / (1.0 - abar) + std::abs(beta_n1) / (1.0 - ab));
        s.tail_bound = tail_u + tail_x;
        const double scale = std::abs(s.unscattered) + std::abs(s.xi);
        if (s.tail_bound <= rel_stop * scale) break;
    }
    return s;
}

}  // namespace spinsense
