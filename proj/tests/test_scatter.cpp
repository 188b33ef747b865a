#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinsense/estimate.hpp"
#include "spinsense/scatter.hpp"

using namespace spinsense;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

oracle::Fn profile(const SpinDensity& d)
{
    return [d](double r) { return g_profile(d, r); };
}

}  // namespace

TEST_CASE("unscattered momentum amplitude is normalized")
{
    Probe p;
    p.delta_e = 3e-10;
    const double norm = 2.0 * oracle::pi *
                        oracle::integrate([&](double q) {
                            const double a = momentum_amplitude_unscattered(q, p);
                            return q * a * a;
                        }, 0.0, 8.0 / p.delta_e, 64);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-13));
    const double h0 = oracle::hankel(0, 2e9, p.delta_e, [&](double r) { return oracle::psi0(r, p.delta_e); }, p.delta_e);
    CHECK(rel(momentum_amplitude_unscattered(2e9, p), h0) < 1e-10);
}

TEST_CASE("Gaussian scattered amplitude matches the Hankel transform")
{
    const double ds = 1e-9;
    const SpinDensity d = SpinDensity::gaussian(ds);
    int points = 0;
    for (double c : {0.1, 0.5, 1.0, 1.2, 3.0, 10.0}) {
        const Probe p = probe_at_chi(d, c);
        for (double t : {0.05, 0.4, 1.0, 2.5}) {
            const double q = t / p.delta_e;
            const double ref = oracle::xi_f(q, p.delta_e, [&](double r) { return oracle::g_gaussian(r, ds); }, ds);
            CAPTURE(c);
            CAPTURE(t);
            CHECK(rel(xi_f(q, p, d), ref) < 1e-6);
            CHECK(rel(xi_f_hankel(q, p, d), ref) < 1e-6);
            ++points;
        }
    }
    CHECK(points >= 10);
}

TEST_CASE("Hankel amplitude for ball and hydrogen densities")
{
    for (const SpinDensity& d : {SpinDensity::ball(1e-9), SpinDensity::hydrogen(1e-9)}) {
        const std::vector<double> extra = d.kind == DensityKind::UniformBall ? std::vector<double>{1e-9} : std::vector<double>{};
        for (double c : {0.3, 1.0, 4.0}) {
            const Probe p = probe_at_chi(d, c);
            for (double t : {0.1, 0.8, 2.0}) {
                const double q = t / p.delta_e;
                const double ref = oracle::xi_f(q, p.delta_e, profile(d), 1e-9, extra);
                CAPTURE(d.name());
                CAPTURE(c);
                CAPTURE(t);
                CHECK(rel(xi_f(q, p, d), ref) < 1e-6);
            }
            const auto tab = xi_over_q(p, d, 6.0 / p.delta_e);
            for (double t : {0.3, 1.7, 5.1}) {
                const double q = t / p.delta_e;
                CHECK(rel(tab(q) * q, xi_f(q, p, d)) < 1e-6);
            }
        }
    }
}

TEST_CASE("scattered amplitude is real and nonnegative")
{
    const SpinDensity d = SpinDensity::gaussian(1e-9);
    for (double c : {0.01, 0.3, 1.0, 5.0, 50.0}) {
        const Probe p = probe_at_chi(d, c);
        for (int i = 0; i <= 400; ++i) CHECK(xi_f(i * 0.05 / p.delta_e, p, d) >= 0.0);
    }
}

TEST_CASE("paraxial limit of the three-dimensional transverse amplitude")
{
    // Xi_perp = sqrt(2/pi) ds l_perp with
    // l_perp = chi int dq exp(-chi^2 (p^2 + q^2) - q^2/2) I1(2 chi^2 p q), momenta in units of 1/ds
    const double ds = 50e-12;
    const SpinDensity d = SpinDensity::gaussian(ds);
    for (double c : {0.5, 1.0, 2.0}) {
        const Probe p = probe_at_chi(d, c);
        for (double pt : {0.2, 0.7, 1.5}) {
            const double c2 = c * c;
            auto f = [&](double qt) {
                const double z = 2.0 * c2 * pt * qt;
                // exp(-chi^2 (p - q)^2) e^{-z} I1(z) keeps the factors bounded
                return std::exp(-c2 * (pt - qt) * (pt - qt) - 0.5 * qt * qt) * std::exp(-z) *
                       std::cyl_bessel_i(1.0, z);
            };
            const double l = c * oracle::integrate(f, 0.0, 12.0, 200);
            const double xi3d = std::sqrt(2.0 / oracle::pi) * ds * l;
            CAPTURE(c);
            CAPTURE(pt);
            CHECK(rel(xi_f(pt / ds, p, d), xi3d) < 1e-8);
        }
    }
}

TEST_CASE("defocus amplitudes agree with the mode sums")
{
    const double ds = 20e-9, de = 28e-9, f = 2e-3;
    const SpinDensity d = SpinDensity::gaussian(ds);
    Probe p;
    p.delta_e = de;
    int points = 0;
    for (double zf : {0.25, 0.5, 1.0}) {
        const DefocusPlane plane{zf * f, f, p.k0()};
        const oracle::DefocusModes modes(plane.z, f, p.k0(), de, [&](double r) { return oracle::g_gaussian(r, ds); }, 80);
        CHECK(rel(plane.kappa_sq(), modes.kappa2()) < 1e-12);
        for (int n : {0, 1, 5, 20}) {
            CHECK(std::abs(defocus_c_n0(n, plane, p) - modes.c0(n)) < 1e-9 * std::abs(modes.c0(0)));
            CHECK(std::abs(defocus_c_tilde(n, plane, p, d) - modes.c1(n)) < 1e-9 * std::abs(modes.c1(0)));
        }
        const double kappa = std::sqrt(modes.kappa2());
        for (double rk : {0.1, 1.0, 3.0}) {
            const double r = rk / kappa;
            const cplx u = defocus_unscattered(r, plane, p);
            const cplx x = defocus_xi(r, plane, p, d);
            const cplx uo = modes.unscattered(r), xo = modes.xi(r);
            CAPTURE(zf);
            CAPTURE(rk);
            CHECK(std::abs(u - uo) < 1e-6 * std::abs(uo));
            CHECK(std::abs(x - xo) < 1e-6 * std::abs(xo));

            const DefocusSeries s = defocus_series_oracle(r, plane, p, d, 200);
            CHECK(std::abs(s.unscattered - u) <= s.tail_bound + 1e-9 * std::abs(u));
            CHECK(std::abs(s.xi - x) <= s.tail_bound + 1e-9 * std::abs(x));

            const DefocusOverlap o = defocus_overlap(r, plane, p, d);
            const double re = (std::conj(u) * x).real();
            CHECK(std::abs(o.re - re) < 1e-9 * std::abs(u) * std::abs(x));
            CHECK(std::abs(o.re_over_abs - re / std::abs(u)) < 1e-9 * std::abs(x));
            ++points;
        }
    }
    CHECK(points >= 9);
}

TEST_CASE("defocus plane parameters")
{
    Probe p;
    DefocusPlane plane{1e-3, 2e-3, p.k0()};
    CHECK(plane.alpha() == doctest::Approx(oracle::pi / 3.0).epsilon(1e-14));
    plane.z = 2e-3;
    CHECK(plane.alpha() == doctest::Approx(oracle::pi / 2.0).epsilon(1e-14));
    CHECK(plane.kappa_sq() == doctest::Approx(p.k0() / 2e-3).epsilon(1e-14));
    plane.z = 4e-3;
    CHECK_THROWS_AS(plane.validate(), std::domain_error);
    plane.z = 0.0;
    CHECK_THROWS_AS(plane.validate(), std::domain_error);
}

TEST_CASE("backaction difference matrix")
{
    const SpinDensity d = SpinDensity::gaussian(1e-9);
    const Probe p = probe_at_chi(d, 1.2);
    const double G = calG(d, p), F = calF(d, p), V = calV(G, F);
    for (double tb : {1e-2, 3e-3, 1e-3}) {
        const double theta = tb / std::sqrt(G / 2.0);
        for (double cp : {0.2, 0.5, 0.9}) {
            for (double phi : {0.0, 0.7, 2.0}) {
                const Vec3 c{cp * std::cos(phi), cp * std::sin(phi), 0.3};
                const BaSecondOrderState st = ba_second_order_matrix(theta, c, G, V);
                CHECK(rel(st.theta_bar, tb) < 1e-12);
                double trace = 0.0;
                for (int i = 0; i < 4; ++i) {
                    trace += st.matrix[i][i];
                    for (int j = 0; j < 4; ++j) CHECK(st.matrix[i][j] == st.matrix[j][i]);
                }
                CHECK(std::abs(trace) < 1e-14);
                const auto ev = symmetric_eigenvalues(st.matrix);
                CHECK(std::abs(ev[0] + ev[1] + ev[2] + ev[3]) < 1e-14);

                // perturbative list, ascending: -|c|tb/sqrt2 - tb^2/4, O(tb^3), tb^2/2 or +|c|tb/sqrt2 - tb^2/4
                std::vector<double> expect{-cp * tb / std::sqrt(2.0) - tb * tb / 4.0, 0.0,
                                           cp * tb / std::sqrt(2.0) - tb * tb / 4.0, tb * tb / 2.0};
                std::sort(expect.begin(), expect.end());
                for (int i = 0; i < 4; ++i) CHECK(std::abs(ev[i] - expect[i]) < 10.0 * tb * tb * tb);

                const auto hv = hermitian_eigenvalues(ba_difference_matrix_unrotated(theta, c, G, V));
                for (int i = 0; i < 4; ++i) CHECK(std::abs(hv[i] - ev[i]) < 1e-14);
            }
        }
    }
}

TEST_CASE("optimal measurement coefficients")
{
    for (double dq : {1e-6, 0.1, 0.5, 1.0}) {
        const auto [a, b] = optimal_povm_coefficients(dq);
        CHECK(a * a + b * b == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(a * a - b * b == doctest::Approx(dq).epsilon(1e-12));
    }
    CHECK_THROWS(optimal_povm_coefficients(0.0));
    CHECK_THROWS(optimal_povm_coefficients(1.5));
}
