#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "spinsense/model.hpp"

using namespace spinsense;

namespace {

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const double kWidth = 1e-9;

std::vector<SpinDensity> builtins()
{
    return {SpinDensity::gaussian(kWidth), SpinDensity::ball(kWidth), SpinDensity::hydrogen(kWidth)};
}

oracle::Fn density_oracle(const SpinDensity& d)
{
    switch (d.kind) {
    case DensityKind::Gaussian: return [](double r) { return oracle::p_gaussian(r, kWidth); };
    case DensityKind::UniformBall: return [](double r) { return oracle::p_ball(r, kWidth); };
    default: return [](double r) { return oracle::p_hydrogen(r, kWidth); };
    }
}

oracle::Fn regularizer_oracle(const SpinDensity& d)
{
    switch (d.kind) {
    case DensityKind::Gaussian: return [](double x) { return oracle::f_gaussian(x, kWidth); };
    case DensityKind::UniformBall: return [](double x) { return oracle::f_ball(x, kWidth); };
    default: return [](double x) { return oracle::f_hydrogen(x, kWidth); };
    }
}

}  // namespace

TEST_CASE("classical electron radius from the constants")
{
    const Constants c;
    CHECK(rel(c.derived_r_e(), c.r_e) < 1e-3);
    CHECK(c.r_e == doctest::Approx(2.8e-15).epsilon(0.01));
}

TEST_CASE("built-in densities are normalized")
{
    for (const auto& d : builtins()) {
        CHECK(std::abs(d.normalization() - 1.0) < 1e-6);
        const auto p = density_oracle(d);
        const double edge = d.kind == DensityKind::UniformBall ? kWidth : 0.0;
        std::vector<double> pts{0.0, 0.5 * kWidth, kWidth, 2 * kWidth, 5 * kWidth, 10 * kWidth, 40 * kWidth};
        if (edge > 0) pts.push_back(edge);
        const double norm = 4.0 * oracle::pi * oracle::integrate_split([&](double r) { return r * r * p(r); }, pts, 16);
        CHECK(std::abs(norm - 1.0) < 1e-10);
        for (double r : {0.0, 0.3e-9, 0.99e-9, 1.5e-9, 3e-9}) CHECK(d.density(r) == doctest::Approx(p(r)).epsilon(1e-13));
    }
}

TEST_CASE("custom densities are checked")
{
    const auto shell = [](double r) { return oracle::p_gaussian(r, kWidth); };
    const SpinDensity ok = SpinDensity::custom_radial(shell, kWidth, INFINITY, kWidth);
    CHECK(std::abs(ok.normalization() - 1.0) < 1e-6);
    CHECK_THROWS_AS(SpinDensity::custom_radial(shell, kWidth, INFINITY, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SpinDensity::custom_radial([](double r) { return 2.0 * oracle::p_gaussian(r, kWidth); }, kWidth,
                                               INFINITY, kWidth),
                    std::invalid_argument);
    CHECK_THROWS_AS(SpinDensity::gaussian(0.0), std::invalid_argument);
    // a custom Gaussian reproduces the built-in regularizer and profile
    const SpinDensity g = SpinDensity::gaussian(kWidth);
    for (double x : {0.2e-9, 1e-9, 3e-9}) {
        CHECK(rel(regularizer(ok, x), regularizer(g, x)) < 1e-8);
        CHECK(rel(g_profile(ok, x), g_profile(g, x)) < 1e-7);
    }
}

TEST_CASE("closed-form regularizers match the double-integral definition")
{
    for (const auto& d : builtins()) {
        const auto p = density_oracle(d);
        const double edge = d.kind == DensityKind::UniformBall ? kWidth : 0.0;
        const double reach = d.kind == DensityKind::UniformBall ? kWidth : 40.0 * kWidth;
        for (double x : {0.05e-9, 0.3e-9, 0.9e-9, 1.0e-9, 1.7e-9, 4e-9}) {
            const double ref = oracle::regularizer_eq2(p, x, edge, reach);
            CAPTURE(d.name());
            CAPTURE(x);
            CHECK(rel(regularizer(d, x), ref) < 1e-6);
            CHECK(rel(regularizer_quadrature(d, x), ref) < 1e-6);
        }
    }
}

TEST_CASE("regularizer is nondecreasing and saturates")
{
    for (const auto& d : builtins()) {
        double prev = 0.0;
        bool monotone = true;
        for (int i = 0; i <= 1000; ++i) {
            const double v = regularizer(d, 20.0 * kWidth * i / 1000.0);
            if (v < prev) monotone = false;
            prev = v;
        }
        CHECK(monotone);
        CHECK(regularizer(d, 0.0) == 0.0);
        CHECK(std::abs(regularizer(d, 40.0 * kWidth) - 1.0) < 1e-12);
    }
}

TEST_CASE("interaction profile agrees with the angular integral over F")
{
    for (const auto& d : builtins()) {
        const auto F = regularizer_oracle(d);
        const double edge = d.kind == DensityKind::UniformBall ? kWidth : 0.0;
        for (double r : log_grid(1e-3 * kWidth, 30.0 * kWidth, 20)) {
            const double ref = oracle::g_from_regularizer(F, r, kWidth, edge);
            CAPTURE(d.name());
            CAPTURE(r);
            CHECK(rel(g_profile(d, r), ref) < 1e-8);
            CHECK(rel(g_profile_numeric(d, r), ref) < 1e-8);
        }
    }
    for (double r : log_grid(1e-3 * kWidth, 30.0 * kWidth, 20))
        CHECK(rel(g_profile(SpinDensity::gaussian(kWidth), r), oracle::g_gaussian(r, kWidth)) < 1e-12);
}

TEST_CASE("interaction profile shape")
{
    for (const auto& d : builtins()) {
        CHECK(g_profile(d, 0.0) == 0.0);
        int maxima = 0;
        double a = g_profile(d, 0.0), b = g_profile(d, 0.01 * kWidth);
        bool nonneg = true;
        for (int i = 2; i <= 2000; ++i) {
            const double c = g_profile(d, 0.01 * kWidth * i);
            if (c < 0) nonneg = false;
            if (b > a && b > c) ++maxima;
            a = b;
            b = c;
        }
        CHECK(nonneg);
        if (d.kind != DensityKind::Hydrogen1s) CHECK(maxima == 1);
        // dipole tail
        CHECK(std::abs(1e3 * kWidth * g_profile(d, 1e3 * kWidth) / kWidth - 1.0) < 1e-9);
    }
    // continuity across the small-r branch
    for (const auto& d : builtins()) {
        const double r = 1e-4 * kWidth;
        CHECK(rel(g_profile(d, r * (1 - 1e-9)), g_profile(d, r * (1 + 1e-9))) < 1e-7);
    }
}

TEST_CASE("coupling strength and focus ratio")
{
    const Constants c;
    Sample s;
    s.moment_bohr = 1.0;
    CHECK(theta(s, SpinDensity::gaussian(50e-12)) == doctest::Approx(c.r_e / 50e-12).epsilon(1e-14));
    CHECK(theta(s, SpinDensity::gaussian(50e-12)) == doctest::Approx(5.6359e-5).epsilon(1e-4));
    s.moment_bohr = 100.0;
    CHECK(theta(s, SpinDensity::gaussian(1e-9)) == doctest::Approx(2.818e-4).epsilon(1e-3));

    Probe p;
    p.delta_e = 2e-9;
    CHECK(chi(p, SpinDensity::ball(0.5e-9)) == doctest::Approx(4.0));
    CHECK(probe_at_chi(SpinDensity::hydrogen(52e-12), 0.5).delta_e == doctest::Approx(26e-12));
    CHECK(p.k0() == doctest::Approx(2.0 * oracle::pi / 2.5e-12).epsilon(1e-15));
    p.delta_e = 0.5e-12;
    CHECK_FALSE(p.paraxial_ok());
}

TEST_CASE("sample orientation checks")
{
    Sample s;
    s.orientation = {0.6, 0.8, 0.0};
    CHECK_NOTHROW(s.validate());
    CHECK(s.perp() == doctest::Approx(1.0));
    s.orientation = {0.6, 0.0, 0.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.mode = Mode::BA;
    CHECK_NOTHROW(s.validate());
    CHECK(s.perp() == doctest::Approx(0.6));
    s.orientation = {1.0, 0.1, 0.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.orientation = {0.0, 0.0, 1.0};
    s.moment_bohr = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
