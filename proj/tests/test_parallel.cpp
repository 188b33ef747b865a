#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinsense/cli.hpp"
#include "spinsense/estimate.hpp"
#include "spinsense/montecarlo.hpp"
#include "spinsense/parallel.hpp"

using namespace spinsense;

TEST_CASE("Monte Carlo integration does not depend on the worker count")
{
    const McIntegrand f = [](const double* x) { return std::exp(-x[0] * x[1]) * std::cos(x[2]); };
    const std::vector<Interval> box{{0, 1}, {0, 2}, {-1, 1}};
    const McSpec spec{400000, 77, 40};
    const McResult ref = mc_integrate_serial(f, box, spec);
    for (int w : {1, 2, 4, 8}) {
        const McResult r = mc_integrate(f, box, spec, w);
        CHECK(r.value == ref.value);
        CHECK(r.std_error == ref.std_error);
    }
}

TEST_CASE("ball Monte Carlo does not depend on the worker count")
{
    const SpinDensity ball = SpinDensity::ball(1e-9);
    const Probe p = probe_at_chi(ball, 2.0);
    const McSpec spec{100000, 3, 50};
    const McResult ref = calG_ball_mc_serial(1e-9, p, spec);
    for (int w : {1, 3, 8}) {
        const McResult r = calG_ball_mc(1e-9, p, spec, w);
        CHECK(r.value == ref.value);
        CHECK(r.std_error == ref.std_error);
    }
}

TEST_CASE("pixelated CFI does not depend on the worker count")
{
    const SpinDensity d = SpinDensity::gaussian(1e-9);
    const Probe p = probe_at_chi(d, 0.7);
    const double ref = cfi_momentum_pixelated_serial(0.4e9, 4e9, 0.9, p, d);
    for (int w : {1, 2, 4, 8}) {
        PixelOptions o;
        o.workers = w;
        CHECK(cfi_momentum_pixelated(0.4e9, 4e9, 0.9, p, d, o) == ref);
    }
}

TEST_CASE("sweep map keeps grid order")
{
    const SpinDensity h = SpinDensity::hydrogen(52e-12);
    auto point = [&](std::size_t i) { return calG(h, probe_at_chi(h, 0.1 * std::pow(100.0, i / 31.0))); };
    const auto ref = serial_map<double>(32, point);
    for (int w : {1, 4, 8}) CHECK(parallel_map<double>(32, point, w) == ref);
}

TEST_CASE("figure tables do not depend on the worker count")
{
    for (const char* name : {"fig2", "fig5a", "figE1"}) {
        const auto a = cli::run_figure(name, {1, std::nullopt});
        const auto b = cli::run_figure(name, {8, std::nullopt});
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(cli::render_csv(a[i].table) == cli::render_csv(b[i].table));
    }
}
