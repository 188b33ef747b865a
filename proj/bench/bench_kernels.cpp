// Serial reference vs OpenMP kernels: wall time and bitwise agreement.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include <omp.h>

#include "spinsense/estimate.hpp"
#include "spinsense/parallel.hpp"

using namespace spinsense;

namespace {

template <typename F>
double seconds(F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void line(const char* name, double ts, double tp, bool equal)
{
    std::printf("%-22s serial %8.3f s  parallel %8.3f s  speedup %5.2f  %s\n", name, ts, tp, ts / tp,
                equal ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv)
{
    int workers = omp_get_max_threads();
    if (argc > 1) workers = std::stoi(argv[1]);
    std::printf("threads: %d\n", workers);

    {
        Probe p;
        p.delta_e = 1e-9;
        McSpec spec;
        spec.samples = 1000000;
        McResult s, q;
        const double ts = seconds([&] { s = calG_ball_mc_serial(1e-9, p, spec); });
        const double tp = seconds([&] { q = calG_ball_mc(1e-9, p, spec, workers); });
        line("ball Monte Carlo 1e6", ts, tp, same(s.value, q.value) && same(s.std_error, q.std_error));
    }
    {
        const SpinDensity d = SpinDensity::gaussian(1e-9);
        Probe p;
        p.delta_e = 1e-9;
        PixelOptions po;
        po.workers = workers;
        double s = 0, q = 0;
        const double ts = seconds([&] { s = cfi_momentum_pixelated_serial(1e8, 4e9, 1.0, p, d, po); });
        const double tp = seconds([&] { q = cfi_momentum_pixelated(1e8, 4e9, 1.0, p, d, po); });
        line("pixelated CFI", ts, tp, same(s, q));
    }
    {
        const SpinDensity h = SpinDensity::hydrogen(52e-12);
        const std::size_t n = 64;
        auto point = [&](std::size_t i) {
            Probe p;
            p.delta_e = 1e-11 * std::pow(100.0, double(i) / (n - 1));
            return calG(h, p) + calF(h, p);
        };
        std::vector<double> s, q;
        const double ts = seconds([&] { s = serial_map<double>(n, point); });
        const double tp = seconds([&] { q = parallel_map<double>(n, point, workers); });
        bool eq = true;
        for (std::size_t i = 0; i < n; ++i) eq = eq && same(s[i], q[i]);
        line("hydrogen sweep x64", ts, tp, eq);
    }
    return 0;
}
