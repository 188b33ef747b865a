#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <omp.h>

#include "spinsense/estimate.hpp"
#include "spinsense/quadrature.hpp"
#include "spinsense/scatter.hpp"

namespace spinsense {

namespace {

// Dimensionless momentum k = q delta_e. Per cell:
//   a = int psi_hat^2, b = int k_y Y psi_hat, c = int (k_y Y)^2
// with psi_hat = exp(-(k^2 - k_ref^2)) and Y = (Xi/q)/delta_e^2.
struct Sums {
    double a = 0.0, b = 0.0, c = 0.0;
    Sums& operator+=(const Sums& o)
    {
        a += o.a;
        b += o.b;
        c += o.c;
        return *this;
    }
};

struct Rect {
    double x0, x1, y0, y1;
};

struct Gl8 {
    std::vector<double> x, w;
    Gl8() { gauss_legendre(8, x, w); }
};

const Gl8& gl8()
{
    static const Gl8 rule;
    return rule;
}

class PixelIntegrator {
public:
    PixelIntegrator(std::function<double(double)> y_of_k, double k_max, const PixelOptions& opt)
        : y_(std::move(y_of_k)), k_max_(k_max), opt_(opt)
    {
    }

    Sums bin(const Rect& r) const
    {
        const double kref = nearest(r);
        const Sums whole = rule(r, kref);
        return refine(r, kref, whole, 0, whole);
    }

    static double nearest(const Rect& r)
    {
        const double x = r.x0 > 0 ? r.x0 : (r.x1 < 0 ? -r.x1 : 0.0);
        const double y = r.y0 > 0 ? r.y0 : (r.y1 < 0 ? -r.y1 : 0.0);
        return std::hypot(x, y);
    }

    static double farthest(const Rect& r)
    {
        return std::hypot(std::max(std::abs(r.x0), std::abs(r.x1)), std::max(std::abs(r.y0), std::abs(r.y1)));
    }

private:
    void point(double x, double y, double w, double kref, Sums& s) const
    {
        const double k2 = x * x + y * y;
        const double psi = std::exp(-(k2 - kref * kref));
        const double ky = y * y_(std::sqrt(k2));
        s.a += w * psi * psi;
        s.b += w * ky * psi;
        s.c += w * ky * ky;
    }

    Sums rule(const Rect& r, double kref) const
    {
        Sums s;
        if (nearest(r) >= k_max_) return s;
        const auto& g = gl8();
        const bool inside = farthest(r) <= k_max_;
        const double xa = std::max(r.x0, -k_max_), xb = std::min(r.x1, k_max_);
        const double hx = 0.5 * (xb - xa), cx = 0.5 * (xb + xa);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double x = cx + hx * g.x[i];
            double ya = r.y0, yb = r.y1;
            if (!inside) {
                const double lim = std::sqrt(std::max(0.0, (k_max_ - x) * (k_max_ + x)));
                ya = std::max(ya, -lim);
                yb = std::min(yb, lim);
                if (yb <= ya) continue;
            }
            const double hy = 0.5 * (yb - ya), cy = 0.5 * (yb + ya);
            for (std::size_t j = 0; j < g.x.size(); ++j)
                point(x, cy + hy * g.x[j], g.w[i] * g.w[j] * hx * hy, kref, s);
        }
        return s;
    }

    Sums refine(const Rect& r, double kref, const Sums& whole, int depth, const Sums& scale) const
    {
        const double mx = 0.5 * (r.x0 + r.x1), my = 0.5 * (r.y0 + r.y1);
        const Rect kids[4] = {{r.x0, mx, r.y0, my}, {mx, r.x1, r.y0, my}, {r.x0, mx, my, r.y1}, {mx, r.x1, my, r.y1}};
        Sums parts[4];
        Sums total;
        for (int q = 0; q < 4; ++q) {
            parts[q] = rule(kids[q], kref);
            total += parts[q];
        }
        const bool straddles = nearest(r) < k_max_ && farthest(r) > k_max_;
        const double sa = std::max(scale.a, total.a);
        const double sc = std::max(scale.c, total.c);
        const bool converged = std::abs(total.a - whole.a) <= opt_.tol * sa &&
                               std::abs(total.b - whole.b) <= opt_.tol * std::sqrt(sa * sc);
        if (depth + 1 >= opt_.max_depth || (converged && !(straddles && depth < 4))) return total;
        Sums out;
        for (int q = 0; q < 4; ++q) {
            if (nearest(kids[q]) >= k_max_) continue;
            out += refine(kids[q], kref, parts[q], depth + 1, scale);
        }
        return out;
    }

    std::function<double(double)> y_;
    double k_max_;
    PixelOptions opt_;
};

struct Setup {
    double h = 0.0, k_max = 0.0;
    int m = 0;
    std::function<double(double)> y_of_k;
};

Setup make_setup(double pixel, double q_max, const Probe& probe, const SpinDensity& density)
{
    if (!(pixel > 0)) throw std::domain_error("pixelated CFI: pixel size must be positive");
    if (!(q_max > 0) || !std::isfinite(q_max)) throw std::domain_error("pixelated CFI: q_max must be finite and positive");
    Setup s;
    const double de = probe.delta_e;
    s.h = pixel * de;
    s.k_max = q_max * de;
    s.m = int(std::ceil(s.k_max / s.h - 0.5));
    auto xoq = xi_over_q(probe, density, q_max);
    const double inv = 1.0 / (de * de);
    s.y_of_k = [xoq, de, inv](double k) { return xoq(k / de) * inv; };
    return s;
}

// Quadrant row j (j >= 0), mirrored into the other quadrants by weight.
double row_sum(const PixelIntegrator& pi, const Setup& s, int j)
{
    double sum = 0.0;
    for (int i = 0; i <= s.m; ++i) {
        const Rect r{(i - 0.5) * s.h, (i + 0.5) * s.h, (j - 0.5) * s.h, (j + 0.5) * s.h};
        if (PixelIntegrator::nearest(r) >= s.k_max) break;
        const Sums v = pi.bin(r);
        if (!(v.a > 0)) continue;
        const double weight = (i == 0 ? 1.0 : 2.0) * (j == 0 ? 1.0 : 2.0);
        sum += weight * v.b * v.b / v.a;
    }
    return sum;
}

}  // namespace

double cfi_momentum_pixelated(double pixel, double q_max, double perp, const Probe& probe,
                              const SpinDensity& density, const PixelOptions& options)
{
    const Setup s = make_setup(pixel, q_max, probe, density);
    if (perp == 0.0) return 0.0;
    const PixelIntegrator pi(s.y_of_k, s.k_max, options);
    std::vector<double> rows(s.m + 1, 0.0);
    const int threads = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int j = 0; j <= s.m; ++j) rows[j] = row_sum(pi, s, j);
    double total = 0.0;
    for (double r : rows) total += r;
    return 4.0 * perp * perp * total;
}

double cfi_momentum_pixelated_serial(double pixel, double q_max, double perp, const Probe& probe,
                                     const SpinDensity& density, const PixelOptions& options)
{
    const Setup s = make_setup(pixel, q_max, probe, density);
    if (perp == 0.0) return 0.0;
    const PixelIntegrator pi(s.y_of_k, s.k_max, options);
    std::vector<double> rows(s.m + 1, 0.0);
    for (int j = 0; j <= s.m; ++j) rows[j] = row_sum(pi, s, j);
    double total = 0.0;
    for (double r : rows) total += r;
    return 4.0 * perp * perp * total;
}

}  // namespace spinsense
