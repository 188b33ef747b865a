#include "spinsense/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "spinsense/specfun.hpp"

namespace spinsense {

namespace {

constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208798434963, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk21(const Integrand& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = fc * wgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    double fv1[10], fv2[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = h * xgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    const double value = resk * h;
    resabs *= std::abs(h);
    resasc *= std::abs(h);
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
    return {a, b, value, err};
}

QuadResult adapt(const Integrand& f, double a, double b, const QuadratureSpec& spec)
{
    std::priority_queue<Segment> heap;
    Segment first = gk21(f, a, b);
    double total = first.value, err = first.error;
    heap.push(first);
    int splits = 0;
    while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (splits >= spec.max_subdivisions) {
            throw NonConvergence("integrate: subdivision limit reached", total, err);
        }
        const Segment s = heap.top();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            throw NonConvergence("integrate: interval underflow", total, err);
        }
        heap.pop();
        const Segment l = gk21(f, s.a, mid);
        const Segment r = gk21(f, mid, s.b);
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        ++splits;
        // refresh sums periodically to limit drift
        if (splits % 64 == 0) {
            auto copy = heap;
            total = 0.0;
            err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                err += copy.top().error;
                copy.pop();
            }
        }
    }
    if (!std::isfinite(total)) throw NonConvergence("integrate: non-finite integrand", total, err);
    return {total, err};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec)
{
    if (spec.abs_tol <= 0 || spec.rel_tol <= 0 || spec.max_subdivisions < 1)
        throw std::invalid_argument("integrate: invalid quadrature spec");
    if (a == b) return {0.0, 0.0};
    if (std::isinf(b)) {
        if (!spec.semi_infinite_transform || b < 0)
            throw std::invalid_argument("integrate: infinite bound needs the semi-infinite transform");
        Integrand g = [&f, a](double t) {
            if (t >= 1.0) return 0.0;
            const double u = 1.0 - t;
            const double v = f(a + t / u);
            return v == 0.0 ? 0.0 : v / (u * u);
        };
        return adapt(g, 0.0, 1.0, spec);
    }
    return adapt(f, a, b, spec);
}

QuadResult integrate_pieces(const Integrand& f, std::vector<double> points, const QuadratureSpec& spec)
{
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    QuadResult out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const QuadResult part = integrate(f, points[i], points[i + 1], spec);
        out.value += part.value;
        out.error += part.error;
    }
    return out;
}

QuadResult integrate_abs(const Integrand& f, double a, double b, const QuadratureSpec& spec, int scan_points)
{
    if (!(b > a)) return {0.0, 0.0};
    std::vector<double> cuts{a};
    double xprev = a, fprev = f(a);
    for (int i = 1; i <= scan_points; ++i) {
        const double x = a + (b - a) * double(i) / scan_points;
        const double fx = f(x);
        if ((fprev < 0 && fx > 0) || (fprev > 0 && fx < 0)) {
            double lo = xprev, hi = x, flo = fprev;
            for (int it = 0; it < 200 && hi - lo > 4e-16 * std::abs(hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        xprev = x;
        fprev = fx;
    }
    cuts.push_back(b);
    Integrand g = [&f](double x) { return std::abs(f(x)); };
    return integrate_pieces(g, cuts, spec);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace spinsense
