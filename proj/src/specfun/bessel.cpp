#include "spinsense/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace spinsense {

namespace {

double j_series(int n, double x)
{
    const double h = 0.5 * x;
    const double q = -h * h;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= h / k;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * double(k + n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel expansion, truncated at the smallest term.
double j_asymptotic(int n, double x)
{
    const double mu = 4.0 * n * n;
    double p = 1.0, q = 0.0;
    double a = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 80; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = a * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) > std::abs(prev) || next == 0.0) break;
        a = next;
        prev = a;
        const int m = k / 2;
        const double s = (m % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 1)
            q += s * a;
        else
            p += s * a;
        if (std::abs(a) < 1e-17) break;
    }
    const double w = x - (0.5 * n + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(w) - q * std::sin(w));
}

// Backward recurrence normalized by J0 + 2*sum J_2k = 1.
double j_miller(int n, double x)
{
    const int big = std::max(n, int(x));
    int top = big + 20 + int(std::sqrt(60.0 * big));
    if (top % 2) ++top;
    double jp = 0.0, j = 1e-300, norm = 0.0, result = 0.0;
    for (int k = top; k > 0; --k) {
        const double jm = (2.0 * k / x) * j - jp;
        jp = j;
        j = jm;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        if (k - 1 == n) result = j;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    }
    norm += j;
    return result / norm;
}

// (x^2/4)^k / (k!)^2 weighted sums used by the K series.
struct KSeries {
    double i0 = 0, i1_over_half_x = 0, k0_tail = 0, k1_tail = 0;
};

KSeries k_series(double x)
{
    const double q = 0.25 * x * x;
    KSeries s;
    double t0 = 1.0;  // q^k/(k!)^2
    double t1 = 1.0;  // q^k/(k!(k+1)!)
    double hk = 0.0;
    for (int k = 0; k < 100; ++k) {
        if (k > 0) {
            t0 *= q / (double(k) * k);
            t1 *= q / (double(k) * (k + 1));
            hk += 1.0 / k;
        }
        const double hk1 = hk + 1.0 / (k + 1);
        s.i0 += t0;
        s.i1_over_half_x += t1;
        s.k0_tail += hk * t0;
        s.k1_tail += (hk + hk1 - 2.0 * kEulerGamma) * t1;
        if (t0 < 1e-18 * s.i0 && k > 2) break;
    }
    return s;
}

// Continued fraction of Steed/Temme for x >= 2, returns K0 and K1.
void k_continued_fraction(double x, double& k0, double& k1)
{
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 10000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) break;
    }
    h = a1 * h;
    k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace

double bessel_j(int n, double x)
{
    if (n < 0) throw std::domain_error("bessel_j: negative order");
    if (!std::isfinite(x)) throw std::domain_error("bessel_j: non-finite argument");
    const double sign = (x < 0 && (n % 2)) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
    double v;
    if (ax < 8.0)
        v = j_series(n, ax);
    else if (ax >= std::max(25.0, 4.0 * n * n + 8.0))
        v = j_asymptotic(n, ax);
    else
        v = j_miller(n, ax);
    return sign * v;
}

double one_minus_j0(double x)
{
    if (std::abs(x) >= 1.0) return 1.0 - bessel_j(0, x);
    const double q = -0.25 * x * x;
    double term = -q;
    double sum = term;
    for (int k = 2; k < 40; ++k) {
        term *= q / (double(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double bessel_k1_regular(double x)
{
    if (!(x > 0)) throw std::domain_error("bessel_k: argument must be positive");
    if (x > 2.0) return bessel_k(1, x) - 1.0 / x;
    const KSeries s = k_series(x);
    const double l = std::log(0.5 * x);
    return l * 0.5 * x * s.i1_over_half_x - 0.25 * x * (s.k1_tail);
}

double bessel_k(int n, double x)
{
    if (n != 0 && n != 1) throw std::domain_error("bessel_k: order must be 0 or 1");
    if (!(x > 0)) throw std::domain_error("bessel_k: argument must be positive");
    if (x <= 2.0) {
        const KSeries s = k_series(x);
        const double l = std::log(0.5 * x);
        if (n == 0) return -(l + kEulerGamma) * s.i0 + s.k0_tail;
        return 1.0 / x + bessel_k1_regular(x);
    }
    double k0, k1;
    k_continued_fraction(x, k0, k1);
    return n == 0 ? k0 : k1;
}

}  // namespace spinsense
