#include "spinsense/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace spinsense {

std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n, double tol)
{
    auto at = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale > 0.0) {
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
            if (std::sqrt(off) <= tol * scale * 1e-2) break;
            for (int p = 0; p < n; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const double apq = at(p, q);
                    if (std::abs(apq) < 1e-300) continue;
                    const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                    const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    for (int k = 0; k < n; ++k) {
                        const double akp = at(k, p), akq = at(k, q);
                        at(k, p) = c * akp - s * akq;
                        at(k, q) = s * akp + c * akq;
                    }
                    for (int k = 0; k < n; ++k) {
                        const double apk = at(p, k), aqk = at(q, k);
                        at(p, k) = c * apk - s * aqk;
                        at(q, k) = s * apk + c * aqk;
                    }
                    at(p, q) = at(q, p) = 0.0;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::array<double, 4> symmetric_eigenvalues(const Mat4& m)
{
    std::vector<double> a(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[i * 4 + j] = 0.5 * (m[i][j] + m[j][i]);
    const auto ev = jacobi_eigenvalues(a, 4);
    return {ev[0], ev[1], ev[2], ev[3]};
}

std::array<double, 4> hermitian_eigenvalues(const CMat4& m)
{
    std::vector<double> a(64);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const std::complex<double> h = 0.5 * (m[i][j] + std::conj(m[j][i]));
            a[i * 8 + j] = h.real();
            a[(i + 4) * 8 + (j + 4)] = h.real();
            a[i * 8 + (j + 4)] = -h.imag();
            a[(i + 4) * 8 + j] = h.imag();
        }
    }
    const auto ev = jacobi_eigenvalues(a, 8);
    // each eigenvalue appears twice in the embedding
    return {ev[0], ev[2], ev[4], ev[6]};
}

}  // namespace spinsense
