#pragma once

#include <complex>
#include <functional>
#include <utility>

#include "spinsense/linalg.hpp"
#include "spinsense/model.hpp"

namespace spinsense {

// Momenta are passed as wavenumbers q = p/hbar [1/m]; amplitudes are normalized per d^2q.

double momentum_amplitude_unscattered(double q, const Probe& probe);

// First-order scattered momentum amplitude. Closed form for Gaussian densities, Hankel quadrature otherwise.
double xi_f(double q, const Probe& probe, const SpinDensity& density);

// Hankel transform int r J1(q r) g(r) psi0(r) dr by quadrature, for any density.
double xi_f_hankel(double q, const Probe& probe, const SpinDensity& density);

// Returns a callable for Xi_f(q)/q on [0, q_max]; tabulated when no closed form exists.
std::function<double(double)> xi_over_q(const Probe& probe, const SpinDensity& density, double q_max);

struct DefocusPlane {
    double z = 0.0;
    double f = 2e-3;
    double k0 = 0.0;

    double alpha() const;
    double kappa_sq() const;
    void validate() const;
};

using cplx = std::complex<double>;

// Unscattered amplitude in the (scaled) defocus plane, requires 0 < z < 2f.
cplx defocus_unscattered(double r, const DefocusPlane& plane, const Probe& probe);

// First-order scattered amplitude in the defocus plane (Gaussian densities).
cplx defocus_xi(double r, const DefocusPlane& plane, const Probe& probe, const SpinDensity& density);

struct DefocusOverlap {
    double re = 0.0;            // Re{<psi0|xi_z> Xi_z(r)}
    double re_over_abs = 0.0;   // the same divided by |<xi_z|psi0>|
};

// Evaluated with the e^{-i alpha} phases removed analytically, so it stays accurate as z -> 0.
DefocusOverlap defocus_overlap(double r, const DefocusPlane& plane, const Probe& probe, const SpinDensity& density);

struct DefocusDecay {
    double unscattered = 0.0;  // Re of the Gaussian exponent coefficient [1/m^2]
    double xi = 0.0;
};
DefocusDecay defocus_decay_rates(const DefocusPlane& plane, const Probe& probe, const SpinDensity& density);

struct DefocusSeries {
    cplx unscattered;
    cplx xi;
    double tail_bound = 0.0;
    int terms = 0;
};

// Partial sums of the Laguerre-mode expansion; stops when the tail bound falls below
// rel_stop times the partial sums or at n_max.
DefocusSeries defocus_series_oracle(double r, const DefocusPlane& plane, const Probe& probe,
                                    const SpinDensity& density, int n_max, double rel_stop = 1e-13);

// Laguerre-mode coefficients used by the series (exposed for tests).
double defocus_c_n0(int n, const DefocusPlane& plane, const Probe& probe);
double defocus_c_tilde(int n, const DefocusPlane& plane, const Probe& probe, const SpinDensity& density);

struct BaSecondOrderState {
    Mat4 matrix{};
    double theta_bar = 0.0;
    double v_param = 0.0;
    Vec3 bloch{0.0, 0.0, 0.0};
};

// Rotated second-order difference matrix in the basis {psi0, psi2, +, -}.
BaSecondOrderState ba_second_order_matrix(double theta, const Vec3& bloch, double calG, double calV);

// The same matrix before the azimuthal rotation; depends on the Bloch azimuth through phases.
CMat4 ba_difference_matrix_unrotated(double theta, const Vec3& bloch, double calG, double calV);

std::pair<double, double> optimal_povm_coefficients(double dq);

}  // namespace spinsense
