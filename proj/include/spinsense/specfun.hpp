#pragma once

namespace spinsense {

// Bessel function of the first kind, integer order n >= 0.
double bessel_j(int n, double x);

// Modified Bessel function of the second kind, order 0 or 1, x > 0.
double bessel_k(int n, double x);

// Regular part of K1: K1(x) - 1/x.
double bessel_k1_regular(double x);

// 1 - J0(x), accurate for small x.
double one_minus_j0(double x);

double erf_inv(double x);

// Associated Laguerre polynomial L_n^k(x), k >= 0.
double assoc_laguerre(int n, int k, double x);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace spinsense
