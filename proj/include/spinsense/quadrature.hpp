#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinsense {

struct QuadratureSpec {
    double abs_tol = 1e-300;
    double rel_tol = 1e-11;
    int max_subdivisions = 4000;
    // b = +inf is mapped to [0,1) with x = a + t/(1-t)
    bool semi_infinite_transform = true;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double value, double error)
        : std::runtime_error(what), best_value(value), error_bound(error) {}
    double best_value;
    double error_bound;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (10/21). b may be +infinity.
QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});

// Splits [a,b] at the given interior points first.
QuadResult integrate_pieces(const Integrand& f, std::vector<double> points, const QuadratureSpec& spec = {});

// Integral of |f| over finite [a,b]; sign changes located on a scan grid then refined by bisection.
QuadResult integrate_abs(const Integrand& f, double a, double b, const QuadratureSpec& spec = {},
                         int scan_points = 400);

// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace spinsense
