#include <cmath>
#include <stdexcept>

#include "spinsense/scatter.hpp"

namespace spinsense {

namespace {

void check_inputs(double theta, const Vec3& c, double calG)
{
    if (theta < 0) throw std::domain_error("BA matrix: theta must be non-negative");
    if (!(calG > 0)) throw std::domain_error("BA matrix: calG must be positive");
    const double len = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    if (len > 1.0 + 1e-12) throw std::domain_error("BA matrix: Bloch vector length exceeds 1");
}

}  // namespace

BaSecondOrderState ba_second_order_matrix(double theta, const Vec3& bloch, double calG, double calV)
{
    check_inputs(theta, bloch, calG);
    BaSecondOrderState s;
    s.theta_bar = theta * std::sqrt(0.5 * calG);
    s.v_param = calV;
    s.bloch = bloch;
    const double tb = s.theta_bar;
    const double t2 = tb * tb;
    const double cp = std::hypot(bloch[0], bloch[1]);
    const double cz = bloch[2];
    auto& m = s.matrix;
    m = {};
    m[0][0] = -t2;
    m[0][1] = m[1][0] = -t2 * calV;
    m[0][3] = m[3][0] = cp * tb / std::sqrt(2.0);
    m[2][2] = 0.5 * t2;
    m[2][3] = m[3][2] = 0.5 * cz * t2;
    m[3][3] = 0.5 * t2;
    return s;
}

CMat4 ba_difference_matrix_unrotated(double theta, const Vec3& bloch, double calG, double calV)
{
    check_inputs(theta, bloch, calG);
    const double tb = theta * std::sqrt(0.5 * calG);
    const double t2 = tb * tb;
    const double cp = std::hypot(bloch[0], bloch[1]);
    const double phi = std::atan2(bloch[1], bloch[0]);
    const double cz = bloch[2];
    const cplx off = std::polar(0.5 * cp * tb, phi);
    CMat4 m{};
    m[0][0] = -t2;
    m[0][1] = m[1][0] = -t2 * calV;
    m[0][2] = off;
    m[2][0] = std::conj(off);
    m[0][3] = std::conj(off);
    m[3][0] = off;
    m[2][2] = 0.5 * (1.0 + cz) * t2;
    m[3][3] = 0.5 * (1.0 - cz) * t2;
    return m;
}

std::pair<double, double> optimal_povm_coefficients(double dq)
{
    if (!(dq > 0) || dq > 1.0) throw std::domain_error("POVM coefficients: trace distance must lie in (0, 1]");
    return {std::sqrt(0.5 * (1.0 + dq)), std::sqrt(0.5 * (1.0 - dq))};
}

}  // namespace spinsense
