#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsense/estimate.hpp"

namespace spinsense {

namespace {

// One sample of the Theta-constrained inner integral at dimensionless radius rt (units of R).
// z is mapped through s in (-1,1) with rho = rt/sqrt(1-s^2); tau is drawn from its allowed range.
double inner_sample(double rt, const double* u)
{
    const double s = 2.0 * u[0] - 1.0;
    const double one_m_s2 = (1.0 - s) * (1.0 + s);
    const double rho = rt / std::sqrt(one_m_s2);
    const double jac = 2.0 / one_m_s2;
    const double lo = std::max(0.0, rho - 1.0), hi = rho + 1.0;
    const double x = lo + (hi - lo) * u[1];
    const double tmin = std::clamp((x * x + rho * rho - 1.0) / (2.0 * x * rho), -1.0, 1.0);
    const double tau = tmin + (1.0 - tmin) * u[2];
    return jac * (hi - lo) * (1.0 - tmin) * tau;
}

McIntegrand ball_integrand(double c)
{
    return [c](const double* u) {
        const double rt = c * std::sqrt(-2.0 * std::log(u[0]));
        return 1.125 * rt * rt * inner_sample(rt, u + 1) * inner_sample(rt, u + 4);
    };
}

double ball_chi(double radius, const Probe& probe, const McSpec& spec)
{
    if (!(radius > 0)) throw std::invalid_argument("ball MC: radius must be positive");
    if (!(probe.delta_e > 0)) throw std::invalid_argument("ball MC: delta_e must be positive");
    if (spec.samples < 10000) throw std::invalid_argument("ball MC: need at least 1e4 samples");
    return probe.delta_e / radius;
}

const std::vector<Interval> kCube(7, Interval{0.0, 1.0});

}  // namespace

McResult calG_ball_mc(double radius, const Probe& probe, const McSpec& spec, int workers)
{
    return mc_integrate(ball_integrand(ball_chi(radius, probe, spec)), kCube, spec, workers);
}

McResult calG_ball_mc_serial(double radius, const Probe& probe, const McSpec& spec)
{
    return mc_integrate_serial(ball_integrand(ball_chi(radius, probe, spec)), kCube, spec);
}

}  // namespace spinsense
