#pragma once

#include <array>
#include <map>
#include <string>

#include "spinsense/estimate.hpp"
#include "spinsense/model.hpp"

namespace spinsense {

struct DqNbResult {
    double exact = 0.0;
    double perturbative = 0.0;  // (theta/2) |n_perp| sqrt(calG)
    bool perturbative_valid = true;
};

DqNbResult dq_nb(double theta, double n_perp, const SpinDensity& density, const Probe& probe);

// Binary zero-OAM test: NB 1 - <J0^2>, BA <sin^2(theta g)>.
double d_oam(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe);

// Diffraction-mode coefficient calD; Gaussian closed form, quadrature otherwise.
double d_momentum_coefficient(const SpinDensity& density, const Probe& probe);
double d_momentum_coefficient_quadrature(const SpinDensity& density, const Probe& probe);

double d_momentum_nb(double theta, double n_perp, const SpinDensity& density, const Probe& probe);
double d_momentum_ba(double theta, const Vec3& bloch, const SpinDensity& density, const Probe& probe);

struct DefocusDistance {
    double value = 0.0;
    double tail_bound = 0.0;
    bool valid = true;  // first-order result; false for theta > 1e-2
};

DefocusDistance d_defocus(double z, double f, double theta, double n_perp, const Probe& probe,
                          const SpinDensity& density);

struct DqBaResult {
    double eigen = 0.0;
    double perturbative = 0.0;
    bool perturbative_advisory = false;  // 0 < |c_perp| <= theta/sqrt(8)
    double theta_bar = 0.0;
    std::array<double, 4> eigenvalues{};
};

// Throws std::domain_error when theta_bar = theta sqrt(calG/2) exceeds 0.1.
DqBaResult dq_ba(double theta, const Vec3& bloch, const SpinDensity& density, const Probe& probe);
double dq_ba_perturbative(double theta, double c_perp, double calG, double calF);

double zeta_for_confidence(double cl);
// max(1, ceil((1/d^2 - 1) zeta^2)); double because counts can exceed 64-bit range
double shots_for_confidence(double cl, double d);
double cfi_bound_on_distance(double theta, double info);
double success_probability(double d);

struct DiscriminationReport {
    double dq = 0.0;
    double d_classical = 0.0;
    std::map<std::string, double> d_by_measurement;
    Measurement measurement;
    Mode regime = Mode::NB;
    double shots_required = 0.0;
    double shots_quantum = 0.0;
    double confidence = 0.87;
    bool valid = true;
};

DiscriminationReport discrimination_report(const EstimationConfig& config, double cl);

}  // namespace spinsense
