#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "spinsense/model.hpp"
#include "spinsense/montecarlo.hpp"

namespace spinsense {

enum class MeasurementKind { Position, Momentum, Oam, Defocus };

struct Measurement {
    MeasurementKind kind = MeasurementKind::Momentum;
    // Momentum: optional disk radius and pixel side, both as wavenumbers [1/m]; 0 pixel = unbinned
    double q_max = std::numeric_limits<double>::infinity();
    double pixel = 0.0;
    // Defocus plane
    double z = 0.0;
    double f = 2e-3;

    std::string name() const;
};

struct EstimationConfig {
    Sample sample;
    Probe probe;
    SpinDensity density;
    Measurement measurement;
    Constants constants;

    double theta() const;
    double chi() const;
};

// Expectation of h(r) in the probe intensity |psi0|^2: int_0^inf e^{-s} h(delta_e sqrt(2 s)) ds.
double probe_average(const std::function<double(double)>& h, const Probe& probe, const SpinDensity& density);

// calG = 2 <g^2>, calF = 2 sqrt(<g^4>), calV = sqrt(calF^2/calG^2 - 1)/2
double calG(const SpinDensity& density, const Probe& probe);
double calF(const SpinDensity& density, const Probe& probe);
double calG_quadrature(const SpinDensity& density, const Probe& probe, GEval strategy = GEval::ClosedForm);
double calF_quadrature(const SpinDensity& density, const Probe& probe, GEval strategy = GEval::ClosedForm);
double calV(double calG, double calF);

// Gaussian closed forms as functions of chi
double calG_gaussian(double chi);
double g4_gaussian(double chi);  // <g^4>

// Nested Monte Carlo estimate for a uniform ball of radius R.
McResult calG_ball_mc(double radius, const Probe& probe, const McSpec& spec, int workers = 0);
McResult calG_ball_mc_serial(double radius, const Probe& probe, const McSpec& spec);

struct QfiResult {
    double value = 0.0;
    bool valid = true;  // false when a leading-order formula is used outside its regime
};

QfiResult qfi(const EstimationConfig& config);
double qfi_nb(double n_perp, double calG);
double qfi_ba(double calG);

// Zero-OAM likelihood and its complement 1 - P0 (computed without cancellation).
double p0_likelihood(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe);
double p0_complement(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe);
double p0_derivative(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe);
double cfi_oam(Mode mode, double theta, double perp, const SpinDensity& density, const Probe& probe);

// 4 pi perp^2 int_0^q_max q Xi_f(q)^2 dq
double cfi_momentum_restricted(double q_max, double perp, const Probe& probe, const SpinDensity& density);

struct PixelOptions {
    double tol = 1e-8;
    int max_depth = 14;
    int workers = 0;
};

// Square pixels of side `pixel`, central pixel centered on the axis, clipped to the disk q <= q_max.
double cfi_momentum_pixelated(double pixel, double q_max, double perp, const Probe& probe,
                              const SpinDensity& density, const PixelOptions& options = {});
double cfi_momentum_pixelated_serial(double pixel, double q_max, double perp, const Probe& probe,
                                     const SpinDensity& density, const PixelOptions& options = {});

// First-order CFI for a position measurement in a defocus plane (Gaussian densities).
double cfi_defocus(double z, double f, double perp, const Probe& probe, const SpinDensity& density);

QfiResult cfi(const EstimationConfig& config);

class InsensitiveConfiguration : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// ceil(snr^2 / (theta^2 info)); returned as a double since counts may exceed 64-bit range.
double electrons_for_snr(double snr, double theta, double info);

class NonUnimodal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FocusResult {
    double chi = 0.0;
    double calG = 0.0;
};

// Golden-section maximization of calG(chi) on [chi_lo, chi_hi] after a grid pre-scan.
FocusResult optimal_focus(const SpinDensity& density, double chi_lo, double chi_hi, double tol = 1e-6);

struct FisherReport {
    double calG = 0.0;
    double calF = 0.0;
    double qfi_nb = 0.0;
    double qfi_ba = 0.0;
    double cfi = 0.0;
    bool valid = true;
    Measurement measurement;
};

FisherReport fisher_report(const EstimationConfig& config);

}  // namespace spinsense
