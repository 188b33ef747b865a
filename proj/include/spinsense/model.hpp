#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>

namespace spinsense {

struct Constants {
    double r_e = 2.8179403262e-15;      // m
    double mu_B = 9.2740100783e-24;     // J/T
    double hbar = 1.054571817e-34;      // J s
    double mu0 = 1.25663706212e-6;      // N/A^2
    double e_charge = 1.602176634e-19;  // C
    double m_e = 9.1093837015e-31;      // kg

    // mu0 e^2 / (4 pi m_e)
    double derived_r_e() const;
};

enum class DensityKind { Gaussian, UniformBall, Hydrogen1s, CustomRadial };

struct SpinDensity {
    DensityKind kind = DensityKind::Gaussian;
    double width = 1e-9;  // Gaussian sigma, ball radius, Bohr radius, or custom scale [m]

    // CustomRadial only: P_s(r) in m^-3 and a truncation hint
    std::function<double(double)> custom;
    double support_radius = std::numeric_limits<double>::infinity();
    double decay_length = 0.0;

    static SpinDensity gaussian(double delta_s);
    static SpinDensity ball(double radius);
    static SpinDensity hydrogen(double a0);
    static SpinDensity custom_radial(std::function<double(double)> density, double width, double support_radius,
                                     double decay_length);

    double density(double r) const;
    // radius beyond which P_s is negligible (used as a quadrature cutoff)
    double cutoff() const;
    // 4 pi int r^2 P_s dr
    double normalization() const;
    std::string name() const;
};

struct Probe {
    double delta_e = 1e-9;       // m
    double lambda0 = 2.5e-12;    // m
    double energy_keV = 200.0;

    double k0() const;
    bool paraxial_ok() const { return delta_e >= 1e-12; }
};

enum class Mode { NB, BA };

using Vec3 = std::array<double, 3>;

struct Sample {
    double moment_bohr = 1.0;
    Mode mode = Mode::NB;
    Vec3 orientation{1.0, 0.0, 0.0};  // n for NB, Bloch vector c for BA

    double perp() const;
    double parallel() const { return orientation[2]; }
    double azimuth() const;
    void validate() const;
};

enum class GEval { ClosedForm, Numeric };

struct InteractionProfile {
    SpinDensity density;
    GEval strategy = GEval::ClosedForm;
    double operator()(double r) const;
};

double chi(const Probe& probe, const SpinDensity& density);

// Probe with delta_e = chi * width.
Probe probe_at_chi(const SpinDensity& density, double chi, const Probe& base = {});

double regularizer(const SpinDensity& density, double x);

// Double quadrature over the density (what CustomRadial uses).
double regularizer_quadrature(const SpinDensity& density, double x);

double g_profile(const SpinDensity& density, double r);

// z-quadrature over the regularizer.
double g_profile_numeric(const SpinDensity& density, double r);

double theta(const Sample& sample, const SpinDensity& density, const Constants& constants = {});

}  // namespace spinsense
