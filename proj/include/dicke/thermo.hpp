#pragma once

#include "dicke/model.hpp"

#include <vector>

namespace dicke {

/// Frequencies only; the thermodynamic limit has no N.
struct Frequencies {
    double omega = 1.0;
    double omega0 = 1.0;

    Frequencies() = default;
    Frequencies(double omega, double omega0);
    explicit Frequencies(const ModelParams& p) : Frequencies(p.omega, p.omega0) {}

    double lambda_cr() const;
};

enum class Phase { normal, superradiant };

/// Mean-field plus polariton quantities at one coupling, N -> infinity.
///
/// The reduced state of either subsystem is a thermal oscillator with
/// frequency Omega and inverse temperature beta. Everything here is carried
/// through coth_half = coth(beta Omega / 2) = (e^{beta Omega} + 1)/(e^{beta Omega} - 1).
struct ThermoPoint {
    Frequencies freq;
    double lambda = 0.0;
    Phase phase = Phase::normal;
    double mu = 1.0;
    double alpha_s2_per_N = 0.0;  // (1 - mu) / 2
    double beta_s2_per_N = 0.0;   // (lambda/omega)^2 (1 - mu^2)
    double eps1 = 0.0, eps2 = 0.0;
    double gamma = 0.0;           // mixing angle, 2 gamma in [0, pi]
    double c = 1.0, s = 0.0;
    double omega_tilde = 0.0;     // omega0 (1 + mu) / (2 mu)
    double Omega_atoms = 0.0;
    double Omega_field = 0.0;
    double coth_half = 1.0;       // +inf at the critical point
    double exp_bOmega_atoms = 0.0;
    double exp_bOmega_field = 0.0;
    bool critical = false;        // eps1 == 0: Omega and e^{beta Omega} are singular

    // omega0/mu squared minus omega squared; recurs in every closed form
    double detuning() const;
};

ThermoPoint thermo_point(const Frequencies& freq, double lambda);

/// xi^2 = (mu / 2 omega0) [eps1 + eps2 + (omega0^2/mu^2 - omega^2)/(eps1 + eps2)]
double xi2_thermo(const ThermoPoint& pt);

/// F_A = N mu^2 / xi^2. Pass n_atoms = 1 for F_A / N.
double qfi_atoms_thermo(const ThermoPoint& pt, double n_atoms);

/// (Delta X_{pi/2})^2 = (1 / 8 omega) [eps1 + eps2 - (omega0^2/mu^2 - omega^2)/(eps1 + eps2)]
double quad_variance_thermo(const ThermoPoint& pt);

/// Mean boson number. n_atoms may be +infinity.
double nbar_thermo(const ThermoPoint& pt, double n_atoms);

/// The N-independent fluctuation part of nbar.
double nbar_fluctuation(const ThermoPoint& pt);

struct FieldQfiThermo {
    double value = 0.0;   // F_B, may be +inf
    double nbar = 0.0;    // may be +inf
    double scaled = 0.0;  // F_B / (4 nbar); NaN at lambda = 0
    bool guard_band = false;
};

/// Guard band around lambda_cr, relative to lambda_cr.
constexpr double kCriticalGuard = 1e-8;

FieldQfiThermo qfi_field_thermo(const ThermoPoint& pt, double n_atoms);

/// F_B / (4 nbar) with N -> infinity.
double field_scaled_limit(const ThermoPoint& pt);

// Critical scaling ------------------------------------------------------------

enum class Side { below, above };

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;  // rms deviation in log space
    bool low_confidence = false;
};

/// Least-squares fit of log|y| = log a + p log x + sum_c b_c x^{c/2}.
/// With corrections = 0 this is the plain log-log slope.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          double residual_threshold = 0.1, int corrections = 0);

struct ScalingOptions {
    int points = 25;
    double distance_min = 1e-6;  // |lambda - lambda_cr| range, log-spaced
    double distance_max = 1e-3;
    double step = 1e-9;          // central-difference step, relative to lambda_cr
    double residual_threshold = 0.1;
    int corrections = 2;  // sqrt(d) and d terms in the fit
};

struct ScalingReport {
    Side side = Side::below;
    PowerLawFit eps1;
    PowerLawFit atoms_qfi;  // d/dlambda (F_A / N)
    PowerLawFit field_qfi;  // d/dlambda (F_B / 4 nbar), N -> infinity
    bool low_confidence() const {
        return eps1.low_confidence || atoms_qfi.low_confidence || field_qfi.low_confidence;
    }
};

ScalingReport critical_scaling_probe(const Frequencies& freq, Side side,
                                     const ScalingOptions& opt = {});

/// Limits of the finite-N ground state as lambda -> infinity, where each
/// subsystem is an equal mixture of two coherent states.
struct UltrastrongReference {
    double alpha0 = 0.0;               // lambda sqrt(N) / omega
    double qfi_atoms = 0.0;            // F_A -> 0
    double field_scaled = 1.0;         // F_B / (4 nbar) -> 1
    double nbar = 0.0;                 // alpha0^2
    double var_jy = 0.0;               // N / 4
    double var_x_pi2 = 0.25;
    double var_x0 = 0.0;               // alpha0^2 + 1/4
    double var_jx = 0.0;               // N^2 / 4
};

UltrastrongReference ultrastrong_reference(const ModelParams& params);

} // namespace dicke
