#pragma once

#include "dicke/states.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace dicke {

enum class Generator { field_number, atoms_jx, custom };

std::string_view to_string(Generator g);

struct QfiResult {
    double value = 0.0;            // F
    double scaled = 0.0;           // F/(4 nbar) or F/N; NaN when undefined
    Generator generator = Generator::custom;
    double variance_term = 0.0;    // 4 sum_n p_n (Delta G)^2_n
    double correction_term = 0.0;  // sum_{m != n} 8 p_m p_n / (p_m + p_n) |G_mn|^2
    double mean = 0.0;             // Tr(rho G); nbar for the field
    double discarded_mass = 0.0;   // weight below the spectral floor
};

struct SqueezingResult {
    double variance_min = 0.0;
    double variance_other = 0.0;  // at the other candidate angle
    double optimal_angle = 0.0;   // 0 or pi/2
    double xi2 = 0.0;
    std::array<cplx, 3> raw_moments{};
};

/// Mixed-state QFI from the spectral decomposition of rho:
///   F = 4 sum_n p_n (Delta G)^2_n - sum_{m != n} 8 p_m p_n / (p_m + p_n) |<m|G|n>|^2
/// with both sums over retained weights. (Delta G)^2_n uses G on the whole
/// truncated space.
QfiResult qfi_mixed(const SpectralDecomposition& decomp, const HermitianOperator& g);

/// Independent check of qfi_mixed via the symmetric-logarithmic-derivative
/// form sum_{m,n} 2 (p_m - p_n)^2 / (p_m + p_n) |<m|G|n>|^2. The retained
/// eigenvectors are completed to an orthonormal basis with zero weights.
double sld_qfi_oracle(const SpectralDecomposition& decomp, const HermitianOperator& g);

/// Field QFI for the phase generator b^dagger b; scaled = F / (4 nbar).
QfiResult qfi_field(const DensityMatrix& rho_b);

/// Atomic QFI of a Ramsey sequence, evaluated with the rotated generator J_x.
/// scaled = F / N.
QfiResult qfi_atoms(const DensityMatrix& rho_a);

/// (Delta X_sigma)^2 for X_sigma = (b e^{-i sigma} + b^dagger e^{i sigma}) / 2.
double quadrature_variance(const DensityMatrix& rho_b, double sigma);

/// Chooses sigma in {0, pi/2}; ties go to pi/2. xi2 holds 4 (Delta X_{pi/2})^2.
SqueezingResult optimal_quadrature(const DensityMatrix& rho_b);

/// (Delta J_phi)^2 for J_phi = J_x cos(phi) + J_y sin(phi).
double spin_variance(const DensityMatrix& rho_a, double phi);

/// xi^2 = 4 (Delta J_y)^2 / N, plus the better of phi in {0, pi/2}.
SqueezingResult spin_squeezing_xi2(const DensityMatrix& rho_a);

// Husimi distributions ------------------------------------------------------

struct AlphaGrid {
    std::vector<double> re, im;

    static AlphaGrid square(double half_width, int points);
    // half-width 1.5 (sqrt(nbar) + 2), 201 x 201
    static AlphaGrid for_mean_number(double nbar, int points = 201);
};

struct SphereGrid {
    std::vector<double> theta;  // [0, pi], endpoints included
    std::vector<double> phi;    // [0, 2 pi), endpoint excluded

    static SphereGrid uniform(int n_theta = 181, int n_phi = 181);
};

struct HusimiMap {
    std::vector<double> x, y;
    Eigen::MatrixXd values;  // values(i, j) at (x[i], y[j])
    double max = 0.0;
    double x_at_max = 0.0, y_at_max = 0.0;

    Eigen::MatrixXd normalized() const { return values / max; }
};

/// <n|alpha> for n = 0..n_max, evaluated in log space.
Eigen::VectorXcd coherent_amplitudes(cplx alpha, int n_max);

/// <j,m|theta,phi> for m = -j..j with |theta=0> = |j,-j>.
Eigen::VectorXcd spin_coherent_amplitudes(double theta, double phi, int n_atoms);

/// Q_B(alpha) = <alpha|rho_B|alpha>; x = Re alpha, y = Im alpha.
HusimiMap husimi_field(const DensityMatrix& rho_b, const AlphaGrid& grid);

/// Q_A(theta, phi) = <theta,phi|rho_A|theta,phi>; x = theta, y = phi.
HusimiMap husimi_atoms(const DensityMatrix& rho_a, const SphereGrid& grid);

} // namespace dicke
