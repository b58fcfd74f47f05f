#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace dicke {

using cplx = std::complex<double>;

/// Physical parameters of the single-mode Dicke Hamiltonian (hbar = 1).
struct ModelParams {
    double omega = 1.0;   // boson frequency
    double omega0 = 1.0;  // atomic splitting
    double lambda = 0.0;  // atom-field coupling
    int n_atoms = 1;      // N, with j = N/2

    ModelParams() = default;
    ModelParams(double omega, double omega0, double lambda, int n_atoms);

    double lambda_cr() const;
    double j() const { return 0.5 * n_atoms; }
    ModelParams with_lambda(double l) const { return {omega, omega0, l, n_atoms}; }
};

/// Boson-major product basis |n>|j,m>, idx(n, m) = n (N+1) + (m + j).
/// Spin projections are carried as k = m + j in [0, N].
class BasisIndexer {
public:
    BasisIndexer(int n_cutoff, int n_atoms);

    int n_cutoff() const { return n_cutoff_; }
    int n_atoms() const { return n_atoms_; }
    int spin_dim() const { return n_atoms_ + 1; }
    int boson_dim() const { return n_cutoff_ + 1; }
    std::size_t dimension() const {
        return static_cast<std::size_t>(boson_dim()) * static_cast<std::size_t>(spin_dim());
    }

    std::size_t index(int n, int k) const {
        return static_cast<std::size_t>(n) * spin_dim() + static_cast<std::size_t>(k);
    }
    int fock(std::size_t idx) const { return static_cast<int>(idx / spin_dim()); }
    int spin_offset(std::size_t idx) const { return static_cast<int>(idx % spin_dim()); }
    double m(std::size_t idx) const { return spin_offset(idx) - 0.5 * n_atoms_; }

    bool operator==(const BasisIndexer&) const = default;

private:
    int n_cutoff_;
    int n_atoms_;
};

enum class Space { product, boson, spin };

/// Dense complex Hermitian matrix tagged with the space it acts on.
class HermitianOperator {
public:
    HermitianOperator(Eigen::MatrixXcd matrix, Space space);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Space space() const { return space_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    HermitianOperator scaled(double c) const { return {c * matrix_, space_}; }

private:
    Eigen::MatrixXcd matrix_;
    Space space_;
};

constexpr double kHermitianTol = 1e-12;

struct BosonOps {
    Eigen::MatrixXcd annihilate;  // b, truncated to n <= n_cutoff
    HermitianOperator number;     // b^dagger b
};

struct SpinOps {
    HermitianOperator jx, jy, jz;
    Eigen::MatrixXcd jplus, jminus;
};

BosonOps build_boson_ops(int n_cutoff);
SpinOps build_spin_ops(int n_atoms);

// Lifts a single-subsystem operator onto the product space.
Eigen::MatrixXcd kron_boson(const Eigen::MatrixXcd& boson_op, int n_atoms);
Eigen::MatrixXcd kron_spin(const Eigen::MatrixXcd& spin_op, int n_cutoff);

/// Full product-space Hamiltonian as a dense matrix. Intended for small
/// truncations; the ground-state solver works on the banded parity block.
HermitianOperator build_hamiltonian(const ModelParams& params, const BasisIndexer& indexer);

/// exp[i pi (b^dagger b + J_z + j)], diagonal with entries (-1)^(n+m+j).
HermitianOperator build_parity(const ModelParams& params, const BasisIndexer& indexer);

struct ParityBlocks {
    std::vector<std::size_t> even;
    std::vector<std::size_t> odd;
};

ParityBlocks parity_block_indices(const BasisIndexer& indexer);

/// Real symmetric band matrix in LAPACK lower storage: band(d, c) holds
/// H(c + d, c) for d in [0, kd].
struct SymmetricBand {
    int n = 0;
    int kd = 0;
    Eigen::MatrixXd band;  // (kd + 1) x n, column-major

    double operator()(int row, int col) const;
};

/// The Hamiltonian restricted to one parity sector, rows ordered as in
/// `block` (ascending full-basis index).
SymmetricBand build_block_band(const ModelParams& params, const BasisIndexer& indexer,
                               const std::vector<std::size_t>& block);

} // namespace dicke
