#include "dicke/model.hpp"

#include "dicke/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dicke {

ModelParams::ModelParams(double omega_, double omega0_, double lambda_, int n_atoms_)
    : omega(omega_), omega0(omega0_), lambda(lambda_), n_atoms(n_atoms_) {
    require(std::isfinite(omega) && omega > 0, "omega must be positive");
    require(std::isfinite(omega0) && omega0 > 0, "omega0 must be positive");
    require(std::isfinite(lambda) && lambda >= 0, "lambda must be non-negative");
    require(n_atoms >= 1, "n_atoms must be at least 1");
}

double ModelParams::lambda_cr() const { return std::sqrt(omega * omega0) / 2.0; }

BasisIndexer::BasisIndexer(int n_cutoff, int n_atoms) : n_cutoff_(n_cutoff), n_atoms_(n_atoms) {
    require(n_cutoff >= 1, "Fock cutoff must be at least 1");
    require(n_atoms >= 1, "n_atoms must be at least 1");
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd matrix, Space space)
    : matrix_(std::move(matrix)), space_(space) {
    require(matrix_.rows() == matrix_.cols(), "operator matrix must be square");
    const double dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    require(dev <= kHermitianTol * scale,
            "operator is not Hermitian (max deviation " + std::to_string(dev) + ")");
}

BosonOps build_boson_ops(int n_cutoff) {
    require(n_cutoff >= 1, "Fock cutoff must be at least 1");
    const int d = n_cutoff + 1;
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    Eigen::MatrixXcd number = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) number(n, n) = static_cast<double>(n);
    return {b, HermitianOperator(number, Space::boson)};
}

SpinOps build_spin_ops(int n_atoms) {
    require(n_atoms >= 1, "n_atoms must be at least 1");
    const int d = n_atoms + 1;
    const double j = 0.5 * n_atoms;
    Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        jz(k, k) = k - j;
        // <j, m+1| J+ |j, m> = sqrt((j - m)(j + m + 1)) with k = m + j
        if (k + 1 < d) jp(k + 1, k) = std::sqrt(static_cast<double>((n_atoms - k) * (k + 1)));
    }
    Eigen::MatrixXcd jm = jp.adjoint();
    const cplx two_i(0.0, 2.0);
    return {HermitianOperator((jp + jm) / 2.0, Space::spin),
            HermitianOperator((jp - jm) / two_i, Space::spin),
            HermitianOperator(jz, Space::spin), jp, jm};
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

Eigen::MatrixXcd kron_boson(const Eigen::MatrixXcd& boson_op, int n_atoms) {
    return kron(boson_op, Eigen::MatrixXcd::Identity(n_atoms + 1, n_atoms + 1));
}

Eigen::MatrixXcd kron_spin(const Eigen::MatrixXcd& spin_op, int n_cutoff) {
    return kron(Eigen::MatrixXcd::Identity(n_cutoff + 1, n_cutoff + 1), spin_op);
}

HermitianOperator build_hamiltonian(const ModelParams& params, const BasisIndexer& indexer) {
    require(indexer.n_atoms() == params.n_atoms, "indexer and parameters disagree on N");
    const auto bos = build_boson_ops(indexer.n_cutoff());
    const auto spin = build_spin_ops(params.n_atoms);
    const Eigen::MatrixXcd x = bos.annihilate + bos.annihilate.adjoint();
    const Eigen::MatrixXcd jsum = spin.jplus + spin.jminus;
    Eigen::MatrixXcd h = params.omega * kron_boson(bos.number.matrix(), params.n_atoms) +
                         params.omega0 * kron_spin(spin.jz.matrix(), indexer.n_cutoff()) +
                         (params.lambda / std::sqrt(static_cast<double>(params.n_atoms))) *
                             kron(x, jsum);
    return {h, Space::product};
}

HermitianOperator build_parity(const ModelParams& params, const BasisIndexer& indexer) {
    require(indexer.n_atoms() == params.n_atoms, "indexer and parameters disagree on N");
    const auto dim = static_cast<Eigen::Index>(indexer.dimension());
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const int exponent = indexer.fock(i) + indexer.spin_offset(i);
        p(i, i) = (exponent % 2 == 0) ? 1.0 : -1.0;
    }
    return {p, Space::product};
}

ParityBlocks parity_block_indices(const BasisIndexer& indexer) {
    ParityBlocks blocks;
    const std::size_t dim = indexer.dimension();
    blocks.even.reserve(dim / 2 + 1);
    blocks.odd.reserve(dim / 2 + 1);
    for (std::size_t i = 0; i < dim; ++i) {
        if ((indexer.fock(i) + indexer.spin_offset(i)) % 2 == 0)
            blocks.even.push_back(i);
        else
            blocks.odd.push_back(i);
    }
    return blocks;
}

double SymmetricBand::operator()(int row, int col) const {
    if (row < col) std::swap(row, col);
    const int d = row - col;
    return d > kd ? 0.0 : band(d, col);
}

SymmetricBand build_block_band(const ModelParams& params, const BasisIndexer& indexer,
                               const std::vector<std::size_t>& block) {
    require(indexer.n_atoms() == params.n_atoms, "indexer and parameters disagree on N");
    require(!block.empty(), "empty parity block");
    const int n_atoms = params.n_atoms;
    const double j = params.j();
    const double g = params.lambda / std::sqrt(static_cast<double>(n_atoms));

    std::vector<int> position(indexer.dimension(), -1);
    for (std::size_t p = 0; p < block.size(); ++p) position[block[p]] = static_cast<int>(p);

    struct Entry {
        int row, col;
        double value;
    };
    std::vector<Entry> off;
    int kd = 0;
    for (std::size_t p = 0; p < block.size(); ++p) {
        const int n = indexer.fock(block[p]);
        const int k = indexer.spin_offset(block[p]);
        if (n + 1 > indexer.n_cutoff() || g == 0.0) continue;
        const double boson = std::sqrt(static_cast<double>(n + 1));
        // (b^dagger)(J+): (n, k) -> (n+1, k+1)
        if (k + 1 <= n_atoms) {
            const int q = position[indexer.index(n + 1, k + 1)];
            if (q >= 0) {
                off.push_back({q, static_cast<int>(p),
                               g * boson * std::sqrt(static_cast<double>((n_atoms - k) * (k + 1)))});
            }
        }
        // (b^dagger)(J-): (n, k) -> (n+1, k-1)
        if (k - 1 >= 0) {
            const int q = position[indexer.index(n + 1, k - 1)];
            if (q >= 0) {
                off.push_back({q, static_cast<int>(p),
                               g * boson * std::sqrt(static_cast<double>(k * (n_atoms - k + 1)))});
            }
        }
    }
    for (const auto& e : off) kd = std::max(kd, e.row - e.col);

    SymmetricBand h;
    h.n = static_cast<int>(block.size());
    h.kd = kd;
    h.band = Eigen::MatrixXd::Zero(kd + 1, h.n);
    for (int p = 0; p < h.n; ++p) {
        const int n = indexer.fock(block[p]);
        const int k = indexer.spin_offset(block[p]);
        h.band(0, p) = params.omega * n + params.omega0 * (k - j);
    }
    for (const auto& e : off) h.band(e.row - e.col, e.col) = e.value;
    return h;
}

} // namespace dicke
