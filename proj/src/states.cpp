#include "dicke/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dicke {

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix, Space space)
    : matrix_(std::move(matrix)), space_(space) {
    require(matrix_.rows() == matrix_.cols() && matrix_.rows() > 0, "density matrix must be square");
    require(space_ != Space::product, "density matrices live on a single subsystem");
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= 1e-12, "density matrix is not Hermitian");
    const double tr = matrix_.trace().real();
    require(std::abs(tr - 1.0) <= 1e-10, "density matrix trace is " + std::to_string(tr));
}

DensityMatrix partial_trace_atoms(const GroundState& gs) {
    const auto psi = gs.amplitudes();
    Eigen::MatrixXcd rho = psi * psi.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {std::move(rho), Space::boson};
}

DensityMatrix partial_trace_field(const GroundState& gs) {
    const auto psi = gs.amplitudes();
    Eigen::MatrixXcd rho = psi.transpose() * psi.conjugate();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {std::move(rho), Space::spin};
}

SpectralDecomposition spectral_decompose(const DensityMatrix& rho, double weight_floor) {
    require(weight_floor >= 0, "weight floor must be non-negative");
    const Eigen::Index d = rho.dim();
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    // Real symmetric input (the usual case here) takes the cheaper real path.
    if (rho.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.matrix().real());
        if (es.info() != Eigen::Success) throw SolverError("density matrix eigensolver failed");
        values = es.eigenvalues();
        vectors = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
        if (es.info() != Eigen::Success) throw SolverError("density matrix eigensolver failed");
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    }

    SpectralDecomposition out;
    out.weight_floor = weight_floor;
    out.space = rho.space();
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (values(i) > weight_floor) ++kept;
    out.weights.resize(kept);
    out.vectors.resize(d, kept);
    Eigen::Index c = 0;
    double retained = 0.0;
    // eigenvalues arrive ascending
    for (Eigen::Index i = d - 1; i >= 0; --i) {
        if (values(i) <= weight_floor) continue;
        out.weights(c) = values(i);
        out.vectors.col(c) = vectors.col(i);
        retained += values(i);
        ++c;
    }
    out.discarded_mass = std::max(0.0, rho.trace() - retained);
    return out;
}

cplx expectation(const DensityMatrix& rho, const HermitianOperator& op) {
    require(rho.dim() == op.dim() && rho.space() == op.space(),
            "density matrix and operator act on different spaces");
    return rho.matrix().cwiseProduct(op.matrix().transpose()).sum();
}

} // namespace dicke
