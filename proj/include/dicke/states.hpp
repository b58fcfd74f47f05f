#pragma once

#include "dicke/solver.hpp"

namespace dicke {

constexpr double kWeightFloor = 1e-12;

/// Reduced state of one subsystem. Unit trace and Hermiticity are checked
/// on construction.
class DensityMatrix {
public:
    DensityMatrix(Eigen::MatrixXcd matrix, Space space);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Space space() const { return space_; }
    Eigen::Index dim() const { return matrix_.rows(); }
    double trace() const { return matrix_.trace().real(); }
    double purity() const { return (matrix_ * matrix_).trace().real(); }

private:
    Eigen::MatrixXcd matrix_;
    Space space_;
};

struct SpectralDecomposition {
    Eigen::VectorXd weights;   // descending, all > weight_floor
    Eigen::MatrixXcd vectors;  // columns match weights
    double weight_floor = kWeightFloor;
    double discarded_mass = 0.0;
    Space space = Space::boson;

    Eigen::Index rank() const { return weights.size(); }
    Eigen::Index dim() const { return vectors.rows(); }
};

/// rho_B = Tr_A |g><g| on the truncated Fock space.
DensityMatrix partial_trace_atoms(const GroundState& gs);

/// rho_A = Tr_B |g><g| on the spin-j multiplet.
DensityMatrix partial_trace_field(const GroundState& gs);

SpectralDecomposition spectral_decompose(const DensityMatrix& rho,
                                         double weight_floor = kWeightFloor);

cplx expectation(const DensityMatrix& rho, const HermitianOperator& op);

} // namespace dicke
