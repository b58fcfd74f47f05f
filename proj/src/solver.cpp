#include "dicke/solver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace dicke {

namespace {

double lowest_band_eigenvalue(const SymmetricBand& h) {
    Eigen::MatrixXd ab = h.band;  // overwritten by LAPACK
    lapack_int found = 0;
    double w = 0.0;
    double q = 0.0, z = 0.0;
    lapack_int ifail = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info =
        LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'L', h.n, h.kd, ab.data(), h.kd + 1, &q, 1,
                       0.0, 0.0, 1, 1, abstol, &found, &w, &z, 1, &ifail);
    if (info != 0 || found != 1)
        throw SolverError("dsbevx failed (info " + std::to_string(info) + ")");
    return w;
}

// Shifted inverse iteration on the band matrix, shift just below `energy`.
Eigen::VectorXd band_eigenvector(const SymmetricBand& h, double energy) {
    const int n = h.n;
    const int kd = h.kd;
    const int ldab = 3 * kd + 1;
    double shift = energy - 1e-10 * std::max(1.0, std::abs(energy));

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 1.0 + 0.1 * uni(rng);
    x.normalize();

    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(ldab, n);
        for (int col = 0; col < n; ++col) {
            for (int row = std::max(0, col - kd); row <= std::min(n - 1, col + kd); ++row) {
                double v = h(row, col);
                if (row == col) v -= shift;
                ab(2 * kd + row - col, col) = v;
            }
        }
        std::vector<lapack_int> ipiv(n);
        lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, ab.data(), ldab, ipiv.data());
        if (info > 0) {
            shift -= 1e-8 * std::max(1.0, std::abs(energy));
            continue;
        }
        if (info < 0) throw SolverError("dgbtrf argument error");
        for (int it = 0; it < 4; ++it) {
            info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, ab.data(), ldab, ipiv.data(),
                                  x.data(), n);
            if (info != 0) throw SolverError("dgbtrs failed");
            const double norm = x.norm();
            if (!std::isfinite(norm) || norm == 0.0) throw SolverError("inverse iteration diverged");
            x /= norm;
        }
        return x;
    }
    throw SolverError("could not factor shifted band matrix");
}

} // namespace

int initial_cutoff(const ModelParams& p) {
    const double mean_field = 8.0 * p.lambda * p.lambda * p.n_atoms / (p.omega * p.omega);
    return std::max(20, static_cast<int>(std::ceil(mean_field)) + 10);
}

double tail_population(const GroundState& gs) {
    const int levels = gs.basis.boson_dim();
    const int top = std::max(1, static_cast<int>(std::ceil(0.1 * levels)));
    const auto psi = gs.amplitudes();
    return psi.bottomRows(top).squaredNorm();
}

GroundState ground_state(const ModelParams& params, int n_cutoff) {
    const BasisIndexer basis(n_cutoff, params.n_atoms);
    const auto blocks = parity_block_indices(basis);
    const SymmetricBand h = build_block_band(params, basis, blocks.even);

    GroundState gs;
    gs.params = params;
    gs.basis = basis;
    Eigen::VectorXd x;
    if (h.kd == 0) {
        // Uncoupled: the band is diagonal and the eigenvector is a unit vector.
        Eigen::Index lowest = 0;
        gs.energy = h.band.row(0).minCoeff(&lowest);
        x = Eigen::VectorXd::Unit(h.n, lowest);
    } else {
        gs.energy = lowest_band_eigenvalue(h);
        x = band_eigenvector(h, gs.energy);
    }

    Eigen::Index peak = 0;
    x.cwiseAbs().maxCoeff(&peak);
    const double sign = x(peak) < 0 ? -1.0 : 1.0;
    gs.vector = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t p = 0; p < blocks.even.size(); ++p)
        gs.vector(static_cast<Eigen::Index>(blocks.even[p])) = sign * x(static_cast<Eigen::Index>(p));
    gs.vector.normalize();

    gs.convergence.tail_population = tail_population(gs);
    gs.convergence.energy_shift = std::numeric_limits<double>::quiet_NaN();
    return gs;
}

CutoffSearch search_cutoff(const ModelParams& params, double tol, int max_cutoff) {
    require(tol > 0, "tolerance must be positive");
    require(max_cutoff >= 1, "cutoff cap must be at least 1");
    CutoffSearch out;
    int n = std::min(initial_cutoff(params), max_cutoff);
    out.state = ground_state(params, n);
    out.trajectory.push_back({n, out.state.energy, out.state.convergence.tail_population,
                              out.state.convergence.energy_shift});

    // Uncoupled: the Fock vacuum is an exact eigenstate at any cutoff.
    if (params.lambda == 0.0) {
        out.converged = true;
        return out;
    }
    while (true) {
        if (n >= max_cutoff) return out;
        n = std::min(2 * n, max_cutoff);
        GroundState next = ground_state(params, n);
        const double shift = std::abs(next.energy - out.state.energy);
        next.convergence.energy_shift = shift;
        out.trajectory.push_back({n, next.energy, next.convergence.tail_population, shift});
        out.state = std::move(next);
        if (out.state.convergence.tail_population < tol &&
            shift < tol * std::max(1.0, std::abs(out.state.energy))) {
            out.converged = true;
            return out;
        }
    }
}

CutoffSearch converge_cutoff(const ModelParams& params, double tol, int max_cutoff) {
    CutoffSearch s = search_cutoff(params, tol, max_cutoff);
    if (!s.converged) {
        std::ostringstream msg;
        msg << "Fock cutoff did not converge below cap " << max_cutoff << " (lambda=" << params.lambda
            << ", N=" << params.n_atoms << ", tail=" << s.state.convergence.tail_population
            << ", dE=" << s.state.convergence.energy_shift << ")";
        throw CutoffFailure(msg.str(), std::move(s));
    }
    return s;
}

cplx expectation(const Eigen::VectorXcd& state, const HermitianOperator& op) {
    require(state.size() == op.dim(), "state and operator dimensions differ");
    return state.dot(op.matrix() * state);
}

cplx expectation(const GroundState& gs, const HermitianOperator& op) {
    const auto psi = gs.amplitudes();
    switch (op.space()) {
    case Space::product:
        return expectation(gs.vector, op);
    case Space::boson:
        require(op.dim() == gs.basis.boson_dim(), "boson operator dimension mismatch");
        return (psi.adjoint() * op.matrix() * psi).trace();
    case Space::spin:
        require(op.dim() == gs.basis.spin_dim(), "spin operator dimension mismatch");
        return (psi.conjugate().cwiseProduct(psi * op.matrix().transpose())).sum();
    }
    throw InvalidArgument("unknown operator space");
}

} // namespace dicke
