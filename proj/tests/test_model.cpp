#include "doctest.h"

#include "dicke/error.hpp"
#include "dicke/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace dicke;
using Eigen::MatrixXcd;

namespace {

double maxabs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("model params validation") {
    CHECK_THROWS_AS(ModelParams(0.0, 1.0, 0.1, 2), InvalidArgument);
    CHECK_THROWS_AS(ModelParams(1.0, -1.0, 0.1, 2), InvalidArgument);
    CHECK_THROWS_AS(ModelParams(1.0, 1.0, -0.1, 2), InvalidArgument);
    CHECK_THROWS_AS(ModelParams(1.0, 1.0, 0.1, 0), InvalidArgument);
    const ModelParams p(1.0, 4.0, 0.3, 3);
    CHECK(p.lambda_cr() == std::sqrt(1.0 * 4.0) / 2);
    CHECK(p.j() == 1.5);
    CHECK(p.with_lambda(0.9).lambda == 0.9);
}

TEST_CASE("basis indexer round trip") {
    for (int n_atoms : {1, 2, 5}) {
        const BasisIndexer b(7, n_atoms);
        CHECK(b.dimension() == static_cast<std::size_t>(8 * (n_atoms + 1)));
        std::set<std::size_t> seen;
        for (int n = 0; n <= 7; ++n) {
            for (int k = 0; k <= n_atoms; ++k) {
                const auto idx = b.index(n, k);
                CHECK(idx < b.dimension());
                CHECK(b.fock(idx) == n);
                CHECK(b.spin_offset(idx) == k);
                CHECK(b.m(idx) == k - 0.5 * n_atoms);
                seen.insert(idx);
            }
        }
        CHECK(seen.size() == b.dimension());
    }
    CHECK_THROWS_AS(BasisIndexer(0, 2), InvalidArgument);
    CHECK_THROWS_AS(BasisIndexer(3, 0), InvalidArgument);
}

TEST_CASE("hermitian operator validation") {
    MatrixXcd m(2, 2);
    m << 1, cplx(0, 1), cplx(0, 1), 2;
    CHECK_THROWS_AS(HermitianOperator(m, Space::boson), InvalidArgument);
    CHECK_THROWS_AS(HermitianOperator(MatrixXcd::Zero(2, 3), Space::boson), InvalidArgument);
    m(1, 0) = cplx(0, -1);
    CHECK_NOTHROW(HermitianOperator(m, Space::boson));
}

TEST_CASE("boson operators") {
    auto ops = build_boson_ops(1);
    CHECK(ops.annihilate.rows() == 2);
    CHECK(ops.annihilate(0, 1) == cplx(1.0));
    CHECK(ops.annihilate(0, 0) == cplx(0.0));
    CHECK(ops.annihilate(1, 0) == cplx(0.0));
    CHECK(ops.annihilate(1, 1) == cplx(0.0));

    ops = build_boson_ops(3);
    for (int n = 0; n <= 3; ++n) CHECK(ops.number.matrix()(n, n) == cplx(n));
    CHECK(maxabs(ops.number.matrix() - ops.annihilate.adjoint() * ops.annihilate) < 1e-14);

    ops = build_boson_ops(12);
    const MatrixXcd comm = ops.annihilate * ops.annihilate.adjoint() - ops.annihilate.adjoint() * ops.annihilate;
    CHECK(maxabs(comm.topLeftCorner(12, 12) - MatrixXcd::Identity(12, 12)) < 1e-12);
    CHECK_THROWS_AS(build_boson_ops(0), InvalidArgument);
}

TEST_CASE("spin operators") {
    auto s = build_spin_ops(1);
    CHECK(s.jz.matrix()(0, 0) == cplx(-0.5));
    CHECK(s.jz.matrix()(1, 1) == cplx(0.5));
    s = build_spin_ops(2);
    CHECK(std::abs(s.jplus(1, 0) - std::sqrt(2.0)) < 1e-15);
    for (int n = 1; n <= 6; ++n) {
        CAPTURE(n);
        s = build_spin_ops(n);
        const cplx i(0, 1);
        const MatrixXcd& x = s.jx.matrix();
        const MatrixXcd& y = s.jy.matrix();
        const MatrixXcd& z = s.jz.matrix();
        CHECK(maxabs(x * y - y * x - i * z) < 1e-12);
        CHECK(maxabs(y * z - z * y - i * x) < 1e-12);
        CHECK(maxabs(s.jplus.adjoint() - s.jminus) < 1e-15);
        CHECK(maxabs(x - (s.jplus + s.jminus) / 2.0) < 1e-15);
        // Casimir j(j+1)
        const double j = 0.5 * n;
        const MatrixXcd c = x * x + y * y + z * z;
        CHECK(maxabs(c - j * (j + 1) * MatrixXcd::Identity(n + 1, n + 1)) < 1e-12);
    }
    CHECK_THROWS_AS(build_spin_ops(0), InvalidArgument);
}

TEST_CASE("hamiltonian structure") {
    SUBCASE("decoupled") {
        for (int n : {1, 2, 5}) {
            const ModelParams p(1.3, 0.7, 0.0, n);
            const BasisIndexer b(6, n);
            const MatrixXcd h = build_hamiltonian(p, b).matrix();
            MatrixXcd off = h;
            off.diagonal().setZero();
            CHECK(maxabs(off) == 0.0);
            CHECK(h.diagonal().real().minCoeff() == doctest::Approx(-0.7 * n / 2));
        }
    }
    SUBCASE("kronecker form") {
        const ModelParams p(1.1, 0.9, 0.37, 3);
        const BasisIndexer b(5, 3);
        const auto bo = build_boson_ops(5);
        const auto so = build_spin_ops(3);
        const MatrixXcd x = bo.annihilate + bo.annihilate.adjoint();
        const MatrixXcd expect = 1.1 * kron_boson(bo.number.matrix(), 3) +
                                 0.9 * kron_spin(so.jz.matrix(), 5) +
                                 0.37 / std::sqrt(3.0) * kron_boson(x, 3) * kron_spin(so.jplus + so.jminus, 5);
        CHECK(maxabs(build_hamiltonian(p, b).matrix() - expect) < 1e-14);
    }
    SUBCASE("selection rules") {
        const ModelParams p(1.0, 1.0, 0.8, 4);
        const BasisIndexer b(9, 4);
        const MatrixXcd h = build_hamiltonian(p, b).matrix();
        std::mt19937 rng(7);
        for (int t = 0; t < 30; ++t) {
            const int n = std::uniform_int_distribution<>(0, 9)(rng);
            const int k = std::uniform_int_distribution<>(0, 4)(rng);
            const auto col = b.index(n, k);
            for (std::size_t r = 0; r < b.dimension(); ++r) {
                if (std::abs(h(r, col)) == 0.0) continue;
                const int dn = b.fock(r) - n, dk = b.spin_offset(r) - k;
                const bool diag = dn == 0 && dk == 0;
                CHECK((diag || (std::abs(dn) == 1 && std::abs(dk) == 1)));
            }
        }
    }
    SUBCASE("mismatched indexer") {
        CHECK_THROWS_AS(build_hamiltonian(ModelParams(1, 1, 0.1, 2), BasisIndexer(4, 3)), InvalidArgument);
    }
}

TEST_CASE("ground energy against a doubled cutoff") {
    const ModelParams p(1.0, 1.0, 0.3, 2);
    auto lowest = [&](int cutoff) {
        const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(build_hamiltonian(p, BasisIndexer(cutoff, 2)).matrix(),
                                                          Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    };
    CHECK(std::abs(lowest(30) - lowest(60)) < 1e-9);
    // tests/oracles/dicke_oracle.py
    CHECK(std::abs(lowest(60) - -1.048260718611317) < 1e-9);
}

TEST_CASE("parity operator") {
    const ModelParams p(1.0, 1.0, 0.7, 2);
    const BasisIndexer b(10, 2);
    const MatrixXcd pi = build_parity(p, b).matrix();
    const auto id = MatrixXcd::Identity(b.dimension(), b.dimension());
    CHECK(pi(b.index(0, 0), b.index(0, 0)) == cplx(1.0));
    CHECK(maxabs(pi * pi - id) == 0.0);
    const MatrixXcd h = build_hamiltonian(p, b).matrix();
    CHECK(maxabs(h * pi - pi * h) < 1e-12);
    const MatrixXcd bb = kron_boson(build_boson_ops(10).annihilate, 2);
    CHECK(maxabs(pi.adjoint() * bb * pi + bb) < 1e-14);
    const MatrixXcd jx = kron_spin(build_spin_ops(2).jx.matrix(), 10);
    CHECK(maxabs(pi.adjoint() * jx * pi + jx) < 1e-14);

    for (int n : {1, 3, 4}) {
        const ModelParams q(0.5, 2.0, 1.3, n);
        const BasisIndexer bq(7, n);
        const MatrixXcd hq = build_hamiltonian(q, bq).matrix();
        const MatrixXcd pq = build_parity(q, bq).matrix();
        CHECK(maxabs(hq * pq - pq * hq) < 1e-12);
    }
}

TEST_CASE("parity blocks") {
    auto blocks = parity_block_indices(BasisIndexer(1, 1));
    CHECK(blocks.even == std::vector<std::size_t>{0, 3});
    CHECK(blocks.odd == std::vector<std::size_t>{1, 2});

    for (int cutoff : {1, 4, 9}) {
        for (int n : {1, 2, 3, 6}) {
            const BasisIndexer b(cutoff, n);
            blocks = parity_block_indices(b);
            CHECK_FALSE(blocks.even.empty());
            CHECK(blocks.even.size() + blocks.odd.size() == b.dimension());
            const auto diff = static_cast<long>(blocks.even.size()) - static_cast<long>(blocks.odd.size());
            CHECK(std::abs(diff) <= n + 1);
            CHECK(std::is_sorted(blocks.even.begin(), blocks.even.end()));
            for (auto i : blocks.even) CHECK((b.fock(i) + b.spin_offset(i)) % 2 == 0);
            for (auto i : blocks.odd) CHECK((b.fock(i) + b.spin_offset(i)) % 2 == 1);
        }
    }
}

TEST_CASE("even-block band reproduces H on even vectors") {
    const ModelParams p(1.2, 0.8, 0.9, 3);
    const BasisIndexer b(8, 3);
    const auto blocks = parity_block_indices(b);
    const auto band = build_block_band(p, b, blocks.even);
    const MatrixXcd h = build_hamiltonian(p, b).matrix();
    const int m = band.n;
    CHECK(m == static_cast<int>(blocks.even.size()));

    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) dense(r, c) = band(r, c);
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(b.dimension());
    Eigen::VectorXd vb(m);
    for (int i = 0; i < m; ++i) {
        vb(i) = g(rng);
        v(blocks.even[i]) = vb(i);
    }
    const Eigen::VectorXcd hv = h * v;
    const Eigen::VectorXd hb = dense * vb;
    for (int i = 0; i < m; ++i) CHECK(std::abs(hv(blocks.even[i]) - hb(i)) < 1e-12);
    for (auto i : blocks.odd) CHECK(std::abs(hv(i)) < 1e-12);
}
