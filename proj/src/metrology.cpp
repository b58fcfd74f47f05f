#include "dicke/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dicke {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_generator(const SpectralDecomposition& decomp, const HermitianOperator& g) {
    require(g.space() == decomp.space && g.dim() == decomp.dim(),
            "generator and state act on different spaces");
}

double variance(const DensityMatrix& rho, const Eigen::MatrixXcd& op) {
    const Eigen::MatrixXcd& r = rho.matrix();
    const double mean = r.cwiseProduct(op.transpose()).sum().real();
    const Eigen::MatrixXcd sq = op * op;
    const double second = r.cwiseProduct(sq.transpose()).sum().real();
    return second - mean * mean;
}

cplx trace_product(const DensityMatrix& rho, const Eigen::MatrixXcd& op) {
    return rho.matrix().cwiseProduct(op.transpose()).sum();
}

Eigen::MatrixXcd quadrature(const Eigen::MatrixXcd& b, double sigma) {
    const cplx phase = std::polar(1.0, -sigma);
    return 0.5 * (phase * b + std::conj(phase) * b.adjoint());
}

} // namespace

std::string_view to_string(Generator g) {
    switch (g) {
    case Generator::field_number: return "field(b^dagger b)";
    case Generator::atoms_jx: return "atoms(J_x)";
    case Generator::custom: return "custom";
    }
    return "custom";
}

QfiResult qfi_mixed(const SpectralDecomposition& decomp, const HermitianOperator& g) {
    check_generator(decomp, g);
    const Eigen::MatrixXcd gv = g.matrix() * decomp.vectors;
    const Eigen::MatrixXcd gmn = decomp.vectors.adjoint() * gv;
    const auto& p = decomp.weights;

    QfiResult out;
    for (Eigen::Index n = 0; n < decomp.rank(); ++n) {
        const double mean = gmn(n, n).real();
        const double second = gv.col(n).squaredNorm();
        out.variance_term += 4.0 * p(n) * (second - mean * mean);
        out.mean += p(n) * mean;
    }
    for (Eigen::Index m = 0; m < decomp.rank(); ++m) {
        for (Eigen::Index n = 0; n < decomp.rank(); ++n) {
            if (m == n) continue;
            out.correction_term += 8.0 * p(m) * p(n) / (p(m) + p(n)) * std::norm(gmn(m, n));
        }
    }
    out.value = out.variance_term - out.correction_term;
    out.scaled = kNaN;
    out.discarded_mass = decomp.discarded_mass;
    return out;
}

double sld_qfi_oracle(const SpectralDecomposition& decomp, const HermitianOperator& g) {
    check_generator(decomp, g);
    const Eigen::Index d = decomp.dim();
    const Eigen::Index r = decomp.rank();
    Eigen::MatrixXcd basis(d, d);
    basis.leftCols(r) = decomp.vectors;
    if (r < d) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(decomp.vectors);
        const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
        basis.rightCols(d - r) = q.rightCols(d - r);
    }
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
    p.head(r) = decomp.weights;

    const Eigen::MatrixXcd gmn = basis.adjoint() * g.matrix() * basis;
    double f = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            const double s = p(m) + p(n);
            if (s <= decomp.weight_floor) continue;
            const double diff = p(m) - p(n);
            f += 2.0 * diff * diff / s * std::norm(gmn(m, n));
        }
    }
    return f;
}

QfiResult qfi_field(const DensityMatrix& rho_b) {
    require(rho_b.space() == Space::boson, "field QFI needs a boson-space state");
    const auto ops = build_boson_ops(static_cast<int>(rho_b.dim()) - 1);
    QfiResult out = qfi_mixed(spectral_decompose(rho_b), ops.number);
    out.generator = Generator::field_number;
    out.mean = trace_product(rho_b, ops.number.matrix()).real();
    out.scaled = out.mean > 0.0 ? out.value / (4.0 * out.mean) : kNaN;
    return out;
}

QfiResult qfi_atoms(const DensityMatrix& rho_a) {
    require(rho_a.space() == Space::spin, "atomic QFI needs a spin-space state");
    const int n_atoms = static_cast<int>(rho_a.dim()) - 1;
    const auto ops = build_spin_ops(n_atoms);
    QfiResult out = qfi_mixed(spectral_decompose(rho_a), ops.jx);
    out.generator = Generator::atoms_jx;
    out.scaled = out.value / n_atoms;
    return out;
}

double quadrature_variance(const DensityMatrix& rho_b, double sigma) {
    require(rho_b.space() == Space::boson, "quadrature variance needs a boson-space state");
    require(sigma >= -1e-12 && sigma <= std::numbers::pi / 2 + 1e-12,
            "squeezing angle must lie in [0, pi/2]");
    const auto ops = build_boson_ops(static_cast<int>(rho_b.dim()) - 1);
    return variance(rho_b, quadrature(ops.annihilate, sigma));
}

SqueezingResult optimal_quadrature(const DensityMatrix& rho_b) {
    const double v0 = quadrature_variance(rho_b, 0.0);
    const double v90 = quadrature_variance(rho_b, std::numbers::pi / 2);
    const auto ops = build_boson_ops(static_cast<int>(rho_b.dim()) - 1);
    const Eigen::MatrixXcd& b = ops.annihilate;

    SqueezingResult out;
    const bool amplitude = v0 < v90 - 1e-14 * std::max(1.0, v90);
    out.optimal_angle = amplitude ? 0.0 : std::numbers::pi / 2;
    out.variance_min = amplitude ? v0 : v90;
    out.variance_other = amplitude ? v90 : v0;
    out.xi2 = 4.0 * v90;
    out.raw_moments = {trace_product(rho_b, b), trace_product(rho_b, b * b),
                       trace_product(rho_b, ops.number.matrix())};
    return out;
}

double spin_variance(const DensityMatrix& rho_a, double phi) {
    require(rho_a.space() == Space::spin, "spin variance needs a spin-space state");
    require(phi >= -1e-12 && phi <= std::numbers::pi / 2 + 1e-12,
            "squeezing angle must lie in [0, pi/2]");
    const auto ops = build_spin_ops(static_cast<int>(rho_a.dim()) - 1);
    const Eigen::MatrixXcd jphi = std::cos(phi) * ops.jx.matrix() + std::sin(phi) * ops.jy.matrix();
    return variance(rho_a, jphi);
}

SqueezingResult spin_squeezing_xi2(const DensityMatrix& rho_a) {
    const int n_atoms = static_cast<int>(rho_a.dim()) - 1;
    const double vx = spin_variance(rho_a, 0.0);
    const double vy = spin_variance(rho_a, std::numbers::pi / 2);
    const auto ops = build_spin_ops(n_atoms);
    const Eigen::MatrixXcd& jx = ops.jx.matrix();
    const Eigen::MatrixXcd& jy = ops.jy.matrix();

    SqueezingResult out;
    const bool along_x = vx < vy - 1e-14 * std::max(1.0, vy);
    out.optimal_angle = along_x ? 0.0 : std::numbers::pi / 2;
    out.variance_min = along_x ? vx : vy;
    out.variance_other = along_x ? vy : vx;
    out.xi2 = 4.0 * vy / n_atoms;
    out.raw_moments = {trace_product(rho_a, jy * jy), trace_product(rho_a, ops.jplus * ops.jplus),
                       trace_product(rho_a, jx * jx + jy * jy)};
    return out;
}

AlphaGrid AlphaGrid::square(double half_width, int points) {
    require(points >= 2 && half_width > 0, "alpha grid needs at least two points and a positive width");
    AlphaGrid g;
    g.re.resize(points);
    for (int i = 0; i < points; ++i) g.re[i] = -half_width + 2.0 * half_width * i / (points - 1);
    g.im = g.re;
    return g;
}

AlphaGrid AlphaGrid::for_mean_number(double nbar, int points) {
    return square(1.5 * (std::sqrt(std::max(0.0, nbar)) + 2.0), points);
}

SphereGrid SphereGrid::uniform(int n_theta, int n_phi) {
    require(n_theta >= 2 && n_phi >= 1, "sphere grid too small");
    SphereGrid g;
    g.theta.resize(n_theta);
    g.phi.resize(n_phi);
    for (int i = 0; i < n_theta; ++i) g.theta[i] = std::numbers::pi * i / (n_theta - 1);
    for (int i = 0; i < n_phi; ++i) g.phi[i] = 2.0 * std::numbers::pi * i / n_phi;
    return g;
}

Eigen::VectorXcd coherent_amplitudes(cplx alpha, int n_max) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    const double r = std::abs(alpha);
    if (r == 0.0) {
        c(0) = 1.0;
        return c;
    }
    const double log_r = std::log(r);
    const double arg = std::arg(alpha);
    for (int n = 0; n <= n_max; ++n) {
        const double log_mag = -0.5 * r * r + n * log_r - 0.5 * std::lgamma(n + 1.0);
        c(n) = std::polar(std::exp(log_mag), n * arg);
    }
    return c;
}

Eigen::VectorXcd spin_coherent_amplitudes(double theta, double phi, int n_atoms) {
    Eigen::VectorXcd c(n_atoms + 1);
    const double ch = std::cos(0.5 * theta);
    const double sh = std::sin(0.5 * theta);
    const double log_nf = std::lgamma(n_atoms + 1.0);
    for (int k = 0; k <= n_atoms; ++k) {
        const double binom = std::exp(0.5 * (log_nf - std::lgamma(k + 1.0) - std::lgamma(n_atoms - k + 1.0)));
        const double mag = binom * std::pow(ch, n_atoms - k) * std::pow(sh, k);
        c(k) = std::polar(mag, -k * phi);
    }
    return c;
}

namespace {

template <class AmplitudeFn>
HusimiMap husimi(const DensityMatrix& rho, const std::vector<double>& xs,
                 const std::vector<double>& ys, AmplitudeFn&& amplitudes) {
    // rank-truncated evaluation: Q = sum_k p_k |<coh|psi_k>|^2
    const SpectralDecomposition dec = spectral_decompose(rho);
    const Eigen::MatrixXcd vt = dec.vectors.adjoint();
    HusimiMap out;
    out.x = xs;
    out.y = ys;
    out.values.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    out.max = -1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const Eigen::VectorXcd c = amplitudes(xs[i], ys[j]);
            const Eigen::VectorXcd overlaps = vt * c;  // <psi_k|coh>
            double q = 0.0;
            for (Eigen::Index k = 0; k < dec.rank(); ++k) q += dec.weights(k) * std::norm(overlaps(k));
            q = std::clamp(q, 0.0, 1.0);
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = q;
            if (q > out.max) {
                out.max = q;
                out.x_at_max = xs[i];
                out.y_at_max = ys[j];
            }
        }
    }
    return out;
}

} // namespace

HusimiMap husimi_field(const DensityMatrix& rho_b, const AlphaGrid& grid) {
    require(rho_b.space() == Space::boson, "field Husimi needs a boson-space state");
    require(!grid.re.empty() && !grid.im.empty(), "empty alpha grid");
    const int n_max = static_cast<int>(rho_b.dim()) - 1;
    Eigen::VectorXd half_log_fact(n_max + 1);
    for (int n = 0; n <= n_max; ++n) half_log_fact(n) = 0.5 * std::lgamma(n + 1.0);
    return husimi(rho_b, grid.re, grid.im, [&](double x, double y) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
        const double r = std::hypot(x, y);
        if (r == 0.0) {
            c(0) = 1.0;
            return c;
        }
        const double log_r = std::log(r);
        const double arg = std::atan2(y, x);
        for (int n = 0; n <= n_max; ++n)
            c(n) = std::polar(std::exp(-0.5 * r * r + n * log_r - half_log_fact(n)), n * arg);
        return c;
    });
}

HusimiMap husimi_atoms(const DensityMatrix& rho_a, const SphereGrid& grid) {
    require(rho_a.space() == Space::spin, "atomic Husimi needs a spin-space state");
    require(!grid.theta.empty() && !grid.phi.empty(), "empty sphere grid");
    for (double t : grid.theta) require(t >= 0 && t <= std::numbers::pi + 1e-12, "theta outside [0, pi]");
    for (double p : grid.phi) require(p >= 0 && p < 2 * std::numbers::pi, "phi outside [0, 2 pi)");
    const int n_atoms = static_cast<int>(rho_a.dim()) - 1;
    return husimi(rho_a, grid.theta, grid.phi, [n_atoms](double t, double p) {
        return spin_coherent_amplitudes(t, p, n_atoms);
    });
}

} // namespace dicke
