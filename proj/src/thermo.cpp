#include "dicke/thermo.hpp"

#include "dicke/error.hpp"

#include <cmath>
#include <limits>

namespace dicke {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sum_eps(const ThermoPoint& pt) { return pt.eps1 + pt.eps2; }

bool in_guard_band(const ThermoPoint& pt) {
    const double lc = pt.freq.lambda_cr();
    return pt.critical || std::abs(pt.lambda - lc) < kCriticalGuard * lc;
}

// Omega * coth_half for the field, eps1 c^2 + eps2 s^2 (regular everywhere).
double field_weighted_energy(const ThermoPoint& pt) {
    return pt.eps1 * pt.c * pt.c + pt.eps2 * pt.s * pt.s;
}

double field_fluctuation_qfi(const ThermoPoint& pt) {
    if (pt.critical) return kInf;
    const double w = pt.freq.omega;
    const double big = pt.Omega_field;
    const double delta_minus = (w * w - big * big) / (4.0 * w * big);
    // 8 Delta_-^2 (e+1)^2/(e^2+1) with (e+1)^2/(e^2+1) = 2 r^2 / (r^2 + 1)
    const double r = pt.coth_half;
    return 16.0 * delta_minus * delta_minus / (1.0 + 1.0 / (r * r));
}

} // namespace

Frequencies::Frequencies(double omega_, double omega0_) : omega(omega_), omega0(omega0_) {
    require(std::isfinite(omega) && omega > 0, "omega must be positive");
    require(std::isfinite(omega0) && omega0 > 0, "omega0 must be positive");
}

double Frequencies::lambda_cr() const { return std::sqrt(omega * omega0) / 2.0; }

double ThermoPoint::detuning() const {
    const double w0 = freq.omega0 / mu;
    return w0 * w0 - freq.omega * freq.omega;
}

ThermoPoint thermo_point(const Frequencies& freq, double lambda) {
    require(std::isfinite(lambda) && lambda >= 0, "lambda must be non-negative");
    const double w = freq.omega;
    const double w0 = freq.omega0;
    const double lc = freq.lambda_cr();

    ThermoPoint pt;
    pt.freq = freq;
    pt.lambda = lambda;
    pt.phase = lambda <= lc ? Phase::normal : Phase::superradiant;
    pt.mu = pt.phase == Phase::normal ? 1.0 : (lc / lambda) * (lc / lambda);
    const double mu = pt.mu;
    pt.alpha_s2_per_N = (1.0 - mu) / 2.0;
    pt.beta_s2_per_N = (lambda / w) * (lambda / w) * (1.0 - mu * mu);
    pt.omega_tilde = w0 * (1.0 + mu) / (2.0 * mu);

    const double wa = w0 / mu;
    const double detuning = wa * wa - w * w;
    const double coupling = 4.0 * lambda * std::sqrt(w0 * w * mu);
    const double split = std::hypot(detuning, coupling);  // eps2^2 - eps1^2
    const double eps2_sq = 0.5 * (w * w + wa * wa) + 0.5 * split;
    // eps1^2 eps2^2 in factored form, exactly zero at lambda_cr
    const double product = pt.phase == Phase::normal
                               ? 4.0 * w * w0 * (lc - lambda) * (lc + lambda)
                               : 16.0 * (lambda - lc) * (lambda + lc) * (lambda * lambda + lc * lc);
    pt.eps2 = std::sqrt(eps2_sq);
    pt.eps1 = std::sqrt(std::max(0.0, product / eps2_sq));
    pt.critical = pt.eps1 == 0.0;

    pt.gamma = 0.5 * std::atan2(coupling, detuning);
    pt.c = std::cos(pt.gamma);
    pt.s = std::sin(pt.gamma);

    const double e1 = pt.eps1, e2 = pt.eps2, c2 = pt.c * pt.c, s2 = pt.s * pt.s;
    const double mix = (e1 - e2) * (e1 - e2) * c2 * s2;
    // eps1 eps2 coth_half, finite even where coth_half is not
    const double scaled_root = std::sqrt(e1 * e2 * (e1 * e2 + mix));
    if (pt.critical) {
        pt.coth_half = kInf;
        pt.exp_bOmega_atoms = pt.exp_bOmega_field = 1.0;
    } else {
        pt.coth_half = std::sqrt(1.0 + mix / (e1 * e2));
        pt.exp_bOmega_atoms = pt.exp_bOmega_field =
            mix == 0.0 ? kInf : (pt.coth_half + 1.0) / (pt.coth_half - 1.0);
    }
    pt.Omega_atoms = scaled_root / (e1 * c2 + e2 * s2);
    pt.Omega_field = scaled_root / (e1 * s2 + e2 * c2);
    return pt;
}

double xi2_thermo(const ThermoPoint& pt) {
    const double sum = sum_eps(pt);
    return pt.mu / (2.0 * pt.freq.omega0) * (sum + pt.detuning() / sum);
}

double qfi_atoms_thermo(const ThermoPoint& pt, double n_atoms) {
    return n_atoms * pt.mu * pt.mu / xi2_thermo(pt);
}

double quad_variance_thermo(const ThermoPoint& pt) {
    const double sum = sum_eps(pt);
    return (sum - pt.detuning() / sum) / (8.0 * pt.freq.omega);
}

double nbar_fluctuation(const ThermoPoint& pt) {
    const double w = pt.freq.omega;
    const double upper = pt.s * pt.s * (pt.eps2 - w) * (pt.eps2 - w) / pt.eps2;
    const double c2 = pt.c * pt.c;
    double lower = 0.0;
    if (c2 != 0.0) lower = pt.critical ? kInf : c2 * (pt.eps1 - w) * (pt.eps1 - w) / pt.eps1;
    return (upper + lower) / (4.0 * w);
}

double nbar_thermo(const ThermoPoint& pt, double n_atoms) {
    const double coherent = pt.beta_s2_per_N == 0.0 ? 0.0 : n_atoms * pt.beta_s2_per_N;
    return nbar_fluctuation(pt) + coherent;
}

double field_scaled_limit(const ThermoPoint& pt) {
    if (in_guard_band(pt) || pt.phase == Phase::superradiant)
        return 1.0 / (4.0 * quad_variance_thermo(pt));
    const double n = nbar_fluctuation(pt);
    return n > 0.0 ? field_fluctuation_qfi(pt) / (4.0 * n) : kNaN;
}

FieldQfiThermo qfi_field_thermo(const ThermoPoint& pt, double n_atoms) {
    require(n_atoms > 0, "n_atoms must be positive");
    FieldQfiThermo out;
    const double beta2 = pt.beta_s2_per_N == 0.0 ? 0.0 : n_atoms * pt.beta_s2_per_N;
    const double coherent_rate = 4.0 * pt.freq.omega / field_weighted_energy(pt);
    out.value = field_fluctuation_qfi(pt) + (beta2 == 0.0 ? 0.0 : coherent_rate * beta2);
    out.nbar = nbar_fluctuation(pt) + beta2;
    out.guard_band = in_guard_band(pt);
    if (out.guard_band)
        out.scaled = 1.0 / (4.0 * quad_variance_thermo(pt));
    else if (out.nbar == 0.0)
        out.scaled = kNaN;
    else if (std::isinf(out.nbar))
        out.scaled = coherent_rate / 4.0;
    else
        out.scaled = out.value / (4.0 * out.nbar);
    return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          double residual_threshold, int corrections) {
    require(corrections >= 0, "correction count must be non-negative");
    const auto cols = 2 + corrections;
    require(x.size() == y.size() && x.size() >= static_cast<std::size_t>(cols),
            "power-law fit needs more points than parameters");
    const auto rows = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd ly(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        require(x[i] > 0 && y[i] != 0 && std::isfinite(y[i]), "power-law fit needs finite nonzero data");
        design(i, 0) = 1.0;
        design(i, 1) = std::log(x[i]);
        // analytic corrections in powers of sqrt(x)
        for (int c = 1; c <= corrections; ++c) design(i, 1 + c) = std::pow(x[i], 0.5 * c);
        ly(i) = std::log(std::abs(y[i]));
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(ly);
    PowerLawFit fit;
    fit.exponent = coef(1);
    fit.prefactor = std::exp(coef(0));
    fit.residual = std::sqrt((design * coef - ly).squaredNorm() / static_cast<double>(rows));
    fit.low_confidence = fit.residual > residual_threshold;
    return fit;
}

ScalingReport critical_scaling_probe(const Frequencies& freq, Side side, const ScalingOptions& opt) {
    require(opt.points >= 3, "scaling probe needs at least three points");
    require(opt.distance_min > 0 && opt.distance_max > opt.distance_min, "bad distance range");
    const double lc = freq.lambda_cr();
    const double h = opt.step * lc;
    require(h > 0 && h < opt.distance_min, "derivative step must be below the closest distance");
    const double sign = side == Side::below ? -1.0 : 1.0;

    auto atoms = [&](double l) { return qfi_atoms_thermo(thermo_point(freq, l), 1.0); };
    auto field = [&](double l) { return field_scaled_limit(thermo_point(freq, l)); };
    auto derivative = [h](auto&& f, double l) { return (f(l + h) - f(l - h)) / (2.0 * h); };

    std::vector<double> dist, eps1, d_atoms, d_field;
    const double log_lo = std::log(opt.distance_min);
    const double log_hi = std::log(opt.distance_max);
    for (int i = 0; i < opt.points; ++i) {
        const double d = std::exp(log_lo + (log_hi - log_lo) * i / (opt.points - 1));
        const double l = lc + sign * d;
        dist.push_back(d);
        eps1.push_back(thermo_point(freq, l).eps1);
        d_atoms.push_back(derivative(atoms, l));
        d_field.push_back(derivative(field, l));
    }

    ScalingReport rep;
    rep.side = side;
    rep.eps1 = fit_power_law(dist, eps1, opt.residual_threshold, opt.corrections);
    rep.atoms_qfi = fit_power_law(dist, d_atoms, opt.residual_threshold, opt.corrections);
    rep.field_qfi = fit_power_law(dist, d_field, opt.residual_threshold, opt.corrections);
    return rep;
}

UltrastrongReference ultrastrong_reference(const ModelParams& p) {
    UltrastrongReference ref;
    const double n = p.n_atoms;
    ref.alpha0 = p.lambda * std::sqrt(n) / p.omega;
    ref.nbar = ref.alpha0 * ref.alpha0;
    ref.var_jy = n / 4.0;
    ref.var_x0 = ref.nbar + 0.25;
    ref.var_jx = n * n / 4.0;
    return ref;
}

} // namespace dicke
