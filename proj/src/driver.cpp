#include "dicke/driver.hpp"

#include "json.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

namespace dicke {

namespace {

using json = nlohmann::json;

constexpr int kMinGridPoints = 11;

double parity_expectation(const GroundState& gs) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < gs.vector.size(); ++i) {
        const int exponent = gs.basis.fock(i) + gs.basis.spin_offset(i);
        p += (exponent % 2 == 0 ? 1.0 : -1.0) * std::norm(gs.vector(i));
    }
    return p;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const std::size_t threads = std::min<std::size_t>(std::max(1, workers), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Task {
    int n_atoms;
    double lambda;
};

std::vector<Task> tasks_for(const SweepConfig& config) {
    std::vector<Task> tasks;
    const auto grid = config.lambda_grid();
    for (int n : config.n_atoms_list)
        for (double l : grid) tasks.push_back({n, l});
    return tasks;
}

json meta_json(const SweepConfig& config) {
    static constexpr const char* modes[] = {"sweep", "husimi", "thermo", "convergence", "scaling"};
    json meta;
    meta["software"] = "dicke-qfi";
    meta["version"] = kVersion;
    meta["mode"] = modes[static_cast<int>(config.mode)];
    meta["omega"] = config.omega;
    meta["omega0"] = config.omega0;
    meta["tol"] = config.tol;
    meta["weight_floor"] = kWeightFloor;
    if (config.mode != Mode::thermo && config.mode != Mode::scaling) {
        meta["n_atoms"] = config.n_atoms_list;
        meta["max_cutoff"] = config.max_cutoff;
        if (config.fock_cutoff) meta["fock_cutoff"] = *config.fock_cutoff;
    }
    return meta;
}

std::string footer(const SweepConfig& config) {
    const json meta = meta_json(config);
    std::ostringstream os;
    os << "# dicke-qfi " << kVersion << " mode=" << meta["mode"].get<std::string>()
       << " omega=" << format_double(config.omega) << " omega0=" << format_double(config.omega0)
       << " tol=" << format_double(config.tol) << " weight_floor=" << format_double(kWeightFloor);
    if (config.fock_cutoff) os << " fock_cutoff=" << *config.fock_cutoff;
    os << '\n';
    return os.str();
}

json map_json(const HusimiMap& m, const char* xname, const char* yname, bool normalized) {
    json j;
    j[xname] = m.x;
    j[yname] = m.y;
    json values = json::array();
    json norm = json::array();
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        std::vector<double> row(m.values.cols()), nrow(m.values.cols());
        for (Eigen::Index k = 0; k < m.values.cols(); ++k) {
            row[k] = m.values(i, k);
            nrow[k] = m.values(i, k) / m.max;
        }
        values.push_back(row);
        norm.push_back(nrow);
    }
    j["Q"] = values;
    if (normalized) j["Q_normalized"] = norm;
    j["Q_max"] = m.max;
    j["argmax"] = {m.x_at_max, m.y_at_max};
    return j;
}

} // namespace

void SweepConfig::validate() const {
    require(std::isfinite(omega) && omega > 0, "--omega must be positive");
    require(std::isfinite(omega0) && omega0 > 0, "--omega0 must be positive");
    require(lambda_min >= 0, "--lambda-min must be non-negative");
    require(lambda_min <= lambda_max, "--lambda-min must not exceed --lambda-max");
    require(lambda_steps >= 1, "--lambda-steps must be at least 1");
    for (double l : lambdas) require(std::isfinite(l) && l >= 0, "--lambda values must be non-negative");
    require(!n_atoms_list.empty(), "at least one --n-atoms is required");
    for (int n : n_atoms_list) require(n >= 1, "--n-atoms must be at least 1");
    require(tol > 0, "--tol must be positive");
    require(!fock_cutoff || *fock_cutoff >= 1, "--fock-cutoff must be at least 1");
    require(max_cutoff >= 1, "--max-cutoff must be at least 1");
    require(!grid_points || *grid_points >= kMinGridPoints, "--grid-points must be at least 11");
    require(workers >= 1, "--workers must be at least 1");
}

std::vector<double> SweepConfig::lambda_grid() const {
    if (!lambdas.empty()) return lambdas;
    std::vector<double> grid(lambda_steps);
    for (int i = 0; i < lambda_steps; ++i)
        grid[i] = lambda_steps == 1 ? lambda_min
                                    : lambda_min + (lambda_max - lambda_min) * i / (lambda_steps - 1);
    return grid;
}

PointAnalysis analyze_point(const ModelParams& params, double tol, std::optional<int> fock_cutoff,
                            int max_cutoff) {
    CutoffSearch search;
    if (fock_cutoff) {
        search.state = ground_state(params, *fock_cutoff);
        const auto& c = search.state.convergence;
        search.trajectory.push_back({*fock_cutoff, search.state.energy, c.tail_population, c.energy_shift});
        search.converged = c.tail_population < tol;
    } else {
        search = search_cutoff(params, tol, max_cutoff);
    }
    const GroundState& gs = search.state;
    DensityMatrix rho_a = partial_trace_field(gs);
    DensityMatrix rho_b = partial_trace_atoms(gs);

    const QfiResult fb = qfi_field(rho_b);
    const QfiResult fa = qfi_atoms(rho_a);

    SweepRecord r;
    r.lambda = params.lambda;
    r.n_atoms = params.n_atoms;
    r.n_cutoff = gs.n_cutoff();
    r.ground_energy = gs.energy;
    r.nbar = fb.mean;
    r.F_B = fb.value;
    r.F_B_scaled = fb.scaled;
    r.F_A = fa.value;
    r.F_A_scaled = fa.scaled;
    r.xi2 = spin_squeezing_xi2(rho_a).xi2;
    r.quad_var_scaled = 4.0 * quadrature_variance(rho_b, std::numbers::pi / 2);
    r.parity_expect = parity_expectation(gs);
    r.discarded_mass_A = fa.discarded_mass;
    r.discarded_mass_B = fb.discarded_mass;
    r.converged = search.converged;
    return {std::move(search), std::move(rho_a), std::move(rho_b), r};
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
    config.validate();
    const auto tasks = tasks_for(config);
    std::vector<SweepRecord> rows(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        const ModelParams p(config.omega, config.omega0, tasks[i].lambda, tasks[i].n_atoms);
        rows[i] = analyze_point(p, config.tol, config.fock_cutoff, config.max_cutoff).record;
    });
    return rows;
}

std::vector<HusimiResult> run_husimi(const SweepConfig& config) {
    config.validate();
    const auto tasks = tasks_for(config);
    std::vector<HusimiResult> out(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        const ModelParams p(config.omega, config.omega0, tasks[i].lambda, tasks[i].n_atoms);
        const PointAnalysis a = analyze_point(p, config.tol, config.fock_cutoff, config.max_cutoff);
        HusimiResult& h = out[i];
        h.n_atoms = p.n_atoms;
        h.lambda = p.lambda;
        h.n_cutoff = a.search.state.n_cutoff();
        h.nbar = a.record.nbar;
        const int pts = config.grid_points.value_or(0);
        h.atoms = husimi_atoms(a.rho_a, pts ? SphereGrid::uniform(pts, pts) : SphereGrid::uniform());
        h.field = husimi_field(a.rho_b, pts ? AlphaGrid::for_mean_number(h.nbar, pts)
                                            : AlphaGrid::for_mean_number(h.nbar));
    });
    return out;
}

std::vector<ThermoRow> run_thermo(const SweepConfig& config) {
    config.validate();
    const Frequencies freq(config.omega, config.omega0);
    std::vector<ThermoRow> rows;
    for (double l : config.lambda_grid()) {
        const ThermoPoint pt = thermo_point(freq, l);
        const FieldQfiThermo fb = qfi_field_thermo(pt, 1.0);
        ThermoRow r;
        r.lambda = l;
        r.mu = pt.mu;
        r.eps1 = pt.eps1;
        r.eps2 = pt.eps2;
        r.xi2 = xi2_thermo(pt);
        r.F_A_per_N = qfi_atoms_thermo(pt, 1.0);
        r.quad_var_scaled = 4.0 * quad_variance_thermo(pt);
        r.F_B_scaled = field_scaled_limit(pt);
        r.nbar_per_N = pt.beta_s2_per_N;
        r.guard_band = fb.guard_band;
        r.critical = pt.critical;
        rows.push_back(r);
    }
    return rows;
}

std::vector<ScalingReport> run_scaling(const SweepConfig& config) {
    config.validate();
    const Frequencies freq(config.omega, config.omega0);
    return {critical_scaling_probe(freq, Side::below), critical_scaling_probe(freq, Side::above)};
}

std::vector<ConvergenceTrace> run_convergence(const SweepConfig& config) {
    config.validate();
    const auto tasks = tasks_for(config);
    std::vector<ConvergenceTrace> out(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        const ModelParams p(config.omega, config.omega0, tasks[i].lambda, tasks[i].n_atoms);
        CutoffSearch s = search_cutoff(p, config.tol, config.max_cutoff);
        out[i] = {p.n_atoms, p.lambda, std::move(s.trajectory), s.converged};
    });
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

void write_sweep(const SweepConfig& config, const std::vector<SweepRecord>& rows, std::ostream& os) {
    if (config.output_format == Format::json) {
        json doc;
        doc["meta"] = meta_json(config);
        doc["rows"] = json::array();
        for (const auto& r : rows) {
            doc["rows"].push_back({{"lambda", r.lambda},
                                   {"n_atoms", r.n_atoms},
                                   {"n_cutoff", r.n_cutoff},
                                   {"ground_energy", r.ground_energy},
                                   {"nbar", r.nbar},
                                   {"F_B", r.F_B},
                                   {"F_B_scaled", r.F_B_scaled},
                                   {"F_A", r.F_A},
                                   {"F_A_scaled", r.F_A_scaled},
                                   {"xi2", r.xi2},
                                   {"quad_var_scaled", r.quad_var_scaled},
                                   {"parity_expect", r.parity_expect},
                                   {"discarded_mass_A", r.discarded_mass_A},
                                   {"discarded_mass_B", r.discarded_mass_B},
                                   {"converged", r.converged}});
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "lambda,n_atoms,n_cutoff,ground_energy,nbar,F_B,F_B_scaled,F_A,F_A_scaled,xi2,"
          "quad_var_scaled,parity_expect,discarded_mass_A,discarded_mass_B,converged\n";
    for (const auto& r : rows) {
        os << format_double(r.lambda) << ',' << r.n_atoms << ',' << r.n_cutoff << ','
           << format_double(r.ground_energy) << ',' << format_double(r.nbar) << ','
           << format_double(r.F_B) << ',' << format_double(r.F_B_scaled) << ','
           << format_double(r.F_A) << ',' << format_double(r.F_A_scaled) << ','
           << format_double(r.xi2) << ',' << format_double(r.quad_var_scaled) << ','
           << format_double(r.parity_expect) << ',' << format_double(r.discarded_mass_A) << ','
           << format_double(r.discarded_mass_B) << ',' << (r.converged ? 1 : 0) << '\n';
    }
    os << footer(config);
}

void write_husimi(const SweepConfig& config, const std::vector<HusimiResult>& maps, std::ostream& os) {
    if (config.output_format == Format::json) {
        json doc;
        doc["meta"] = meta_json(config);
        doc["grid"] = json::array();
        for (const auto& h : maps) {
            doc["grid"].push_back({{"n_atoms", h.n_atoms},
                                   {"lambda", h.lambda},
                                   {"n_cutoff", h.n_cutoff},
                                   {"nbar", h.nbar},
                                   {"atoms", map_json(h.atoms, "theta", "phi", true)},
                                   {"field", map_json(h.field, "re_alpha", "im_alpha", false)}});
        }
        os << doc.dump() << '\n';
        return;
    }
    os << "n_atoms,lambda,subsystem,x,y,Q,Q_normalized\n";
    for (const auto& h : maps) {
        for (const auto* m : {&h.atoms, &h.field}) {
            const char* name = m == &h.atoms ? "atoms" : "field";
            for (Eigen::Index i = 0; i < m->values.rows(); ++i) {
                for (Eigen::Index k = 0; k < m->values.cols(); ++k) {
                    os << h.n_atoms << ',' << format_double(h.lambda) << ',' << name << ','
                       << format_double(m->x[i]) << ',' << format_double(m->y[k]) << ','
                       << format_double(m->values(i, k)) << ','
                       << format_double(m->values(i, k) / m->max) << '\n';
                }
            }
        }
    }
    os << footer(config);
}

void write_thermo(const SweepConfig& config, const std::vector<ThermoRow>& rows, std::ostream& os) {
    if (config.output_format == Format::json) {
        json doc;
        doc["meta"] = meta_json(config);
        doc["meta"]["lambda_cr"] = Frequencies(config.omega, config.omega0).lambda_cr();
        doc["rows"] = json::array();
        for (const auto& r : rows) {
            doc["rows"].push_back({{"lambda", r.lambda},
                                   {"mu", r.mu},
                                   {"eps1", r.eps1},
                                   {"eps2", r.eps2},
                                   {"xi2", r.xi2},
                                   {"F_A_per_N", r.F_A_per_N},
                                   {"quad_var_scaled", r.quad_var_scaled},
                                   {"F_B_scaled", r.F_B_scaled},
                                   {"nbar_per_N", r.nbar_per_N},
                                   {"guard_band", r.guard_band},
                                   {"critical", r.critical}});
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "lambda,mu,eps1,eps2,xi2,F_A_per_N,quad_var_scaled,F_B_scaled,nbar_per_N,guard_band,critical\n";
    for (const auto& r : rows) {
        os << format_double(r.lambda) << ',' << format_double(r.mu) << ',' << format_double(r.eps1)
           << ',' << format_double(r.eps2) << ',' << format_double(r.xi2) << ','
           << format_double(r.F_A_per_N) << ',' << format_double(r.quad_var_scaled) << ','
           << format_double(r.F_B_scaled) << ',' << format_double(r.nbar_per_N) << ','
           << (r.guard_band ? 1 : 0) << ',' << (r.critical ? 1 : 0) << '\n';
    }
    os << footer(config);
}

void write_scaling(const SweepConfig& config, const std::vector<ScalingReport>& reps, std::ostream& os) {
    auto side_name = [](Side s) { return s == Side::below ? "below" : "above"; };
    const std::pair<const char*, PowerLawFit ScalingReport::*> quantities[] = {
        {"eps1", &ScalingReport::eps1},
        {"dF_A_per_N", &ScalingReport::atoms_qfi},
        {"dF_B_scaled", &ScalingReport::field_qfi}};
    if (config.output_format == Format::json) {
        json doc;
        doc["meta"] = meta_json(config);
        doc["meta"]["lambda_cr"] = Frequencies(config.omega, config.omega0).lambda_cr();
        doc["rows"] = json::array();
        for (const auto& rep : reps) {
            for (const auto& [name, member] : quantities) {
                const PowerLawFit& f = rep.*member;
                doc["rows"].push_back({{"side", side_name(rep.side)},
                                       {"quantity", name},
                                       {"exponent", f.exponent},
                                       {"prefactor", f.prefactor},
                                       {"residual", f.residual},
                                       {"low_confidence", f.low_confidence}});
            }
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "side,quantity,exponent,prefactor,residual,low_confidence\n";
    for (const auto& rep : reps) {
        for (const auto& [name, member] : quantities) {
            const PowerLawFit& f = rep.*member;
            os << side_name(rep.side) << ',' << name << ',' << format_double(f.exponent) << ','
               << format_double(f.prefactor) << ',' << format_double(f.residual) << ','
               << (f.low_confidence ? 1 : 0) << '\n';
        }
    }
    os << footer(config);
}

void write_convergence(const SweepConfig& config, const std::vector<ConvergenceTrace>& traces,
                       std::ostream& os) {
    if (config.output_format == Format::json) {
        json doc;
        doc["meta"] = meta_json(config);
        doc["rows"] = json::array();
        for (const auto& t : traces) {
            json steps = json::array();
            for (const auto& s : t.steps) {
                steps.push_back({{"n_cutoff", s.n_cutoff},
                                 {"energy", s.energy},
                                 {"tail_population", s.tail_population},
                                 {"energy_shift", s.energy_shift}});
            }
            doc["rows"].push_back({{"n_atoms", t.n_atoms},
                                   {"lambda", t.lambda},
                                   {"converged", t.converged},
                                   {"trajectory", steps}});
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "n_atoms,lambda,step,n_cutoff,energy,tail_population,energy_shift,converged\n";
    for (const auto& t : traces) {
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            const auto& s = t.steps[i];
            os << t.n_atoms << ',' << format_double(t.lambda) << ',' << i << ',' << s.n_cutoff << ','
               << format_double(s.energy) << ',' << format_double(s.tail_population) << ','
               << format_double(s.energy_shift) << ',' << (t.converged ? 1 : 0) << '\n';
        }
    }
    os << footer(config);
}

int run(const SweepConfig& config) {
    config.validate();
    std::ostringstream buffer;
    int code = 0;
    switch (config.mode) {
    case Mode::sweep: {
        const auto rows = run_sweep(config);
        write_sweep(config, rows, buffer);
        for (const auto& r : rows)
            if (!r.converged) code = 4;
        break;
    }
    case Mode::husimi:
        write_husimi(config, run_husimi(config), buffer);
        break;
    case Mode::thermo:
        write_thermo(config, run_thermo(config), buffer);
        break;
    case Mode::scaling: {
        const auto reps = run_scaling(config);
        write_scaling(config, reps, buffer);
        for (const auto& r : reps)
            if (r.low_confidence()) code = 4;
        break;
    }
    case Mode::convergence: {
        const auto traces = run_convergence(config);
        write_convergence(config, traces, buffer);
        for (const auto& t : traces)
            if (!t.converged) code = 4;
        break;
    }
    }

    if (config.output_path.empty()) {
        std::cout << buffer.str();
        std::cout.flush();
    } else {
        std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open output file: " + config.output_path);
        out << buffer.str();
        out.close();
        if (!out) throw IoError("failed writing output file: " + config.output_path);
    }
    return code;
}

} // namespace dicke
