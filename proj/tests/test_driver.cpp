#include "doctest.h"

#include "dicke/driver.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace dicke;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("dicke_qfi_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DICKE_QFI_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("format_double") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(INFINITY) == "inf");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(x).size() <= 24);
}

TEST_CASE("config validation and lambda grid") {
    SweepConfig c;
    CHECK_NOTHROW(c.validate());
    const auto g = c.lambda_grid();
    CHECK(g.size() == 101);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[54] == doctest::Approx(0.54));
    CHECK(c.n_atoms_list == std::vector<int>{2, 6, 10, 20});

    c.lambda_min = 2.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.lambda_steps = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.n_atoms_list = {2, 0};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.grid_points = 10;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.lambdas = {0.2, 0.1};
    CHECK(c.lambda_grid() == std::vector<double>{0.2, 0.1});
    c.lambda_steps = 1;
    c.lambdas.clear();
    CHECK(c.lambda_grid() == std::vector<double>{0.0});
}

TEST_CASE("sweep records") {
    SweepConfig c;
    c.n_atoms_list = {2, 6};
    c.lambdas = {0.0, 0.3, 0.54};
    const auto rows = run_sweep(c);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].n_atoms == 2);
    CHECK(rows[3].n_atoms == 6);
    CHECK(rows[1].lambda == 0.3);
    for (const auto& r : rows) {
        CHECK(r.F_A >= 0.0);
        CHECK(r.F_B >= 0.0);
        CHECK(r.xi2 > 0.0);
        CHECK(std::abs(r.parity_expect - 1.0) < 1e-6);
        CHECK(r.converged);
        CHECK(r.discarded_mass_A >= 0.0);
        CHECK(r.discarded_mass_B >= 0.0);
    }
    const auto& z = rows[3];
    CHECK(z.F_B == 0.0);
    CHECK(z.F_A == doctest::Approx(6.0));
    CHECK(z.xi2 == doctest::Approx(1.0));
    CHECK(z.quad_var_scaled == doctest::Approx(1.0));
    CHECK(std::isnan(z.F_B_scaled));
    // tests/oracles/dicke_oracle.py
    CHECK(rows[1].ground_energy == doctest::Approx(-1.048260718611317).epsilon(1e-12));
    CHECK(rows[1].nbar == doctest::Approx(0.028337413133855516).epsilon(1e-9));
    CHECK(rows[5].F_A == doctest::Approx(5.741337359756015).epsilon(1e-9));
    CHECK(rows[5].F_B_scaled == doctest::Approx(0.9655568477029006 / (4 * 0.32552483712168245)).epsilon(1e-9));
    CHECK(rows[5].F_A_scaled == doctest::Approx(5.741337359756015 / 6).epsilon(1e-9));
}

TEST_CASE("fixed cutoff override") {
    const auto a = analyze_point(ModelParams(1, 1, 0.3, 2), 1e-10, 25);
    CHECK(a.record.n_cutoff == 25);
    CHECK(a.search.trajectory.size() == 1);
    CHECK(a.record.converged);
    const auto b = analyze_point(ModelParams(1, 1, 1.0, 20), 1e-10, 30);
    CHECK_FALSE(b.record.converged);
}

TEST_CASE("worker count does not change output") {
    SweepConfig c;
    c.n_atoms_list = {2, 6};
    c.lambda_steps = 7;
    std::ostringstream one, four;
    write_sweep(c, run_sweep(c), one);
    c.workers = 4;
    write_sweep(c, run_sweep(c), four);
    CHECK(one.str() == four.str());
}

TEST_CASE("CSV layout") {
    SweepConfig c;
    c.n_atoms_list = {2};
    c.lambdas = {0.0, 0.5};
    std::ostringstream os;
    write_sweep(c, run_sweep(c), os);
    const auto ls = lines(os.str());
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] ==
          "lambda,n_atoms,n_cutoff,ground_energy,nbar,F_B,F_B_scaled,F_A,F_A_scaled,xi2,quad_var_scaled,"
          "parity_expect,discarded_mass_A,discarded_mass_B,converged");
    CHECK(ls[1].rfind("0,2,20,-1,0,0,nan,", 0) == 0);
    CHECK(ls[3].rfind("# dicke-qfi 0.1.0", 0) == 0);
    CHECK(os.str().find('\r') == std::string::npos);
}

TEST_CASE("JSON layout") {
    SweepConfig c;
    c.n_atoms_list = {2};
    c.lambdas = {0.0, 0.4};
    c.output_format = Format::json;
    std::ostringstream os;
    write_sweep(c, run_sweep(c), os);
    const auto doc = nlohmann::json::parse(os.str());
    CHECK(doc["meta"]["version"] == kVersion);
    CHECK(doc["meta"]["tol"] == 1e-10);
    CHECK(doc["rows"].size() == 2);
    CHECK(doc["rows"][0]["F_B_scaled"].is_null());
    CHECK(doc["rows"][1]["n_atoms"] == 2);
}

TEST_CASE("thermo rows") {
    SweepConfig c;
    c.mode = Mode::thermo;
    c.lambdas = {0.0, 0.5, 1.0};
    const auto rows = run_thermo(c);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].xi2 == doctest::Approx(1.0));
    CHECK(rows[0].F_A_per_N == doctest::Approx(1.0));
    CHECK(rows[0].quad_var_scaled == doctest::Approx(1.0));
    CHECK(rows[0].nbar_per_N == 0.0);
    CHECK(std::abs(rows[1].F_A_per_N - std::sqrt(2.0)) < 1e-9);
    CHECK(std::abs(rows[1].F_B_scaled - std::sqrt(2.0)) < 1e-9);
    CHECK(rows[1].guard_band);
    CHECK(rows[1].critical);
    CHECK(rows[2].mu == 0.25);
    CHECK(rows[2].nbar_per_N == doctest::Approx(0.9375));

    c.lambdas.clear();
    c.lambda_min = 0.5;
    c.lambda_max = 3.0;
    c.lambda_steps = 500;
    const auto fine = run_thermo(c);
    for (std::size_t i = 1; i < fine.size(); ++i) CHECK(fine[i].F_A_per_N < fine[i - 1].F_A_per_N);
}

TEST_CASE("scaling report") {
    SweepConfig c;
    c.mode = Mode::scaling;
    for (double w0 : {1.0, 2.0}) {
        c.omega0 = w0;
        const auto reps = run_scaling(c);
        REQUIRE(reps.size() == 2);
        CHECK(reps[0].side == Side::below);
        CHECK(reps[1].side == Side::above);
        for (const auto& r : reps) {
            CHECK(std::abs(r.eps1.exponent - 0.5) < 0.02);
            CHECK(std::abs(r.atoms_qfi.exponent + 0.5) < 0.03);
            CHECK(std::abs(r.field_qfi.exponent + 0.5) < 0.05);
        }
        std::ostringstream os;
        write_scaling(c, reps, os);
        CHECK(lines(os.str()).size() == 8);
    }
}

TEST_CASE("convergence traces") {
    SweepConfig c;
    c.mode = Mode::convergence;
    c.n_atoms_list = {20};
    c.lambdas = {0.0, 1.0};
    const auto t = run_convergence(c);
    REQUIRE(t.size() == 2);
    CHECK(t[0].steps.size() == 1);
    CHECK(t[0].steps[0].tail_population == 0.0);
    CHECK(t[1].converged);
    for (std::size_t i = 1; i < t[1].steps.size(); ++i) CHECK(t[1].steps[i].energy <= t[1].steps[i - 1].energy);
}

TEST_CASE("husimi output") {
    SweepConfig c;
    c.mode = Mode::husimi;
    c.n_atoms_list = {6};
    c.lambdas = {0.0};
    c.grid_points = 21;
    c.output_format = Format::json;
    const auto maps = run_husimi(c);
    REQUIRE(maps.size() == 1);
    CHECK(maps[0].atoms.values.rows() == 21);
    CHECK(maps[0].field.values.cols() == 21);
    std::ostringstream os;
    write_husimi(c, maps, os);
    const auto doc = nlohmann::json::parse(os.str());
    CHECK(doc["grid"][0]["atoms"]["Q_max"] == 1.0);
    CHECK(doc["grid"][0]["atoms"].contains("Q_normalized"));
    CHECK(doc["grid"][0]["atoms"]["theta"].size() == 21);

    c.output_format = Format::csv;
    std::ostringstream csv;
    write_husimi(c, maps, csv);
    CHECK(lines(csv.str())[0] == "n_atoms,lambda,subsystem,x,y,Q,Q_normalized");
    CHECK(lines(csv.str()).size() == 1 + 2 * 21 * 21 + 1);

    c.grid_points = 10;
    CHECK_THROWS_AS(run_husimi(c), InvalidArgument);
}

TEST_CASE("command line") {
    Scratch tmp;
    SUBCASE("determinism") {
        const std::string args = " sweep --n-atoms 2 --n-atoms 6 --lambda-steps 11 --workers 2 --out ";
        CHECK(run_cli(args + tmp.path("a.csv")) == 0);
        CHECK(run_cli(args + tmp.path("b.csv")) == 0);
        const auto a = slurp(tmp.path("a.csv"));
        CHECK(!a.empty());
        CHECK(a == slurp(tmp.path("b.csv")));
        CHECK(lines(a).size() == 1 + 22 + 1);
    }
    SUBCASE("exit codes") {
        CHECK(run_cli("sweep --n-atoms 0") == 2);
        CHECK(run_cli("sweep --lambda-min 1 --lambda-max 0") == 2);
        CHECK(run_cli("sweep --bogus") == 2);
        CHECK(run_cli("") == 2);
        CHECK(run_cli("sweep --format xml") == 2);
        CHECK(run_cli("husimi --grid-points 5") == 2);
        CHECK(run_cli("thermo --omega -1") == 2);
        CHECK(run_cli("thermo --out " + tmp.path("missing/dir/x.csv")) == 3);
        CHECK(run_cli("thermo --lambda-steps 5 --out " + tmp.path("t.csv")) == 0);
        CHECK(run_cli("scaling --out " + tmp.path("s.csv")) == 0);
    }
    SUBCASE("hard cap writes partial results and fails") {
        const auto out = tmp.path("cap.csv");
        CHECK(run_cli("convergence --n-atoms 20 --lambda 0 --lambda 1 --max-cutoff 120 --out " + out) == 4);
        const auto ls = lines(slurp(out));
        REQUIRE(ls.size() == 4);
        CHECK(ls[1].rfind("20,0,0,20,", 0) == 0);
        CHECK(ls[2].rfind("20,1,0,120,", 0) == 0);
        CHECK(ls[2].back() == '0');

        const auto sw = tmp.path("capsweep.csv");
        CHECK(run_cli("sweep --n-atoms 20 --lambda 0.2 --lambda 1 --max-cutoff 120 --out " + sw) == 4);
        CHECK(lines(slurp(sw)).size() == 4);
    }
    SUBCASE("config file with flag precedence") {
        const auto cfg = tmp.path("run.ini");
        {
            std::ofstream f(cfg);
            f << "n-atoms=2\nlambda-steps=3\nomega0=2.0\nformat=json\n";
        }
        const auto out = tmp.path("cfg.json");
        CHECK(run_cli("thermo --config " + cfg + " --omega0 3.0 --out " + out) == 0);
        const auto doc = nlohmann::json::parse(slurp(out));
        CHECK(doc["meta"]["omega0"] == 3.0);
        CHECK(doc["rows"].size() == 3);
        CHECK(run_cli("thermo --config " + tmp.path("nope.ini")) == 2);
    }
    SUBCASE("husimi defaults") {
        const auto out = tmp.path("h.json");
        CHECK(run_cli("husimi --grid-points 21 --out " + out) == 0);
        const auto doc = nlohmann::json::parse(slurp(out));
        REQUIRE(doc["grid"].size() == 3);
        CHECK(doc["grid"][0]["n_atoms"] == 20);
        CHECK(doc["grid"][1]["lambda"] == 0.54);
    }
}
