#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ocstab/catalog.hpp"
#include "ocstab/config.hpp"
#include "ocstab/csv.hpp"

using namespace ocstab;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "ocstab_cfg_tests";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMinimal = R"(
problem.dim = 1
problem.n = 17
problem.integrand = tracking
problem.target = sinpi(10, 2)
problem.zeta = constant(1)
problem.alpha = constant(-0.5)
problem.beta = constant(0.5)
)";

const char* kBangBang = R"(
problem.dim = 1
problem.n = 32
problem.integrand = tracking
problem.target_mode = manufactured_adjoint
problem.adjoint_shape = linear(0, 1, -0.5)
problem.alpha = constant(-1)
problem.beta = constant(1)
problem.norm_mode = bangbang
measure.epsilons = [0.35, 0.2, 0.11, 0.063]
)";

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const std::string path = write_temp("minimal.cfg", kMinimal);
    RunConfig cfg = parse_config(path);
    CHECK(cfg.instance.domain.n[0] == 17);
    CHECK(cfg.instance.mode == NormMode::AllL2);
    CHECK(cfg.seed == 1);
    CHECK(cfg.fd.steps.size() == 4);
    CHECK(cfg.fd_directions.size() == 4);  // pure directions by default
    CHECK_FALSE(cfg.config_hash.empty());
}

TEST_CASE("all validation errors are reported together") {
    const std::string path = write_temp("broken.cfg", R"(
problem.dim = 1
problem.n = 17
problem.nonlinearity = pancake
problem.zeta = constant(nope)
problem.mystery = 3
solver.newton_tol = abc
)");
    try {
        parse_config(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& ex) {
        CHECK(ex.errors.size() >= 4);
        bool unknown_key = false, bad_nonlin = false, bad_number = false, bad_field = false;
        for (const auto& e : ex.errors) {
            if (e.find("unknown key 'problem.mystery'") != std::string::npos) unknown_key = true;
            if (e.find("pancake") != std::string::npos && e.find("catalog") != std::string::npos)
                bad_nonlin = true;
            if (e.find("solver.newton_tol") != std::string::npos) bad_number = true;
            if (e.find("problem.zeta") != std::string::npos) bad_field = true;
        }
        CHECK(unknown_key);
        CHECK(bad_nonlin);
        CHECK(bad_number);
        CHECK(bad_field);
    }
}

TEST_CASE("regime error names the offending keys for holder-sweep") {
    const std::string path = write_temp("regime.cfg", kMinimal);
    RunConfig cfg = parse_config(path);
    cfg.out_dir = (fs::temp_directory_path() / "ocstab_cfg_tests" / "out_regime").string();
    try {
        run("holder-sweep", cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& ex) {
        bool zeta = false, mode = false;
        for (const auto& e : ex.errors) {
            if (e.find("problem.zeta") != std::string::npos) zeta = true;
            if (e.find("problem.norm_mode") != std::string::npos) mode = true;
        }
        CHECK(zeta);
        CHECK(mode);
    }
}

TEST_CASE("field catalog: atoms and products") {
    const GridDomain d = make_grid(0.0, 1.0, 9);
    CHECK(parse_field("constant(2.5)", d)[3] == doctest::Approx(2.5));
    const GridField lin = parse_field("linear(0, 2, 1)", d);
    CHECK(lin[0] == doctest::Approx(1.0 + 2.0 * d.coord(0, 0)));
    const GridField cube = parse_field("linear(0,1,-0.5)*linear(0,1,-0.5)*linear(0,1,-0.5)", d);
    const double t = d.coord(0, 2) - 0.5;
    CHECK(cube[2] == doctest::Approx(t * t * t));
    const GridField ind = parse_field("indicator(0.25, 0.75, 3)", d);
    for (int i = 0; i < d.n[0]; ++i) {
        const double x = d.coord(0, i);
        CHECK(ind[i] == doctest::Approx(x >= 0.25 && x <= 0.75 ? 3.0 : 0.0));
    }
    CHECK_THROWS_AS(parse_field("mystery(1)", d), std::invalid_argument);
    CHECK_THROWS_AS(parse_field("sinpi(1)", d), std::invalid_argument);  // missing mode
    CHECK_THROWS_AS(parse_field("linear(7, 1, 0)", d), std::invalid_argument);  // bad axis
}

TEST_CASE("csv format: 17 significant digits, scientific") {
    CHECK(CsvWriter::format(1.0) == "1.0000000000000000e+00");
    CHECK(CsvWriter::format(-0.5) == "-5.0000000000000000e-01");
    CHECK(CsvWriter::format(3.141592653589793) == "3.1415926535897931e+00");
}

TEST_CASE("run solve: artifacts, summary, determinism") {
    const std::string path = write_temp("solve.cfg", kMinimal);
    const fs::path base = fs::temp_directory_path() / "ocstab_cfg_tests";

    RunConfig cfg1 = parse_config(path);
    cfg1.out_dir = (base / "out_a").string();
    const RunSummary s1 = run("solve", cfg1);
    CHECK(s1.pass);
    CHECK(fs::exists(base / "out_a" / "solution.csv"));
    CHECK(fs::exists(base / "out_a" / "summary.txt"));

    RunConfig cfg2 = parse_config(path);
    cfg2.out_dir = (base / "out_b").string();
    const RunSummary s2 = run("solve", cfg2);
    CHECK(slurp((base / "out_a" / "solution.csv").string()) ==
          slurp((base / "out_b" / "solution.csv").string()));
    CHECK(s1.config_hash == s2.config_hash);
}

TEST_CASE("run measure-fit on the bang-bang config") {
    const std::string path = write_temp("bb.cfg", kBangBang);
    RunConfig cfg = parse_config(path);
    cfg.out_dir =
        (fs::temp_directory_path() / "ocstab_cfg_tests" / "out_measure").string();
    const RunSummary s = run("measure-fit", cfg);
    CHECK(s.pass);
    double kappa = 0.0;
    for (const auto& [k, v] : s.headline)
        if (k == "kappa_hat") kappa = v;
    CHECK(kappa == doctest::Approx(1.0).epsilon(0.12));
}

TEST_CASE("unknown command is rejected with the command list") {
    const std::string path = write_temp("minimal2.cfg", kMinimal);
    RunConfig cfg = parse_config(path);
    CHECK_THROWS_WITH_AS(run("dance", cfg),
                         doctest::Contains("unknown command"), std::invalid_argument);
}
