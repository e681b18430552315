#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "glvar/config.hpp"

using namespace glvar;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GLVAR_BIN) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int rc = std::system(cmd.c_str());
    return (rc >= 256) ? rc / 256 : rc;  // decode wait status
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parser: sections, diagnostics, lists") {
    const ConfigFile cfg = ConfigFile::parse_text(
        "# comment\n[model]\nkappa = 8\nprofile = constant(1)\n[grid]\nnx=33\n"
        "[g_table]\nR_list = 8, 12, 16\n",
        "inline");
    CHECK(cfg.require_double("model.kappa") == 8.0);
    CHECK(cfg.get_int("grid.nx", 0) == 33);
    CHECK(cfg.require_string("model.profile") == "constant(1)");
    CHECK(cfg.get_list("g_table.R_list", {}).size() == 3);
    CHECK(cfg.get_double("missing.key", 2.5) == 2.5);
    CHECK_THROWS_AS(cfg.require_double("missing.key"), ConfigError);

    CHECK_THROWS_WITH_AS(ConfigFile::parse_text("[model]\nkappa 8\n", "bad.ini"),
                         doctest::Contains("bad.ini:2"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_text("[model\nk = 1\n", "bad.ini"), ConfigError);
    CHECK_THROWS_AS(
        ConfigFile::parse_text("[model]\nkappa = abc\n", "bad.ini").require_double("model.kappa"),
        ConfigError);
}

TEST_CASE("cli: usage errors") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("minimize --config does_not_exist.ini") == 2);
    CHECK(run_cli("minimize --bogus-flag 3") == 2);
    CHECK(run_cli("help") == 0);
}

TEST_CASE("cli: g-table runs are deterministic and validated") {
    write_file("gt_small.ini",
               "[g_table]\nb_grid = 0, 1.0, 1.2\nR_list = 4, 6, 8\nh = 0.25\n"
               "seed = 11\nrestarts = 1\nmax_iters = 4000\n");
    CHECK(run_cli("g-table --config gt_small.ini --out gt_small_1.csv") == 0);
    CHECK(run_cli("g-table --config gt_small.ini --out gt_small_2.csv") == 0);
    CHECK(slurp("gt_small_1.csv") == slurp("gt_small_2.csv"));
    CHECK(slurp("gt_small_1.csv").rfind("# ", 0) == 0);  // provenance first line

    write_file("gt_bad.ini", "[g_table]\nb_grid = 0\nR_list = 8, 12\n");
    CHECK(run_cli("g-table --config gt_bad.ini --out gt_bad.csv") == 2);
}

TEST_CASE("cli: minimize smoke run and refusals") {
    write_file("min_ok.ini",
               "[model]\nkappa = 3\nH = 1.5\nprofile = constant(1)\n"
               "[grid]\nnx = 21\n"
               "[minimize]\nseed = 5\nrestarts = 1\nmax_iters = 20000\ngrad_tol = 1e-6\n");
    CHECK(run_cli("minimize --config min_ok.ini --out min_rows.csv") == 0);
    const std::string rows = slurp("min_rows.csv");
    CHECK(rows.find("kappa,H,profile") != std::string::npos);

    write_file("min_zero.ini",
               "[model]\nkappa = 3\nH = 1.5\nprofile = constant(0)\n[grid]\nnx = 17\n");
    CHECK(run_cli("minimize --config min_zero.ini") == 2);

    // linear profile crossing zero is a valid input
    write_file("min_linear.ini",
               "[model]\nkappa = 3\nH = 1.5\nprofile = linear(1,-0.5)\n"
               "[grid]\nnx = 21\n[minimize]\nseed = 5\nrestarts = 1\nmax_iters = 20000\n");
    CHECK(run_cli("minimize --config min_linear.ini") == 0);
}

TEST_CASE("cli: verify requires a sane table") {
    CHECK(run_cli("verify --config does_not_exist.ini") == 2);
    write_file("verify_missing.ini", "[verify]\ntable = no_such_table.csv\n");
    CHECK(run_cli("verify --config verify_missing.ini") == 2);
    write_file("broken.csv", "# comment\nnot,a,table\n");
    write_file("verify_broken.ini", "[verify]\ntable = broken.csv\n");
    CHECK(run_cli("verify --config verify_broken.ini") == 2);
}

TEST_CASE("cli: poisson-check reports second-order convergence") {
    write_file("poisson.ini", "[poisson_check]\nnx_list = 17, 33, 65\n");
    CHECK(run_cli("poisson-check --config poisson.ini --out poisson_out.csv") == 0);
    CHECK(slurp("poisson_out.csv").find("order") != std::string::npos);
}

TEST_CASE("cli: phase-check scaling on a modest grid") {
    write_file("phase.ini",
               "[phase_check]\nnx = 129\nell = 0.1\nlevels = 1\n"
               "profiles = linear(1,0)\n");
    CHECK(run_cli("phase-check --config phase.ini --out phase_out.csv") == 0);
}
