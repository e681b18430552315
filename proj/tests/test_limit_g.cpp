#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glvar/limit_g.hpp"

using namespace glvar;

namespace {

MinimizeOptions table_opts() {
    MinimizeOptions o;
    o.seed = 4242;
    o.restarts = 2;
    o.max_iters = 6000;
    o.grad_tol = 1e-8;
    return o;
}

// small but real build shared by the cases below
const GTable& small_table() {
    static const GTable table =
        build_g_table({0.0, 0.5, 1.0}, {4.0, 6.0, 8.0}, 0.25, table_opts());
    return table;
}

GTable synthetic_table(double g_half) {
    GTable t;
    t.b_grid = {0.0, 0.5, 1.0, 1.2};
    t.R_list = {8, 12, 16};
    for (double b : t.b_grid) {
        GTableEntry e;
        e.b = b;
        if (b >= 1.0) {
            e.g_extrap = 0.0;
        } else if (b == 0.0) {
            e.g_extrap = -0.5;
        } else {
            e.g_extrap = g_half;
        }
        t.entries.push_back(e);
    }
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("build_g_table input validation") {
    CHECK_THROWS_AS(build_g_table({0.0}, {8.0, 12.0}, 0.25, table_opts()), ConfigError);
    CHECK_THROWS_AS(build_g_table({0.0}, {12.0, 8.0, 16.0}, 0.25, table_opts()),
                    ConfigError);
    CHECK_THROWS_AS(build_g_table({0.5, 0.2}, {8.0, 12.0, 16.0}, 0.25, table_opts()),
                    ConfigError);
}

TEST_CASE("g table stores exact zeros at and above b = 1") {
    const GTable& t = small_table();
    CHECK(t.entries.back().b == 1.0);
    CHECK(t.entries.back().g_extrap == 0.0);
    CHECK(t.entries.back().m0_over_R2.empty());
}

TEST_CASE("g table range and remainder shape on the small build") {
    const GTable& t = small_table();
    for (const GTableEntry& e : t.entries) {
        CHECK(e.g_extrap >= -0.52);
        CHECK(e.g_extrap <= 0.0);
        for (std::size_t k = 0; k < e.m0_over_R2.size(); ++k) {
            const double y = e.m0_over_R2[k];
            CHECK(y >= e.g_extrap - 2e-2);
            CHECK(y <= e.g_extrap + e.c_fit / t.R_list[k] + 2e-2);
        }
    }
    CHECK(t.entries.front().g_extrap == doctest::Approx(-0.5).epsilon(0.04));
}

TEST_CASE("g_eval interpolation rules") {
    const GTable t = synthetic_table(-0.11);
    CHECK(g_eval(t, 2.7) == 0.0);
    CHECK(g_eval(t, 1.0) == 0.0);
    CHECK(g_eval(t, 0.0) == -0.5);
    CHECK(g_eval(t, 0.25) == doctest::Approx(0.5 * (-0.5 - 0.11)).epsilon(1e-14));
    CHECK(g_eval(t, 0.75) == doctest::Approx(0.5 * (-0.11 + 0.0)).epsilon(1e-14));
    CHECK_THROWS_AS(g_eval(t, -0.1), ConfigError);
}

TEST_CASE("validate_g accepts sane tables and flags violations") {
    const GValidation ok = validate_g(synthetic_table(-0.11));
    CHECK(ok.all_ok());

    // |g(0.5)| = 0.4 > (0.5-1)^2/2 = 0.125
    const GValidation bad = validate_g(synthetic_table(-0.4));
    CHECK(!bad.upper_bound);
    CHECK(!bad.all_ok());
    CHECK(!bad.failures.empty());

    const GValidation built = validate_g(small_table());
    CHECK(built.monotone);
    CHECK(built.upper_bound);
}

TEST_CASE("g table files round trip byte-stably") {
    const GTable& t = small_table();
    const std::string p1 = "gtable_roundtrip_1.csv";
    const std::string p2 = "gtable_roundtrip_2.csv";
    save_gtable(t, p1, "unit-test provenance");
    save_gtable(t, p2, "unit-test provenance");
    CHECK(slurp(p1) == slurp(p2));

    const GTable back = load_gtable(p1);
    REQUIRE(back.entries.size() == t.entries.size());
    REQUIRE(back.R_list.size() == t.R_list.size());
    for (std::size_t k = 0; k < t.entries.size(); ++k) {
        CHECK(back.entries[k].b == t.entries[k].b);
        CHECK(back.entries[k].g_extrap == t.entries[k].g_extrap);
        CHECK(back.entries[k].c_fit == t.entries[k].c_fit);
        for (std::size_t r = 0; r < t.entries[k].m0_over_R2.size(); ++r) {
            CHECK(back.entries[k].m0_over_R2[r] == t.entries[k].m0_over_R2[r]);
        }
    }
    const std::string p3 = "gtable_roundtrip_3.csv";
    save_gtable(back, p3, "unit-test provenance");
    CHECK(slurp(p3) == slurp(p1));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(p3.c_str());
}

TEST_CASE("load_gtable rejects corrupt files") {
    const std::string path = "gtable_corrupt.csv";
    {
        std::ofstream out(path);
        out << "# comment\nnot,a,header\n1,2,3\n";
    }
    CHECK_THROWS_AS(load_gtable(path), ConfigError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_gtable("gtable_missing_file.csv"), ConfigError);
}
