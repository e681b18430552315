// glvar: batch driver for Ginzburg-Landau energy experiments with a variable
// applied field. Subcommands: g-table, minimize, verify, phase-check,
// poisson-check. Exit codes: 0 success, 1 property failure, 2 usage/config
// error, 3 numeric non-convergence.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glvar/asymptotics.hpp"
#include "glvar/config.hpp"
#include "glvar/profiles.hpp"

namespace {

using namespace glvar;

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsageError = 2;
constexpr int kNumericFailure = 3;

struct CliArgs {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
};

void print_usage(std::ostream& os) {
    os << "usage: glvar <command> --config PATH [--out PATH] [--seed N]\n"
          "commands:\n"
          "  g-table        tabulate the limiting bulk energy g(b)\n"
          "  minimize       minimize the full functional for one (kappa, H, B0)\n"
          "  verify         run the bulk-energy comparison suite over a kappa sweep\n"
          "  phase-check    cell-size scaling of the local gauge phase splitting\n"
          "  poisson-check  manufactured-solution convergence of the F construction\n";
}

CliArgs parse_args(int argc, char** argv) {
    if (argc < 2) throw ConfigError("missing command");
    CliArgs args;
    args.command = argv[1];
    for (int k = 2; k < argc; ++k) {
        std::string a = argv[k];
        auto take_value = [&](const char* name) -> std::string {
            const std::string prefix = std::string(name) + "=";
            if (a.rfind(prefix, 0) == 0) return a.substr(prefix.size());
            if (k + 1 >= argc) throw ConfigError(std::string(name) + " needs a value");
            return argv[++k];
        };
        if (a == "--config" || a.rfind("--config=", 0) == 0) {
            args.config_path = take_value("--config");
        } else if (a == "--out" || a.rfind("--out=", 0) == 0) {
            args.out_path = take_value("--out");
        } else if (a == "--seed" || a.rfind("--seed=", 0) == 0) {
            args.seed = std::strtoull(take_value("--seed").c_str(), nullptr, 10);
        } else {
            throw ConfigError("unknown flag '" + a + "'");
        }
    }
    return args;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string provenance(const std::string& cmd, const ConfigFile& cfg,
                       std::uint64_t seed) {
    std::ostringstream os;
    os << kToolVersion << " cmd=" << cmd << " seed=" << seed << " config: " << cfg.flat();
    return os.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

MinimizeOptions options_from(const ConfigFile& cfg, const std::string& section,
                             const CliArgs& args, double default_tol, int default_iters) {
    MinimizeOptions opts;
    opts.grad_tol = cfg.get_double(section + ".grad_tol", default_tol);
    opts.max_iters = cfg.get_int(section + ".max_iters", default_iters);
    opts.restarts = cfg.get_int(section + ".restarts", 3);
    opts.seed = cfg.get_u64(section + ".seed", 1);
    if (args.seed) opts.seed = *args.seed;
    opts.validate();
    return opts;
}

Grid2D grid_from(const ConfigFile& cfg) {
    const int nx = cfg.get_int("grid.nx", 65);
    const int ny = cfg.get_int("grid.ny", nx);
    const double sx = cfg.get_double("grid.side_x", 1.0);
    const double sy = cfg.get_double("grid.side_y", 1.0);
    const double ox = cfg.get_double("grid.origin_x", 0.0);
    const double oy = cfg.get_double("grid.origin_y", 0.0);
    return make_grid({ox, oy}, sx, sy, nx, ny);
}

int cmd_g_table(const CliArgs& args, const ConfigFile& cfg) {
    const std::vector<double> default_b = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                           0.6, 0.7, 0.8, 0.9, 1.0, 1.2};
    const std::vector<double> b_grid = cfg.get_list("g_table.b_grid", default_b);
    const std::vector<double> R_list = cfg.get_list("g_table.R_list", {8.0, 12.0, 16.0});
    const double h = cfg.get_double("g_table.h", 0.25);
    MinimizeOptions opts = options_from(cfg, "g_table", args, 1e-8, 20000);

    std::string out = args.out_path.empty() ? cfg.get_string("output.path", "") : args.out_path;
    if (out.empty()) throw ConfigError("g-table needs --out or [output] path");

    const GTable table = build_g_table(b_grid, R_list, h, opts);
    save_gtable(table, out, provenance("g-table", cfg, opts.seed));

    bool all_converged = true;
    for (const GTableEntry& e : table.entries) all_converged = all_converged && e.converged;
    if (!all_converged) {
        std::cerr << "warning: some table entries carry a non-convergence flag\n";
    }
    std::cout << "wrote " << out << " (" << table.entries.size() << " b-rows)\n";
    return kOk;
}

int cmd_minimize(const CliArgs& args, const ConfigFile& cfg) {
    GLParams prm;
    prm.kappa = cfg.require_double("model.kappa");
    prm.H = cfg.require_double("model.H");
    prm.validate();
    const MagneticProfile b0 = make_profile(cfg.require_string("model.profile"));
    const Grid2D grid = grid_from(cfg);
    const MinimizeOptions opts = options_from(cfg, "minimize", args, 1e-6, 60000);

    const FullResult res = minimize_full(prm, b0, grid, opts);
    const IndexRect whole = full_rect(grid);
    const double e0 = local_energy(res.psi, res.A, prm, whole);
    const double identity_residual =
        std::abs(e0 + 0.5 * prm.kappa * prm.kappa * res.report.psi4_integral);
    double psi4_rhs = std::nan("");
    if (cfg.has("model.table")) {
        const GTable table = load_gtable(cfg.require_string("model.table"));
        psi4_rhs = psi4_check(res.psi, res.A, prm, b0, table, whole).rhs;
    }

    std::string out = args.out_path.empty() ? cfg.get_string("output.path", "") : args.out_path;
    if (!out.empty()) {
        std::ofstream of(out, std::ios::binary | std::ios::app);
        if (!of) throw ConfigError("cannot open output file '" + out + "'");
        if (of.tellp() == 0) {
            of << "# " << provenance("minimize", cfg, opts.seed) << "\n";
            of << "kappa,H,profile,nx,energy,sup_psi,kinetic_over_l2,magnetic_energy,"
                  "psi4_integral,psi4_rhs,psi4_residual,grad_norm,converged\n";
        }
        of << fmt(prm.kappa) << "," << fmt(prm.H) << "," << b0.name << "," << grid.nx
           << "," << fmt(res.energy) << "," << fmt(res.report.sup_psi) << ","
           << fmt(res.report.kinetic_over_l2) << "," << fmt(res.report.magnetic_energy)
           << "," << fmt(res.report.psi4_integral) << "," << fmt(psi4_rhs) << ","
           << fmt(identity_residual) << "," << fmt(res.report.grad_norm) << ","
           << (res.converged ? 1 : 0) << "\n";
    }

    const std::string dump = cfg.get_string("output.dump_psi", "");
    if (!dump.empty()) {
        std::ofstream df = open_out(dump);
        df << "# " << provenance("minimize", cfg, opts.seed) << "\n";
        df << "x,y,abs_psi\n";
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const Point p = grid.node(i, j);
                df << fmt(p.x) << "," << fmt(p.y) << "," << fmt(std::abs(res.psi.at(i, j)))
                   << "\n";
            }
        }
    }

    std::cout << "energy=" << fmt(res.energy) << " sup_psi=" << fmt(res.report.sup_psi)
              << " grad_norm=" << fmt(res.report.grad_norm)
              << (res.converged ? "" : " (not converged)") << "\n";
    if (!res.converged) return kNumericFailure;
    if (!res.report.sup_ok || !res.report.kinetic_ok) return kPropertyFailure;
    return kOk;
}

int cmd_verify(const CliArgs& args, const ConfigFile& cfg) {
    const GTable table = load_gtable(cfg.require_string("verify.table"));
    const MagneticProfile b0 = make_profile(cfg.get_string("verify.profile", "constant(1)"));
    const std::vector<double> kappas = cfg.get_list("verify.kappas", {8.0, 16.0});
    const double ratio = cfg.get_double("verify.H_over_kappa", 0.5);
    const int base_nx = cfg.get_int("verify.base_nx", 65);
    const double base_kappa = cfg.get_double("verify.base_kappa", kappas.front());
    const double beta = cfg.get_double("verify.beta", 0.75);
    const double mu = cfg.get_double("verify.mu", 0.125);
    const double sx = cfg.get_double("grid.side_x", 1.0);
    const double sy = cfg.get_double("grid.side_y", 1.0);
    const double ox = cfg.get_double("grid.origin_x", 0.0);
    const double oy = cfg.get_double("grid.origin_y", 0.0);
    const double h_cell = cfg.get_double("verify.h_cell", 0.25);
    MinimizeOptions opts = options_from(cfg, "verify", args, 1e-6, 60000);

    std::string out = args.out_path.empty() ? cfg.get_string("output.path", "") : args.out_path;
    std::ofstream of;
    if (!out.empty()) {
        of = open_out(out);
        of << "# " << provenance("verify", cfg, opts.seed) << "\n";
        of << "kappa,H,profile,E_min,prediction,lower,upper,trial_energy,psi4_lhs,"
              "psi4_rhs,magnetic_energy,sup_psi\n";
    }

    bool properties_ok = true;
    bool all_converged = true;
    std::vector<double> gaps, mags;
    for (const double kappa : kappas) {
        GLParams prm{kappa, ratio * kappa};
        const int nx = static_cast<int>(std::lround((base_nx - 1) * kappa / base_kappa)) + 1;
        const Grid2D grid = make_grid({ox, oy}, sx, sy, nx, nx);
        const FullResult res = minimize_full(prm, b0, grid, opts);
        all_converged = all_converged && res.converged;

        const double prediction = bulk_prediction(prm, b0, table, grid);
        const double ell = std::pow(kappa, -beta);
        const double eps = cfg.has("verify.eps") ? cfg.get_double("verify.eps", 0.0)
                                                 : std::pow(kappa, -mu);
        const Lattice lat = build_lattice(b0, grid, ell, eps);
        double lower = std::nan(""), upper = std::nan("");
        if (!lat.cells.empty()) {
            const auto lu = riemann_bounds(prm, table, lat);
            lower = lu.first;
            upper = lu.second;
            const double pred_latt = bulk_prediction_lattice(prm, b0, table, lat);
            const double slack = 1e-9 * (1.0 + std::abs(lower) + std::abs(upper));
            if (!(lower <= pred_latt + slack && pred_latt <= upper + slack)) {
                properties_ok = false;
                std::cerr << "property failure: Riemann sandwich violated at kappa="
                          << kappa << "\n";
            }
        }
        const TrialState trial = tiled_trial_state(prm, b0, res.F, lat, h_cell, opts);
        if (!(trial.energy >= res.energy - 1e-9)) {
            properties_ok = false;
            std::cerr << "property failure: trial state beats the minimizer at kappa="
                      << kappa << "\n";
        }
        const Psi4Record p4 = psi4_check(res.psi, res.A, prm, b0, table, full_rect(grid));
        if (!res.report.sup_ok || !res.report.kinetic_ok) {
            properties_ok = false;
            std::cerr << "property failure: a priori bounds violated at kappa=" << kappa
                      << "\n";
        }

        gaps.push_back(std::abs(res.energy - prediction) / (kappa * kappa));
        mags.push_back(res.report.magnetic_energy / (kappa * kappa));
        if (of.is_open()) {
            of << fmt(kappa) << "," << fmt(prm.H) << "," << b0.name << ","
               << fmt(res.energy) << "," << fmt(prediction) << "," << fmt(lower) << ","
               << fmt(upper) << "," << fmt(trial.energy) << "," << fmt(p4.lhs) << ","
               << fmt(p4.rhs) << "," << fmt(res.report.magnetic_energy) << ","
               << fmt(res.report.sup_psi) << "\n";
        }
        std::cout << "kappa=" << kappa << " E_min=" << fmt(res.energy)
                  << " prediction=" << fmt(prediction) << " gap/kappa^2="
                  << fmt(gaps.back()) << "\n";
    }

    for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
        if (!(gaps[k + 1] <= gaps[k] + 1e-12)) {
            properties_ok = false;
            std::cerr << "property failure: normalized energy gap does not decrease\n";
        }
        if (!(mags[k + 1] <= mags[k] + 1e-12)) {
            properties_ok = false;
            std::cerr << "property failure: normalized magnetic energy does not decrease\n";
        }
    }

    if (!all_converged) return kNumericFailure;
    return properties_ok ? kOk : kPropertyFailure;
}

int cmd_phase_check(const CliArgs& args, const ConfigFile& cfg) {
    const int nx = cfg.get_int("phase_check.nx", 257);
    const double ell = cfg.get_double("phase_check.ell", 0.1);
    const int levels = cfg.get_int("phase_check.levels", 1);
    std::vector<std::string> profiles;
    {
        std::stringstream ss(cfg.get_string(
            "phase_check.profiles", "linear(1,0); linear(1,-0.5); bilinear(1,1)"));
        std::string cell;
        while (std::getline(ss, cell, ';')) {
            const auto a = cell.find_first_not_of(" \t");
            const auto b = cell.find_last_not_of(" \t");
            if (a != std::string::npos) profiles.push_back(cell.substr(a, b - a + 1));
        }
    }
    const Grid2D grid = make_grid({0.0, 0.0}, 1.0, 1.0, nx, nx);
    const Point x0{0.5, 0.5};

    std::string out = args.out_path.empty() ? cfg.get_string("output.path", "") : args.out_path;
    std::ofstream of;
    if (!out.empty()) {
        of = open_out(out);
        of << "# " << provenance("phase-check", cfg, 0) << "\n";
        of << "profile,ell,err,ratio\n";
    }

    bool ok = true;
    for (const std::string& desc : profiles) {
        const MagneticProfile b0 = make_profile(desc);
        const GaugeField F = build_F(b0, grid, 1.0);
        std::vector<double> errs;
        double l = ell;
        for (int k = 0; k <= levels; ++k) {
            errs.push_back(local_gauge_phase(F, x0, x0, l).err);
            l *= 0.5;
        }
        l = ell;
        for (int k = 0; k <= levels; ++k) {
            const double ratio = (k + 1 < static_cast<int>(errs.size()))
                                     ? errs[k] / errs[k + 1]
                                     : std::nan("");
            if (k + 1 < static_cast<int>(errs.size()) && !(ratio >= 3.3 && ratio <= 4.7)) {
                ok = false;
                std::cerr << "property failure: phase error ratio " << fmt(ratio)
                          << " for " << desc << " at ell=" << fmt(l) << "\n";
            }
            if (of.is_open()) {
                of << desc << "," << fmt(l) << "," << fmt(errs[k]) << "," << fmt(ratio)
                   << "\n";
            }
            std::cout << desc << " ell=" << fmt(l) << " err=" << fmt(errs[k])
                      << " ratio=" << fmt(ratio) << "\n";
            l *= 0.5;
        }
    }
    return ok ? kOk : kPropertyFailure;
}

int cmd_poisson_check(const CliArgs& args, const ConfigFile& cfg) {
    const std::vector<double> nx_list = cfg.get_list("poisson_check.nx_list", {33, 65, 129});
    const double pi = 3.14159265358979323846;
    MagneticProfile b0;
    b0.name = "manufactured";
    b0.value = [pi](Point p) {
        return 2.0 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y);
    };
    b0.grad = [pi](Point p) {
        return Point{2.0 * pi * pi * pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                     2.0 * pi * pi * pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
    };

    std::vector<double> errs, hs;
    for (const double nxd : nx_list) {
        const int nx = static_cast<int>(nxd);
        const Grid2D grid = make_grid({0.0, 0.0}, 1.0, 1.0, nx, nx);
        const GaugeField F = build_F(b0, grid, 1.0);
        double err = 0.0;
        for (int j = 0; j < nx; ++j) {
            for (int i = 0; i < nx; ++i) {
                const Point p = grid.node(i, j);
                const double fx = pi * std::sin(pi * p.x) * std::cos(pi * p.y);
                const double fy = -pi * std::cos(pi * p.x) * std::sin(pi * p.y);
                err = std::max(err, std::hypot(F.ax[grid.id(i, j)] - fx,
                                               F.ay[grid.id(i, j)] - fy));
            }
        }
        errs.push_back(err);
        hs.push_back(grid.h);
    }

    std::string out = args.out_path.empty() ? cfg.get_string("output.path", "") : args.out_path;
    std::ofstream of;
    if (!out.empty()) {
        of = open_out(out);
        of << "# " << provenance("poisson-check", cfg, 0) << "\n";
        of << "nx,h,max_err,order\n";
    }
    bool ok = true;
    for (std::size_t k = 0; k < errs.size(); ++k) {
        double order = std::nan("");
        if (k + 1 < errs.size()) {
            order = std::log2(errs[k] / errs[k + 1]);
            if (!(order >= 1.8 && order <= 2.2)) {
                ok = false;
                std::cerr << "property failure: observed order " << fmt(order) << "\n";
            }
        }
        if (of.is_open()) {
            of << nx_list[k] << "," << fmt(hs[k]) << "," << fmt(errs[k]) << ","
               << fmt(order) << "\n";
        }
        std::cout << "nx=" << nx_list[k] << " max_err=" << fmt(errs[k])
                  << " order=" << fmt(order) << "\n";
    }
    return ok ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CliArgs args;
    try {
        args = parse_args(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        print_usage(std::cerr);
        return kUsageError;
    }

    try {
        ConfigFile cfg;
        if (!args.config_path.empty()) {
            cfg = ConfigFile::parse_file(args.config_path);
        }
        if (args.command == "g-table") return cmd_g_table(args, cfg);
        if (args.command == "minimize") return cmd_minimize(args, cfg);
        if (args.command == "verify") return cmd_verify(args, cfg);
        if (args.command == "phase-check") return cmd_phase_check(args, cfg);
        if (args.command == "poisson-check") return cmd_poisson_check(args, cfg);
        if (args.command == "--help" || args.command == "help") {
            print_usage(std::cout);
            return kOk;
        }
        std::cerr << "error: unknown command '" << args.command << "'\n";
        print_usage(std::cerr);
        return kUsageError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumericFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
}
