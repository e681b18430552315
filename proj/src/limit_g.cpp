#include "glvar/limit_g.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace glvar {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void fit_line(const std::vector<double>& R_list, const std::vector<double>& y,
              double& g, double& c, double& rms) {
    // least squares for y_i = g + c / R_i
    const std::size_t m = R_list.size();
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = 1.0 / R_list[k];
        sx += x;
        sxx += x * x;
        sy += y[k];
        sxy += x * y[k];
    }
    const double det = m * sxx - sx * sx;
    g = (sxx * sy - sx * sxy) / det;
    c = (m * sxy - sx * sy) / det;
    double ss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = y[k] - (g + c / R_list[k]);
        ss += r * r;
    }
    rms = std::sqrt(ss / m);
}

}  // namespace

GTable build_g_table(const std::vector<double>& b_grid, const std::vector<double>& R_list,
                     double h_target, const MinimizeOptions& opts) {
    if (R_list.size() < 3) {
        throw ConfigError("build_g_table: R_list needs at least 3 entries for the 1/R fit");
    }
    if (!std::is_sorted(R_list.begin(), R_list.end()) ||
        std::adjacent_find(R_list.begin(), R_list.end()) != R_list.end()) {
        throw ConfigError("build_g_table: R_list must be strictly increasing");
    }
    if (!std::is_sorted(b_grid.begin(), b_grid.end()) ||
        std::adjacent_find(b_grid.begin(), b_grid.end()) != b_grid.end()) {
        throw ConfigError("build_g_table: b_grid must be strictly increasing");
    }
    if (!b_grid.empty() && b_grid.front() < 0.0) {
        throw ConfigError("build_g_table: b values must be >= 0");
    }

    GTable table;
    table.b_grid = b_grid;
    table.R_list = R_list;
    table.h_target = h_target;
    table.seed = opts.seed;

    for (const double b : b_grid) {
        GTableEntry e;
        e.b = b;
        if (b >= 1.0) {
            e.g_extrap = 0.0;
            e.c_fit = 0.0;
            table.entries.push_back(e);
            continue;
        }
        for (const double R : R_list) {
            const ReducedResult rr = minimize_reduced(b, +1, R, h_target, opts);
            e.m0_over_R2.push_back(rr.m0 / (R * R));
            e.converged = e.converged && rr.converged;
        }
        fit_line(R_list, e.m0_over_R2, e.g_extrap, e.c_fit, e.fit_residual);
        e.fit_ok = e.fit_residual <= 0.10 * std::abs(e.g_extrap);
        table.entries.push_back(e);
    }
    return table;
}

double g_eval(const GTable& table, double b) {
    if (!(b >= 0.0)) throw ConfigError("g_eval: b must be >= 0");
    if (b >= 1.0) return 0.0;
    if (table.entries.empty()) throw ConfigError("g_eval: empty table");

    // interpolation points; anchor (1, 0) if the table stops short of b = 1
    std::vector<double> xs, ys;
    for (const GTableEntry& e : table.entries) {
        if (e.b > 1.0) break;
        xs.push_back(e.b);
        ys.push_back(e.b >= 1.0 ? 0.0 : e.g_extrap);
    }
    if (xs.back() < 1.0) {
        xs.push_back(1.0);
        ys.push_back(0.0);
    }

    double val;
    if (b <= xs.front()) {
        if (xs.size() >= 2 && xs.front() > 0.0) {
            const double t = (b - xs[0]) / (xs[1] - xs[0]);
            val = ys[0] + t * (ys[1] - ys[0]);
        } else {
            val = ys.front();
        }
    } else {
        std::size_t k = 1;
        while (k + 1 < xs.size() && xs[k] < b) ++k;
        const double t = (b - xs[k - 1]) / (xs[k] - xs[k - 1]);
        val = ys[k - 1] + t * (ys[k] - ys[k - 1]);
    }
    return std::clamp(val, -0.5, 0.0);
}

GValidation validate_g(const GTable& table) {
    const double tol = 2e-2;
    GValidation v;
    std::vector<double> bs, gs;
    for (const GTableEntry& e : table.entries) {
        bs.push_back(e.b);
        gs.push_back(e.b >= 1.0 ? 0.0 : e.g_extrap);
    }
    for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
        if (gs[k + 1] < gs[k] - tol) {
            v.monotone = false;
            std::ostringstream os;
            os << "monotonicity fails between b=" << bs[k] << " and b=" << bs[k + 1];
            v.failures.push_back(os.str());
        }
    }
    for (std::size_t k = 0; k + 2 < gs.size(); ++k) {
        // midpoint concavity on consecutive triples via linear interpolation
        const double bm = 0.5 * (bs[k] + bs[k + 2]);
        double gm;
        if (bm <= bs[k + 1]) {
            const double t = (bm - bs[k]) / (bs[k + 1] - bs[k]);
            gm = gs[k] + t * (gs[k + 1] - gs[k]);
        } else {
            const double t = (bm - bs[k + 1]) / (bs[k + 2] - bs[k + 1]);
            gm = gs[k + 1] + t * (gs[k + 2] - gs[k + 1]);
        }
        if (gm < 0.5 * (gs[k] + gs[k + 2]) - tol) {
            v.concave = false;
            std::ostringstream os;
            os << "midpoint concavity fails on [" << bs[k] << ", " << bs[k + 2] << "]";
            v.failures.push_back(os.str());
        }
    }
    for (std::size_t k = 0; k < gs.size(); ++k) {
        if (bs[k] <= 1.0 && std::abs(gs[k]) > 0.5 * (bs[k] - 1.0) * (bs[k] - 1.0) + tol) {
            v.upper_bound = false;
            std::ostringstream os;
            os << "|g| exceeds (b-1)^2/2 at b=" << bs[k];
            v.failures.push_back(os.str());
        }
        if (bs[k] <= 0.9 && gs[k] > -1e-3) {
            v.negative_below = false;
            std::ostringstream os;
            os << "g not strictly negative at b=" << bs[k];
            v.failures.push_back(os.str());
        }
    }
    return v;
}

void save_gtable(const GTable& table, const std::string& path,
                 const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
    if (!out) throw ConfigError("save_gtable: cannot open '" + path + "' for writing");
    out << "# " << provenance << "\n";
    out << "# h_target=" << fmt_g(table.h_target) << " seed=" << table.seed << "\n";
    out << "b,g_extrap,c_fit";
    for (const double R : table.R_list) {
        char col[48];
        std::snprintf(col, sizeof(col), ",m0_over_R2_R%.6g", R);
        out << col;
    }
    out << "\n";
    for (const GTableEntry& e : table.entries) {
        out << fmt_g(e.b) << "," << fmt_g(e.g_extrap) << "," << fmt_g(e.c_fit);
        for (std::size_t k = 0; k < table.R_list.size(); ++k) {
            out << "," << (e.m0_over_R2.empty() ? "0" : fmt_g(e.m0_over_R2[k]));
        }
        out << "\n";
    }
    bool flagged = false;
    for (const GTableEntry& e : table.entries) {
        if (!e.converged || !e.fit_ok) {
            out << "# quality b=" << fmt_g(e.b) << (e.converged ? "" : " not-converged")
                << (e.fit_ok ? "" : " fit-residual-above-10-percent") << "\n";
            flagged = true;
        }
    }
    if (!flagged) out << "# quality all-ok\n";
}

GTable load_gtable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_gtable: cannot open '" + path + "'");
    GTable table;
    std::string line;
    bool have_header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto hpos = line.find("h_target=");
            if (hpos != std::string::npos) {
                table.h_target = std::strtod(line.c_str() + hpos + 9, nullptr);
                const auto spos = line.find("seed=");
                if (spos != std::string::npos) {
                    table.seed = std::strtoull(line.c_str() + spos + 5, nullptr, 10);
                }
            }
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            if (cells.size() < 6 || cells[0] != "b" || cells[1] != "g_extrap" ||
                cells[2] != "c_fit") {
                std::ostringstream os;
                os << path << ":" << lineno << ": bad g-table header";
                throw ConfigError(os.str());
            }
            for (std::size_t k = 3; k < cells.size(); ++k) {
                const std::string prefix = "m0_over_R2_R";
                if (cells[k].rfind(prefix, 0) != 0) {
                    std::ostringstream os;
                    os << path << ":" << lineno << ": bad column name '" << cells[k] << "'";
                    throw ConfigError(os.str());
                }
                table.R_list.push_back(std::strtod(cells[k].c_str() + prefix.size(), nullptr));
            }
            have_header = true;
            continue;
        }
        if (cells.size() != 3 + table.R_list.size()) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected " << 3 + table.R_list.size()
               << " columns, got " << cells.size();
            throw ConfigError(os.str());
        }
        GTableEntry e;
        char* end = nullptr;
        e.b = std::strtod(cells[0].c_str(), &end);
        if (end == cells[0].c_str()) {
            std::ostringstream os;
            os << path << ":" << lineno << ": bad numeric field '" << cells[0] << "'";
            throw ConfigError(os.str());
        }
        e.g_extrap = std::strtod(cells[1].c_str(), nullptr);
        e.c_fit = std::strtod(cells[2].c_str(), nullptr);
        if (e.b < 1.0) {
            for (std::size_t k = 0; k < table.R_list.size(); ++k) {
                e.m0_over_R2.push_back(std::strtod(cells[3 + k].c_str(), nullptr));
            }
            double dummy_g, dummy_c;
            fit_line(table.R_list, e.m0_over_R2, dummy_g, dummy_c, e.fit_residual);
            e.fit_ok = e.fit_residual <= 0.10 * std::abs(e.g_extrap);
        }
        table.b_grid.push_back(e.b);
        table.entries.push_back(std::move(e));
    }
    if (!have_header || table.entries.empty()) {
        throw ConfigError("load_gtable: '" + path + "' has no table content");
    }
    if (!std::is_sorted(table.b_grid.begin(), table.b_grid.end())) {
        throw ConfigError("load_gtable: b column must be increasing");
    }
    return table;
}

}  // namespace glvar
