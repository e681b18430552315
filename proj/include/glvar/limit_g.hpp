#pragma once

#include <string>
#include <vector>

#include "glvar/minimize.hpp"

namespace glvar {

struct GTableEntry {
    double b = 0.0;
    std::vector<double> m0_over_R2;  // one per R in R_list; empty for b >= 1
    double g_extrap = 0.0;
    double c_fit = 0.0;
    double fit_residual = 0.0;  // rms deviation of m0/R^2 from g + c/R
    bool converged = true;
    bool fit_ok = true;  // fit residual within 10% of |g_extrap|
};

struct GTable {
    std::vector<double> b_grid;
    std::vector<double> R_list;
    double h_target = 0.25;
    std::uint64_t seed = 1;
    std::vector<GTableEntry> entries;
};

/// Tabulates m0(b,R)/R^2 over the R sweep and extrapolates with the
/// two-parameter model m0/R^2 = g + c/R. Entries with b >= 1 store the exact
/// value 0 without computation.
GTable build_g_table(const std::vector<double>& b_grid, const std::vector<double>& R_list,
                     double h_target, const MinimizeOptions& opts);

/// Piecewise-linear interpolation of g on the table; 0 for b >= 1, clamped to
/// [-1/2, 0]. Throws for b < 0.
double g_eval(const GTable& table, double b);

struct GValidation {
    bool monotone = true;
    bool concave = true;
    bool upper_bound = true;     // |g(b)| <= (b-1)^2/2 + tol
    bool negative_below = true;  // g(b) <= -1e-3 for b <= 0.9
    std::vector<std::string> failures;

    bool all_ok() const {
        return monotone && concave && upper_bound && negative_below;
    }
};

/// Checks the tabulated values against the known shape of g (tolerance 2e-2).
GValidation validate_g(const GTable& table);

/// Delimiter-separated text round trip. The first line is a provenance
/// comment; the header row is b,g_extrap,c_fit then one m0/R^2 column per R.
void save_gtable(const GTable& table, const std::string& path,
                 const std::string& provenance);
GTable load_gtable(const std::string& path);

}  // namespace glvar
