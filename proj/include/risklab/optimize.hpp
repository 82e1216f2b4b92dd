#pragma once

#include <functional>
#include <vector>

namespace risklab {

struct NelderMeadOptions {
    double f_tol = 1e-10;       // relative spread of simplex values
    double x_tol = 1e-9;        // simplex extent, relative to box width
    int max_evals = 0;          // 0 -> 250 * n + 250
    double initial_step = 0.05; // initial simplex step, relative to box width
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evals = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Downhill simplex with box constraints enforced by projection. Deterministic:
// the result depends only on (f, x0, lo, hi, options).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<double>& lo, const std::vector<double>& hi,
                             const NelderMeadOptions& options = {});

}  // namespace risklab
