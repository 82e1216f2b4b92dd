#include "risklab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace risklab {

namespace {

void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo,
                  const std::vector<double>& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<double>& lo, const std::vector<double>& hi,
                             const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0 || lo.size() != n || hi.size() != n)
        throw std::invalid_argument("nelder_mead: inconsistent dimensions");
    for (std::size_t i = 0; i < n; ++i)
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("nelder_mead: lo > hi");

    const int max_evals =
        options.max_evals > 0 ? options.max_evals : static_cast<int>(250 * n + 250);

    NelderMeadResult result;
    result.evals = 0;

    auto eval = [&](const std::vector<double>& x) {
        ++result.evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    clamp_to_box(x0, lo, hi);

    // Initial simplex: x0 plus one step along each coordinate, flipped when it
    // would leave the box.
    std::vector<std::vector<double>> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = x0;
        const double width = hi[i] - lo[i];
        double step = options.initial_step * (width > 0.0 ? width : 1.0);
        if (v[i] + step > hi[i]) step = -step;
        v[i] += step;
        clamp_to_box(v, lo, hi);
        simplex.push_back(v);
    }

    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);

    const double reflect_coef = 1.0, expand_coef = 2.0, contract_coef = 0.5, shrink_coef = 0.5;

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        // Convergence: value spread and simplex extent both small.
        bool small_spread =
            values[worst] - values[best] <= options.f_tol * (1.0 + std::abs(values[best]));
        bool small_extent = true;
        for (std::size_t i = 0; i < n && small_extent; ++i) {
            const double width = hi[i] - lo[i];
            double extent = 0.0;
            for (std::size_t k = 1; k <= n; ++k)
                extent = std::max(extent, std::abs(simplex[order[k]][i] - simplex[best][i]));
            if (extent > options.x_tol * (width > 0.0 ? width : 1.0)) small_extent = false;
        }
        if (small_spread && small_extent) {
            result.converged = true;
            break;
        }
        if (result.evals >= max_evals) break;

        // Centroid of all but the worst vertex.
        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = centroid[i] + coef * (centroid[i] - simplex[worst][i]);
            clamp_to_box(p, lo, hi);
            return p;
        };

        auto reflected = blend(reflect_coef);
        const double f_reflected = eval(reflected);

        if (f_reflected < values[best]) {
            auto expanded = blend(expand_coef);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = std::move(expanded);
                values[worst] = f_expanded;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = f_reflected;
            }
        } else if (f_reflected < values[second_worst]) {
            simplex[worst] = std::move(reflected);
            values[worst] = f_reflected;
        } else {
            // Contract toward the better of (worst, reflected).
            const bool outside = f_reflected < values[worst];
            auto contracted = blend(outside ? contract_coef : -contract_coef);
            const double f_contracted = eval(contracted);
            const double bar = outside ? f_reflected : values[worst];
            if (f_contracted < bar) {
                simplex[worst] = std::move(contracted);
                values[worst] = f_contracted;
            } else {
                // Shrink everything toward the best vertex.
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[k][i] =
                            simplex[best][i] + shrink_coef * (simplex[k][i] - simplex[best][i]);
                    clamp_to_box(simplex[k], lo, hi);
                    values[k] = eval(simplex[k]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k <= n; ++k)
        if (values[k] < values[best]) best = k;
    result.x = simplex[best];
    result.fx = values[best];
    return result;
}

}  // namespace risklab
