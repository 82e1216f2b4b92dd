#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <initializer_list>

#include "risklab/optimize.hpp"

using namespace risklab;

TEST_CASE("quadratic bowl in a box") {
    const auto f = [](const std::vector<double>& x) {
        return (x[0] - 1.5) * (x[0] - 1.5) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
    };
    const auto r = nelder_mead(f, {0.0, 0.0}, {-5.0, -5.0}, {5.0, 5.0});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-5));
}

TEST_CASE("optimum on the boundary is reachable") {
    const auto f = [](const std::vector<double>& x) { return -x[0]; };  // max at hi
    const auto r = nelder_mead(f, {0.2}, {0.0}, {1.0});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("result never leaves the box") {
    const auto f = [](const std::vector<double>& x) {
        return std::pow(x[0] - 10.0, 2) + std::pow(x[1] + 10.0, 2);
    };
    const auto r = nelder_mead(f, {0.5, -0.5}, {-1.0, -1.0}, {1.0, 1.0});
    CHECK(r.x[0] >= -1.0);
    CHECK(r.x[0] <= 1.0);
    CHECK(r.x[1] >= -1.0);
    CHECK(r.x[1] <= 1.0);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("rosenbrock valley, 2d") {
    const auto f = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadOptions options;
    options.max_evals = 20000;
    const auto r = nelder_mead(f, {-1.2, 1.0}, {-5.0, -5.0}, {5.0, 5.0}, options);
    CHECK(r.fx < 1e-8);
}

TEST_CASE("one-dimensional search works") {
    const auto f = [](const std::vector<double>& x) { return std::cos(3.0 * x[0]) + x[0] * x[0]; };
    const auto r = nelder_mead(f, {0.9}, {-2.0}, {2.0});
    CHECK(r.converged);
    // stationary point of cos(3x)+x^2 nearest the start, frozen from a
    // high-precision root solve of -3 sin(3x) + 2x = 0
    CHECK(r.x[0] == doctest::Approx(0.8471479436499811).epsilon(1e-5));
    CHECK(r.fx == doctest::Approx(-0.1075919357562948).epsilon(1e-9));
}

TEST_CASE("deterministic across calls") {
    const auto f = [](const std::vector<double>& x) {
        return std::sin(x[0]) * std::cos(x[1]) + 0.1 * x[0] * x[0] + 0.1 * x[1] * x[1];
    };
    const auto a = nelder_mead(f, {1.0, -1.0}, {-4.0, -4.0}, {4.0, 4.0});
    const auto b = nelder_mead(f, {1.0, -1.0}, {-4.0, -4.0}, {4.0, 4.0});
    CHECK(a.fx == b.fx);
    CHECK(a.x == b.x);
    CHECK(a.evals == b.evals);
}

TEST_CASE("dimension mismatches are rejected") {
    const auto f = [](const std::vector<double>& x) { return x[0]; };
    CHECK_THROWS_AS(nelder_mead(f, {0.0, 0.0}, {0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(nelder_mead(f, {}, {}, {}), std::invalid_argument);
}
