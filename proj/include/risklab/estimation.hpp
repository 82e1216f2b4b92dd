#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "risklab/affect_models.hpp"
#include "risklab/choice_models.hpp"
#include "risklab/task.hpp"

namespace risklab {

struct FitResult {
    std::variant<ChoiceParams, AffectParams> params;
    double nll = 0.0;
    double bic = 0.0;
    double fit_quality = 0.0;  // McFadden pseudo-R^2 for choice, R^2 for affect
    int n_obs = 0;
    int n_params = 0;
    int starts_used = 0;
    int best_start_index = 0;
};

// k * ln(n) + 2 * nll.
double bic(double nll, int n_params, int n_obs);

// Multi-start bounded MLE of a choice model. Starting points are uniform
// within bounds, drawn in fitting order from Rng(derive_seed(seed, 0)) —
// part of the contract, so callers can audit that the returned NLL beats
// every start. The lowest-NLL converged start wins, ties going to the lowest
// start index. Throws EstimationFailure if no start converges.
FitResult fit_choice(const SessionTranscript& transcript, ChoiceModel model_id,
                     int n_starts = 50, std::uint64_t seed = 0);

// Gaussian MLE of an affect model. For each candidate gamma the linear
// weights are profiled out by least squares; gamma itself is optimized by
// multi-start bounded search on [0,1]. nll is the profiled-variance Gaussian
// value; fit_quality is 1 - SSE/SST. Requires >= 6 ratings; throws
// DegenerateDataError when ratings have zero variance.
FitResult fit_affect(const SessionTranscript& transcript, AffectModel model_id,
                     int n_starts = 50, std::uint64_t seed = 0);

// Optimizer box for the profiled affect weights. Generous on purpose: they
// exist as box constraints, not as informative bounds.
constexpr double kAffectBeta0Lo = -100.0, kAffectBeta0Hi = 200.0;
constexpr double kAffectWeightLo = -10.0, kAffectWeightHi = 10.0;

// Long-format fit listing, one row per (group, agent, model).
struct FitTable {
    struct Row {
        std::string group;
        std::string agent;
        std::string model;
        FitResult fit;
    };
    std::vector<Row> rows;
};

struct ComparisonCell {
    double summed_bic = 0.0;
    double delta_bic = 0.0;  // relative to the group's winning model
    double mean_fit_quality = 0.0;
    int n_agents = 0;
};

struct ComparisonTable {
    std::vector<std::string> groups;  // first-appearance order
    std::vector<std::string> models;
    std::map<std::string, std::map<std::string, ComparisonCell>> cells;  // group -> model
    std::map<std::string, std::string> winner;                           // group -> model
};

// Per group: sum BIC over agents per model, subtract the minimum. Every
// (group, agent) must carry every model exactly once, else
// IncompleteComparisonError.
ComparisonTable compare_models(const FitTable& fits);

}  // namespace risklab
