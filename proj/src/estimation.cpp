#include "risklab/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "risklab/errors.hpp"
#include "risklab/optimize.hpp"
#include "risklab/rng.hpp"

namespace risklab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct StartOutcome {
    NelderMeadResult best;
    int start_index = -1;
    int converged_count = 0;
};

// Runs the multi-start loop over a boxed objective. Starts are drawn up
// front so the draw sequence does not depend on evaluation order.
StartOutcome multi_start_minimize(const Objective& f, const std::vector<double>& lo,
                                  const std::vector<double>& hi, int n_starts,
                                  std::uint64_t seed) {
    if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
    Rng rng(derive_seed(seed, 0));
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(n_starts));
    for (auto& x0 : starts) {
        x0.resize(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) x0[i] = rng.uniform(lo[i], hi[i]);
    }

    StartOutcome outcome;
    for (int k = 0; k < n_starts; ++k) {
        NelderMeadResult r = nelder_mead(f, starts[static_cast<std::size_t>(k)], lo, hi);
        if (!r.converged) continue;  // non-convergent start: discarded
        ++outcome.converged_count;
        if (outcome.start_index < 0 || r.fx < outcome.best.fx) {
            outcome.best = std::move(r);
            outcome.start_index = k;
        }
    }
    if (outcome.start_index < 0)
        throw EstimationFailure("no optimizer start converged");

    // Polish once from the winner with a tighter initial simplex.
    NelderMeadOptions polish;
    polish.initial_step = 0.005;
    NelderMeadResult polished = nelder_mead(f, outcome.best.x, lo, hi, polish);
    if (polished.converged && polished.fx < outcome.best.fx) outcome.best = std::move(polished);
    return outcome;
}

}  // namespace

double bic(double nll, int n_params, int n_obs) {
    if (n_obs < 1) throw std::invalid_argument("bic: n_obs must be >= 1");
    if (n_params < 0) throw std::invalid_argument("bic: n_params must be >= 0");
    return static_cast<double>(n_params) * std::log(static_cast<double>(n_obs)) + 2.0 * nll;
}

FitResult fit_choice(const SessionTranscript& transcript, ChoiceModel model_id, int n_starts,
                     std::uint64_t seed) {
    if (transcript.rows.empty())
        throw std::invalid_argument("fit_choice: transcript has no trials");

    const auto free_params = choice_free_params(model_id);
    std::vector<double> lo, hi;
    for (const auto& spec : free_params) {
        lo.push_back(spec.lo);
        hi.push_back(spec.hi);
    }

    ChoiceParams base;
    base.model_id = model_id;
    base = canonical_choice_params(base);

    const auto objective = [&](const std::vector<double>& x) {
        ChoiceParams p = base;
        for (std::size_t i = 0; i < free_params.size(); ++i) p.*(free_params[i].field) = x[i];
        return choice_nll(p, transcript);
    };

    const StartOutcome outcome = multi_start_minimize(objective, lo, hi, n_starts, seed);

    ChoiceParams fitted = base;
    for (std::size_t i = 0; i < free_params.size(); ++i)
        fitted.*(free_params[i].field) = outcome.best.x[i];

    FitResult result;
    result.params = fitted;
    result.nll = outcome.best.fx;
    result.n_obs = static_cast<int>(transcript.rows.size());
    result.n_params = static_cast<int>(free_params.size());
    result.bic = bic(result.nll, result.n_params, result.n_obs);
    // McFadden pseudo-R^2 against the chance responder (ln 2 per trial).
    result.fit_quality = 1.0 - result.nll / (static_cast<double>(result.n_obs) * std::log(2.0));
    result.starts_used = outcome.converged_count;
    result.best_start_index = outcome.start_index;
    return result;
}

namespace {

// Least squares for a small dense system via normal equations with partial
// pivoting. A singular pivot zeroes the corresponding weight (columns that
// never vary, e.g. EV for an agent that never gambles).
std::vector<double> solve_least_squares(const std::vector<std::vector<double>>& x,
                                        const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::size_t p = x.empty() ? 0 : x[0].size();
    std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
    std::vector<double> b(p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            b[i] += x[r][i] * y[r];
            for (std::size_t j = i; j < p; ++j) a[i][j] += x[r][i] * x[r][j];
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < i; ++j) a[i][j] = a[j][i];

    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::abs(a[i][i]));
    const double tiny = std::max(scale, 1.0) * 1e-12;

    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> w(p, 0.0);

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            std::swap(b[pivot], b[col]);
        }
        if (std::abs(a[col][col]) <= tiny) {
            // Degenerate column: pin its weight to zero.
            for (std::size_t r = 0; r < p; ++r) {
                a[r][col] = 0.0;
                a[col][r] = 0.0;
            }
            a[col][col] = 1.0;
            b[col] = 0.0;
            continue;
        }
        for (std::size_t r = col + 1; r < p; ++r) {
            const double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < p; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = p; i-- > 0;) {
        double v = b[i];
        for (std::size_t j = i + 1; j < p; ++j) v -= a[i][j] * w[j];
        w[i] = v / a[i][i];
    }
    return w;
}

struct AffectProfile {
    double sse = 0.0;
    std::vector<double> weights;  // beta0 first
};

// Design matrix at the rated trials for a given gamma, weights by OLS.
AffectProfile profile_affect(const SessionTranscript& transcript,
                             const std::vector<AffectRegressorRow>& regressors,
                             AffectModel model_id, double gamma) {
    const std::size_t p = model_id == AffectModel::mm1 ? 4 : 3;
    std::vector<std::vector<double>> design;
    std::vector<double> y;
    design.reserve(transcript.ratings.size());
    y.reserve(transcript.ratings.size());

    double s_cr = 0.0, s_ev = 0.0, s_rpe = 0.0, s_gr = 0.0;
    std::size_t next_rating = 0;
    for (std::size_t i = 0; i < regressors.size() && next_rating < transcript.ratings.size();
         ++i) {
        s_cr = gamma * s_cr + regressors[i].cr;
        s_ev = gamma * s_ev + regressors[i].ev;
        s_rpe = gamma * s_rpe + regressors[i].rpe;
        s_gr = gamma * s_gr + regressors[i].gr;
        const int index = static_cast<int>(i) + 1;
        while (next_rating < transcript.ratings.size() &&
               transcript.ratings[next_rating].trial == index) {
            std::vector<double> row{1.0, s_cr};
            if (model_id == AffectModel::mm1) {
                row.push_back(s_ev);
                row.push_back(s_rpe);
            } else {
                row.push_back(s_gr);
            }
            design.push_back(std::move(row));
            y.push_back(transcript.ratings[next_rating].rating);
            ++next_rating;
        }
    }
    if (y.size() != transcript.ratings.size())
        throw ValidationError("ratings reference trials outside the transcript");

    AffectProfile profile;
    profile.weights = solve_least_squares(design, y);
    // Clamp into the declared optimizer box; a no-op on sane data.
    profile.weights[0] = std::clamp(profile.weights[0], kAffectBeta0Lo, kAffectBeta0Hi);
    for (std::size_t i = 1; i < p; ++i)
        profile.weights[i] = std::clamp(profile.weights[i], kAffectWeightLo, kAffectWeightHi);

    for (std::size_t r = 0; r < y.size(); ++r) {
        double predicted = 0.0;
        for (std::size_t i = 0; i < p; ++i) predicted += profile.weights[i] * design[r][i];
        const double residual = y[r] - predicted;
        profile.sse += residual * residual;
    }
    return profile;
}

}  // namespace

FitResult fit_affect(const SessionTranscript& transcript, AffectModel model_id, int n_starts,
                     std::uint64_t seed) {
    const auto n_ratings = transcript.ratings.size();
    const int n_params = affect_model_n_params(model_id);
    if (n_ratings < 6) throw std::invalid_argument("fit_affect: needs at least 6 ratings");

    double mean = 0.0;
    for (const auto& r : transcript.ratings) mean += r.rating;
    mean /= static_cast<double>(n_ratings);
    double sst = 0.0;
    for (const auto& r : transcript.ratings) sst += (r.rating - mean) * (r.rating - mean);
    if (sst == 0.0) throw DegenerateDataError("fit_affect: ratings have zero variance");

    const auto regressors = regressors_from_transcript(transcript);
    const auto objective = [&](const std::vector<double>& x) {
        return profile_affect(transcript, regressors, model_id, x[0]).sse;
    };

    const StartOutcome outcome =
        multi_start_minimize(objective, {0.0}, {1.0}, n_starts, seed);

    const double gamma = outcome.best.x[0];
    const AffectProfile profile = profile_affect(transcript, regressors, model_id, gamma);

    AffectParams fitted;
    fitted.model_id = model_id;
    fitted.gamma = gamma;
    fitted.beta0 = profile.weights[0];
    fitted.beta_cr = profile.weights[1];
    if (model_id == AffectModel::mm1) {
        fitted.beta_ev = profile.weights[2];
        fitted.beta_rpe = profile.weights[3];
    } else {
        fitted.beta_gr = profile.weights[2];
    }

    const auto n = static_cast<double>(n_ratings);
    const double sigma2 = std::max(profile.sse, 1e-300) / n;

    FitResult result;
    result.params = fitted;
    result.nll = 0.5 * n * (std::log(2.0 * kPi * sigma2) + 1.0);
    result.n_obs = static_cast<int>(n_ratings);
    result.n_params = n_params;
    result.bic = bic(result.nll, result.n_params, result.n_obs);
    result.fit_quality = 1.0 - profile.sse / sst;
    result.starts_used = outcome.converged_count;
    result.best_start_index = outcome.start_index;
    return result;
}

ComparisonTable compare_models(const FitTable& fits) {
    ComparisonTable table;
    if (fits.rows.empty()) throw IncompleteComparisonError("compare_models: no fits");

    std::set<std::string> seen_groups, seen_models;
    for (const auto& row : fits.rows) {
        if (seen_groups.insert(row.group).second) table.groups.push_back(row.group);
        if (seen_models.insert(row.model).second) table.models.push_back(row.model);
    }

    // (group, agent, model) -> bic; every agent must carry every model.
    std::map<std::string, std::map<std::string, std::map<std::string, const FitResult*>>> by_group;
    for (const auto& row : fits.rows) {
        auto& slot = by_group[row.group][row.agent][row.model];
        if (slot != nullptr)
            throw IncompleteComparisonError("duplicate fit for agent " + row.agent + " model " +
                                            row.model);
        slot = &row.fit;
    }

    for (const auto& group : table.groups) {
        const auto& agents = by_group.at(group);
        for (const auto& [agent, models] : agents) {
            for (const auto& model : table.models) {
                if (models.count(model) == 0)
                    throw IncompleteComparisonError("agent " + agent + " in group " + group +
                                                    " is missing model " + model);
            }
        }

        double min_sum = std::numeric_limits<double>::infinity();
        std::string winner;
        for (const auto& model : table.models) {
            ComparisonCell cell;
            for (const auto& [agent, models] : agents) {
                const FitResult* fit = models.at(model);
                cell.summed_bic += fit->bic;
                cell.mean_fit_quality += fit->fit_quality;
                ++cell.n_agents;
            }
            cell.mean_fit_quality /= static_cast<double>(cell.n_agents);
            if (cell.summed_bic < min_sum) {
                min_sum = cell.summed_bic;
                winner = model;
            }
            table.cells[group][model] = cell;
        }
        for (const auto& model : table.models)
            table.cells[group][model].delta_bic = table.cells[group][model].summed_bic - min_sum;
        table.winner[group] = winner;
    }
    return table;
}

}  // namespace risklab
