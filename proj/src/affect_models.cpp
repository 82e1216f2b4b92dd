#include "risklab/affect_models.hpp"

#include <stdexcept>

#include "risklab/errors.hpp"

namespace risklab {

std::vector<AffectRegressorRow> regressors_from_transcript(const SessionTranscript& transcript) {
    if (!transcript.task)
        throw std::invalid_argument("regressors_from_transcript: transcript lacks a task");
    const auto& trials = transcript.task->trials;

    std::vector<AffectRegressorRow> rows;
    rows.reserve(transcript.rows.size());
    for (const auto& row : transcript.rows) {
        const TrialSpec& trial = trials[static_cast<std::size_t>(row.trial) - 1];
        AffectRegressorRow r;
        if (row.choice == Choice::certain) {
            r.cr = trial.certain_value;
        } else {
            r.ev = trial.gamble_ev();
            r.rpe = row.outcome - r.ev;
            r.gr = row.outcome;
        }
        rows.push_back(r);
    }
    return rows;
}

double decayed_sum(std::span<const double> series, double gamma, int t) {
    if (t < 1 || static_cast<std::size_t>(t) > series.size())
        throw std::invalid_argument("decayed_sum: t out of range");
    double sum = 0.0;
    double weight = 1.0;  // gamma^0, also for gamma = 0
    for (int j = t; j >= 1; --j) {
        sum += weight * series[static_cast<std::size_t>(j) - 1];
        weight *= gamma;
    }
    return sum;
}

std::vector<std::pair<int, double>> predict_happiness(const AffectParams& params,
                                                      const SessionTranscript& transcript) {
    const auto regressors = regressors_from_transcript(transcript);

    std::vector<std::pair<int, double>> predictions;
    predictions.reserve(transcript.task->probe_after.size());

    double s_cr = 0.0, s_ev = 0.0, s_rpe = 0.0, s_gr = 0.0;
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        const int index = static_cast<int>(i) + 1;
        s_cr = params.gamma * s_cr + regressors[i].cr;
        s_ev = params.gamma * s_ev + regressors[i].ev;
        s_rpe = params.gamma * s_rpe + regressors[i].rpe;
        s_gr = params.gamma * s_gr + regressors[i].gr;
        if (transcript.task->probe_after.count(index) == 0) continue;

        double predicted = params.beta0 + params.beta_cr * s_cr;
        if (params.model_id == AffectModel::mm1)
            predicted += params.beta_ev * s_ev + params.beta_rpe * s_rpe;
        else
            predicted += params.beta_gr * s_gr;
        predictions.emplace_back(index, predicted);
    }
    return predictions;
}

double predict_happiness_at(const AffectParams& params, const SessionTranscript& transcript,
                            int t) {
    const auto regressors = regressors_from_transcript(transcript);
    if (t < 1 || static_cast<std::size_t>(t) > regressors.size())
        throw std::invalid_argument("predict_happiness_at: t out of range");

    double s_cr = 0.0, s_ev = 0.0, s_rpe = 0.0, s_gr = 0.0;
    for (int j = 0; j < t; ++j) {
        s_cr = params.gamma * s_cr + regressors[static_cast<std::size_t>(j)].cr;
        s_ev = params.gamma * s_ev + regressors[static_cast<std::size_t>(j)].ev;
        s_rpe = params.gamma * s_rpe + regressors[static_cast<std::size_t>(j)].rpe;
        s_gr = params.gamma * s_gr + regressors[static_cast<std::size_t>(j)].gr;
    }
    double predicted = params.beta0 + params.beta_cr * s_cr;
    if (params.model_id == AffectModel::mm1)
        predicted += params.beta_ev * s_ev + params.beta_rpe * s_rpe;
    else
        predicted += params.beta_gr * s_gr;
    return predicted;
}

double affect_sse(const AffectParams& params, const SessionTranscript& transcript) {
    if (transcript.ratings.empty())
        throw std::invalid_argument("affect_sse: transcript has no ratings");

    const auto predictions = predict_happiness(params, transcript);

    double sse = 0.0;
    for (const auto& rating : transcript.ratings) {
        double predicted = 0.0;
        bool found = false;
        for (const auto& [index, value] : predictions) {
            if (index == rating.trial) {
                predicted = value;
                found = true;
                break;
            }
        }
        if (!found)
            throw ValidationError("rating at trial " + std::to_string(rating.trial) +
                                  " has no matching probe");
        const double residual = rating.rating - predicted;
        sse += residual * residual;
    }
    return sse;
}

const char* to_string(AffectModel m) { return m == AffectModel::mm1 ? "mM1" : "mM2"; }

AffectModel affect_model_from_string(const std::string& s) {
    if (s == "mM1") return AffectModel::mm1;
    if (s == "mM2") return AffectModel::mm2;
    throw ValidationError("unknown affect model: " + s);
}

int affect_model_n_params(AffectModel m) { return m == AffectModel::mm1 ? 5 : 4; }

}  // namespace risklab
