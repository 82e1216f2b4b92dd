#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "risklab/task.hpp"

namespace risklab {

// Affect model space:
//   mM1  happiness ~ beta0 + CR + EV + RPE terms, decayed by gamma
//   mM2  happiness ~ beta0 + CR + GR terms, decayed by gamma
enum class AffectModel { mm1, mm2 };

struct AffectParams {
    AffectModel model_id = AffectModel::mm1;
    double beta0 = 0.0;
    double beta_cr = 0.0;
    double beta_ev = 0.0;
    double beta_rpe = 0.0;
    double beta_gr = 0.0;
    double gamma = 0.0;  // forgetting factor in [0,1]
};

// Per-trial event regressors. Exactly one of {cr} / {ev, rpe, gr} is
// populated, depending on the choice taken.
struct AffectRegressorRow {
    double cr = 0.0;   // certain value, if the certain option was chosen
    double ev = 0.0;   // gamble EV, if the gamble was chosen
    double rpe = 0.0;  // outcome - EV, if the gamble was chosen
    double gr = 0.0;   // realized gamble outcome, if the gamble was chosen
};

std::vector<AffectRegressorRow> regressors_from_transcript(const SessionTranscript& transcript);

// sum_{j=1..t} gamma^(t-j) * series[j-1], with gamma^0 = 1 for all gamma.
double decayed_sum(std::span<const double> series, double gamma, int t);

// Model predictions at each probe index, unclamped.
std::vector<std::pair<int, double>> predict_happiness(const AffectParams& params,
                                                      const SessionTranscript& transcript);

// Prediction at one trial index, probe or not (generative use).
double predict_happiness_at(const AffectParams& params, const SessionTranscript& transcript,
                            int t);

// Sum of squared residuals over the probes. Throws DegenerateDataError
// equivalent invalid-argument when the transcript has no ratings.
double affect_sse(const AffectParams& params, const SessionTranscript& transcript);

const char* to_string(AffectModel m);
AffectModel affect_model_from_string(const std::string& s);
int affect_model_n_params(AffectModel m);  // mM1 -> 5, mM2 -> 4

}  // namespace risklab
