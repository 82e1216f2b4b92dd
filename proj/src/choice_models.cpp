#include "risklab/choice_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "risklab/errors.hpp"

namespace risklab {

namespace {

constexpr ChoiceParamSpec kAlpha{"alpha", 0.3, 1.3, &ChoiceParams::alpha};
constexpr ChoiceParamSpec kLambda{"lambda", 0.5, 5.0, &ChoiceParams::lambda};
constexpr ChoiceParamSpec kMu{"mu", 0.0, 10.0, &ChoiceParams::mu};
constexpr ChoiceParamSpec kBetaGain{"beta_gain", -1.0, 1.0, &ChoiceParams::beta_gain};
constexpr ChoiceParamSpec kBetaLoss{"beta_loss", -1.0, 1.0, &ChoiceParams::beta_loss};
constexpr ChoiceParamSpec kBetaBias{"beta_bias", -20.0, 20.0, &ChoiceParams::beta_bias};

constexpr ChoiceParamSpec kFreeCm1[] = {kMu};
constexpr ChoiceParamSpec kFreeCm2[] = {kAlpha, kLambda, kMu};
constexpr ChoiceParamSpec kFreeCm3[] = {kAlpha, kLambda, kMu, kBetaGain, kBetaLoss};
constexpr ChoiceParamSpec kFreeCm4[] = {kAlpha, kLambda, kMu, kBetaBias};

// v^alpha with the 0^alpha = 0 convention; callers pass v >= 0.
double power_or_zero(double v, double alpha) {
    return v == 0.0 ? 0.0 : std::pow(v, alpha);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::span<const ChoiceParamSpec> choice_free_params(ChoiceModel model) {
    switch (model) {
        case ChoiceModel::cm1: return kFreeCm1;
        case ChoiceModel::cm2: return kFreeCm2;
        case ChoiceModel::cm3: return kFreeCm3;
        case ChoiceModel::cm4: return kFreeCm4;
    }
    return {};
}

ChoiceParams canonical_choice_params(ChoiceParams p) {
    switch (p.model_id) {
        case ChoiceModel::cm1:
            p.alpha = 1.0;
            p.lambda = 1.0;
            p.beta_gain = p.beta_loss = p.beta_bias = 0.0;
            break;
        case ChoiceModel::cm2:
            p.beta_gain = p.beta_loss = p.beta_bias = 0.0;
            break;
        case ChoiceModel::cm3:
            p.beta_bias = 0.0;
            break;
        case ChoiceModel::cm4:
            p.beta_gain = p.beta_loss = 0.0;
            break;
    }
    return p;
}

double gamble_utility(const TrialSpec& trial, const ChoiceParams& params) {
    return 0.5 * power_or_zero(trial.gamble_gain, params.alpha) -
           0.5 * params.lambda * power_or_zero(-trial.gamble_loss, params.alpha);
}

double certain_utility(const TrialSpec& trial, const ChoiceParams& params) {
    if (trial.certain_value >= 0.0) return power_or_zero(trial.certain_value, params.alpha);
    return -params.lambda * power_or_zero(-trial.certain_value, params.alpha);
}

namespace {

// Softmax argument and trial-type bias for a parameter point.
struct LogisticTerms {
    double z = 0.0;         // mu * (dU [+ bias])
    double beta_val = 0.0;  // cm3 bias on this trial, else 0
};

LogisticTerms logistic_terms(const TrialSpec& trial, const ChoiceParams& params) {
    const double du = gamble_utility(trial, params) - certain_utility(trial, params);
    LogisticTerms terms;
    switch (params.model_id) {
        case ChoiceModel::cm1:
        case ChoiceModel::cm2:
            terms.z = params.mu * du;
            break;
        case ChoiceModel::cm4:
            terms.z = params.mu * (du + params.beta_bias);
            break;
        case ChoiceModel::cm3:
            terms.z = params.mu * du;
            // Biases apply to gain and loss trials only.
            if (trial.trial_type == TrialType::gain) terms.beta_val = params.beta_gain;
            else if (trial.trial_type == TrialType::loss) terms.beta_val = params.beta_loss;
            break;
    }
    return terms;
}

}  // namespace

double p_gamble(const TrialSpec& trial, const ChoiceParams& params) {
    const auto [z, beta_val] = logistic_terms(trial, params);
    const double s = logistic(z);
    return beta_val >= 0.0 ? (1.0 - beta_val) * s + beta_val : (1.0 + beta_val) * s;
}

double p_certain(const TrialSpec& trial, const ChoiceParams& params) {
    const auto [z, beta_val] = logistic_terms(trial, params);
    if (beta_val >= 0.0) return (1.0 - beta_val) * logistic(-z);
    return logistic(-z) - beta_val * logistic(z);
}

double choice_nll(const ChoiceParams& params, const SessionTranscript& transcript) {
    if (transcript.rows.empty())
        throw std::invalid_argument("choice_nll: transcript has no trials");
    if (!transcript.task) throw std::invalid_argument("choice_nll: transcript lacks a task");

    const auto& trials = transcript.task->trials;
    double nll = 0.0;
    for (const auto& row : transcript.rows) {
        const auto& trial = trials[static_cast<std::size_t>(row.trial) - 1];
        double chosen = row.choice == Choice::gamble ? p_gamble(trial, params)
                                                     : p_certain(trial, params);
        chosen = std::clamp(chosen, kChoiceProbClamp, 1.0 - kChoiceProbClamp);
        nll -= std::log(chosen);
    }
    return nll;
}

const char* to_string(ChoiceModel m) {
    switch (m) {
        case ChoiceModel::cm1: return "cM1";
        case ChoiceModel::cm2: return "cM2";
        case ChoiceModel::cm3: return "cM3";
        case ChoiceModel::cm4: return "cM4";
    }
    return "?";
}

ChoiceModel choice_model_from_string(const std::string& s) {
    if (s == "cM1") return ChoiceModel::cm1;
    if (s == "cM2") return ChoiceModel::cm2;
    if (s == "cM3") return ChoiceModel::cm3;
    if (s == "cM4") return ChoiceModel::cm4;
    throw ValidationError("unknown choice model: " + s);
}

int choice_model_n_params(ChoiceModel m) {
    return static_cast<int>(choice_free_params(m).size());
}

}  // namespace risklab
