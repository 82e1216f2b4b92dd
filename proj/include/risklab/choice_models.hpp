#pragma once

#include <span>
#include <string>

#include "risklab/task.hpp"

namespace risklab {

// Choice model space:
//   cM1  expected value + softmax            (mu)
//   cM2  prospect theory                     (alpha, lambda, mu)
//   cM3  cM2 + approach/avoidance biases     (alpha, lambda, mu, beta_gain, beta_loss)
//   cM4  cM2 + additive bias in the softmax  (alpha, lambda, mu, beta_bias)
enum class ChoiceModel { cm1, cm2, cm3, cm4 };

struct ChoiceParams {
    ChoiceModel model_id = ChoiceModel::cm2;
    double alpha = 1.0;      // risk aversion exponent
    double lambda = 1.0;     // loss aversion weight
    double mu = 1.0;         // inverse temperature
    double beta_gain = 0.0;  // Pavlovian approach bias, gain trials
    double beta_loss = 0.0;  // Pavlovian avoidance bias, loss trials
    double beta_bias = 0.0;  // additive bias, reward-equivalent units
};

// Fitting bounds per parameter.
struct ChoiceParamSpec {
    const char* name;
    double lo;
    double hi;
    double ChoiceParams::*field;
};

// Free parameters of a model, in fitting order. cM1: {mu}; cM2: {alpha,
// lambda, mu}; cM3: {alpha, lambda, mu, beta_gain, beta_loss}; cM4: {alpha,
// lambda, mu, beta_bias}.
std::span<const ChoiceParamSpec> choice_free_params(ChoiceModel model);

// Forces parameters a model fixes back to their fixed values
// (cM1: alpha=lambda=1, betas 0; cM2: betas 0; cM3: beta_bias=0; cM4: beta_gain=beta_loss=0).
ChoiceParams canonical_choice_params(ChoiceParams p);

// 0.5*gain^alpha - 0.5*lambda*(-loss)^alpha, zero-valued branches contribute 0.
double gamble_utility(const TrialSpec& trial, const ChoiceParams& params);

// certain^alpha if certain >= 0, else -lambda*(-certain)^alpha.
double certain_utility(const TrialSpec& trial, const ChoiceParams& params);

double p_gamble(const TrialSpec& trial, const ChoiceParams& params);

// 1 - p_gamble, evaluated via the algebraic complement so deep logistic
// tails don't cancel: 1-[(1-b)s(x)+b] = (1-b)s(-x) and
// 1-(1+b)s(x) = s(-x) - b*s(x).
double p_certain(const TrialSpec& trial, const ChoiceParams& params);

// -sum log P(chosen), probabilities clamped to [1e-12, 1-1e-12].
double choice_nll(const ChoiceParams& params, const SessionTranscript& transcript);

constexpr double kChoiceProbClamp = 1e-12;

const char* to_string(ChoiceModel m);
ChoiceModel choice_model_from_string(const std::string& s);
int choice_model_n_params(ChoiceModel m);

}  // namespace risklab
