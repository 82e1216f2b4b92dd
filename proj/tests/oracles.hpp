#pragma once

// Test-only reference implementations, kept independent of the library code
// they check: long-double arithmetic, direct formula translations, no shared
// helpers with src/.

#include <cmath>
#include <vector>

#include "risklab/affect_models.hpp"
#include "risklab/choice_models.hpp"
#include "risklab/task.hpp"

namespace oracles {

inline long double power0(long double v, long double a) {
    return v == 0.0L ? 0.0L : std::pow(v, a);
}

inline long double gamble_utility(const risklab::TrialSpec& t, const risklab::ChoiceParams& p) {
    return 0.5L * power0(t.gamble_gain, p.alpha) -
           0.5L * static_cast<long double>(p.lambda) * power0(-t.gamble_loss, p.alpha);
}

inline long double certain_utility(const risklab::TrialSpec& t, const risklab::ChoiceParams& p) {
    const long double v = t.certain_value;
    if (v >= 0.0L) return power0(v, p.alpha);
    return -static_cast<long double>(p.lambda) * power0(-v, p.alpha);
}

inline long double p_gamble(const risklab::TrialSpec& t, const risklab::ChoiceParams& p) {
    const long double du = oracles::gamble_utility(t, p) - oracles::certain_utility(t, p);
    long double beta_val = 0.0L;
    long double bias = 0.0L;
    switch (p.model_id) {
        case risklab::ChoiceModel::cm1:
        case risklab::ChoiceModel::cm2:
            break;
        case risklab::ChoiceModel::cm3:
            if (t.trial_type == risklab::TrialType::gain) beta_val = p.beta_gain;
            if (t.trial_type == risklab::TrialType::loss) beta_val = p.beta_loss;
            break;
        case risklab::ChoiceModel::cm4:
            bias = p.beta_bias;
            break;
    }
    const long double s = 1.0L / (1.0L + std::exp(-static_cast<long double>(p.mu) * (du + bias)));
    if (beta_val >= 0.0L) return (1.0L - beta_val) * s + beta_val;
    return (1.0L + beta_val) * s;
}

// 1 - p_gamble via its algebraic expansion. With s = 1/(1+e^-z):
//   b >= 0: 1 - [(1-b)s + b] = (1-b)(1-s)            = (1-b)/(1+e^z)
//   b <  0: 1 - (1+b)s       = (1-s) - b s           = 1/(1+e^z) - b/(1+e^-z)
// Every term is positive, so deep tails don't cancel.
inline long double p_certain(const risklab::TrialSpec& t, const risklab::ChoiceParams& p) {
    const long double du = oracles::gamble_utility(t, p) - oracles::certain_utility(t, p);
    long double beta_val = 0.0L;
    long double bias = 0.0L;
    if (p.model_id == risklab::ChoiceModel::cm3) {
        if (t.trial_type == risklab::TrialType::gain) beta_val = p.beta_gain;
        if (t.trial_type == risklab::TrialType::loss) beta_val = p.beta_loss;
    } else if (p.model_id == risklab::ChoiceModel::cm4) {
        bias = p.beta_bias;
    }
    const long double z = static_cast<long double>(p.mu) * (du + bias);
    const long double one_minus_s = 1.0L / (1.0L + std::exp(z));
    if (beta_val >= 0.0L) return (1.0L - beta_val) * one_minus_s;
    return one_minus_s - beta_val / (1.0L + std::exp(-z));
}

// Product-of-probabilities likelihood, recomputed per trial from scratch.
inline double choice_nll(const risklab::ChoiceParams& p,
                         const risklab::SessionTranscript& transcript) {
    long double nll = 0.0L;
    for (const auto& row : transcript.rows) {
        const auto& trial = transcript.task->trials[static_cast<std::size_t>(row.trial) - 1];
        long double prob = row.choice == risklab::Choice::gamble
                               ? oracles::p_gamble(trial, p)
                               : oracles::p_certain(trial, p);
        if (prob < 1e-12L) prob = 1e-12L;
        if (prob > 1.0L - 1e-12L) prob = 1.0L - 1e-12L;
        nll -= std::log(prob);
    }
    return static_cast<double>(nll);
}

// Quadratic-time decayed sum, straight from the formula.
inline double decayed_sum(const std::vector<double>& series, double gamma, int t) {
    long double sum = 0.0L;
    for (int j = 1; j <= t; ++j)
        sum += std::pow(static_cast<long double>(gamma), static_cast<long double>(t - j)) *
               static_cast<long double>(series[static_cast<std::size_t>(j) - 1]);
    return static_cast<double>(sum);
}

// Direct evaluation of the affect model at probe t via quadratic-time sums.
inline double predict_happiness(const risklab::AffectParams& p,
                                const std::vector<risklab::AffectRegressorRow>& rows, int t) {
    std::vector<double> cr, ev, rpe, gr;
    for (const auto& r : rows) {
        cr.push_back(r.cr);
        ev.push_back(r.ev);
        rpe.push_back(r.rpe);
        gr.push_back(r.gr);
    }
    double predicted = p.beta0 + p.beta_cr * oracles::decayed_sum(cr, p.gamma, t);
    if (p.model_id == risklab::AffectModel::mm1)
        predicted += p.beta_ev * oracles::decayed_sum(ev, p.gamma, t) +
                     p.beta_rpe * oracles::decayed_sum(rpe, p.gamma, t);
    else
        predicted += p.beta_gr * oracles::decayed_sum(gr, p.gamma, t);
    return predicted;
}

inline double affect_sse(const risklab::AffectParams& p,
                         const risklab::SessionTranscript& transcript) {
    const auto rows = risklab::regressors_from_transcript(transcript);
    long double sse = 0.0L;
    for (const auto& rating : transcript.ratings) {
        const long double residual =
            rating.rating - oracles::predict_happiness(p, rows, rating.trial);
        sse += residual * residual;
    }
    return static_cast<double>(sse);
}

}  // namespace oracles
