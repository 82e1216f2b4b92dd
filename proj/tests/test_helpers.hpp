#pragma once

#include <memory>
#include <set>
#include <vector>

#include "risklab/agents.hpp"
#include "risklab/task.hpp"

namespace helpers {

// Hand-built single-trial task for fixture tests.
inline std::shared_ptr<const risklab::TaskSet> tiny_task(std::vector<risklab::TrialSpec> trials,
                                                         std::set<int> probes) {
    risklab::TaskSet task;
    task.seed = 0;
    task.trials = std::move(trials);
    task.probe_after = std::move(probes);
    return std::make_shared<const risklab::TaskSet>(std::move(task));
}

inline risklab::TrialSpec mixed_trial(double gain, double multiplier) {
    risklab::TrialSpec t;
    t.trial_type = risklab::TrialType::mixed;
    t.certain_value = 0.0;
    t.gamble_gain = gain;
    t.gamble_loss = -multiplier * gain;
    t.multiplier = multiplier;
    return t;
}

inline risklab::TrialSpec gain_trial(double certain, double multiplier) {
    risklab::TrialSpec t;
    t.trial_type = risklab::TrialType::gain;
    t.certain_value = certain;
    t.gamble_gain = multiplier * certain;
    t.gamble_loss = 0.0;
    t.multiplier = multiplier;
    return t;
}

inline risklab::TrialSpec loss_trial(double certain, double multiplier) {
    risklab::TrialSpec t;
    t.trial_type = risklab::TrialType::loss;
    t.certain_value = certain;
    t.gamble_gain = 0.0;
    t.gamble_loss = multiplier * certain;
    t.multiplier = multiplier;
    return t;
}

// Simulates one synthetic session on a fresh task (probe schedule included).
inline risklab::SessionTranscript synthetic_session(const risklab::ChoiceParams& choice,
                                                    const risklab::AffectParams& affect,
                                                    double sigma, std::uint64_t seed,
                                                    std::string id = "synthetic") {
    auto task = std::make_shared<const risklab::TaskSet>(risklab::build_trial_set(seed));
    risklab::SyntheticAgent agent(choice, affect, sigma,
                                  risklab::Rng(risklab::derive_seed(seed, 77)));
    return risklab::run_session(agent, task, risklab::derive_seed(seed, 78), std::move(id));
}

}  // namespace helpers
