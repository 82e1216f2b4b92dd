#include "risklab/task.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "risklab/errors.hpp"

namespace risklab {

namespace {

// Stake grids in integer centi-units so every derived value is an exact
// two-decimal number.
constexpr int kMixedGains[] = {40, 45, 75};
constexpr int kMixedMultipliersCenti[] = {20, 34, 50, 64, 77, 89, 100, 110, 135, 200};
constexpr int kGainCertain[] = {35, 45, 55};
constexpr int kLossCertain[] = {-35, -45, -55};
constexpr int kGainLossMultipliersCenti[] = {168, 182, 200, 222, 248, 280, 316, 360, 420, 500};

double from_centi(long long centi) { return static_cast<double>(centi) / 100.0; }

constexpr std::uint64_t kShuffleStream = 0xA11CE5;
constexpr std::uint64_t kOptionOrderStream = 0x0B5E55;

}  // namespace

std::set<int> schedule_probes(int n_trials, std::uint64_t seed) {
    if (n_trials < 3) throw std::invalid_argument("schedule_probes: n_trials must be >= 3");
    Rng rng(seed);
    std::set<int> probes;
    int pos = rng.coin() ? 3 : 2;
    while (pos <= n_trials) {
        probes.insert(pos);
        pos += rng.coin() ? 3 : 2;
    }
    return probes;
}

TaskSet build_trial_set(std::uint64_t seed) {
    TaskSet task;
    task.seed = seed;
    task.trials.reserve(kTrialCount);

    for (int g : kMixedGains) {
        for (int mc : kMixedMultipliersCenti) {
            TrialSpec t;
            t.trial_type = TrialType::mixed;
            t.certain_value = 0.0;
            t.gamble_gain = static_cast<double>(g);
            t.gamble_loss = from_centi(-static_cast<long long>(g) * mc);
            t.multiplier = from_centi(mc);
            task.trials.push_back(t);
        }
    }
    for (int c : kGainCertain) {
        for (int mc : kGainLossMultipliersCenti) {
            TrialSpec t;
            t.trial_type = TrialType::gain;
            t.certain_value = static_cast<double>(c);
            t.gamble_gain = from_centi(static_cast<long long>(c) * mc);
            t.gamble_loss = 0.0;
            t.multiplier = from_centi(mc);
            task.trials.push_back(t);
        }
    }
    for (int c : kLossCertain) {
        for (int mc : kGainLossMultipliersCenti) {
            TrialSpec t;
            t.trial_type = TrialType::loss;
            t.certain_value = static_cast<double>(c);
            t.gamble_gain = 0.0;
            t.gamble_loss = from_centi(static_cast<long long>(c) * mc);
            t.multiplier = from_centi(mc);
            task.trials.push_back(t);
        }
    }

    Rng shuffle_rng(derive_seed(seed, kShuffleStream));
    shuffle_rng.shuffle(task.trials);

    Rng order_rng(derive_seed(seed, kOptionOrderStream));
    for (auto& t : task.trials)
        t.option_order = order_rng.coin() ? OptionOrder::certain_first : OptionOrder::gamble_first;

    task.probe_after = schedule_probes(static_cast<int>(task.trials.size()), seed);
    return task;
}

TaskSet with_probe_schedule(const TaskSet& base, std::set<int> probes) {
    TaskSet task = base;
    task.probe_after = std::move(probes);
    return task;
}

double resolve_outcome(const TrialSpec& trial, Choice choice, Rng& rng) {
    if (choice == Choice::certain) return trial.certain_value;
    return rng.coin() ? trial.gamble_gain : trial.gamble_loss;
}

SessionTranscript run_session(Agent& agent, std::shared_ptr<const TaskSet> task,
                              std::uint64_t session_seed, std::string agent_id) {
    if (!task) throw std::invalid_argument("run_session: null task");
    SessionTranscript transcript;
    transcript.agent_id = std::move(agent_id);
    transcript.session_seed = session_seed;
    transcript.task = task;
    transcript.rows.reserve(task->trials.size());

    Rng outcome_rng(derive_seed(session_seed, 0));

    for (std::size_t i = 0; i < task->trials.size(); ++i) {
        const int index = static_cast<int>(i) + 1;
        const TrialSpec& trial = task->trials[i];
        try {
            const Choice choice = agent.choose(trial, transcript);

            TranscriptRow row;
            row.trial = index;
            row.choice = choice;
            if (auto forced = agent.replay_outcome(index)) {
                row.outcome = *forced;
            } else {
                row.outcome = resolve_outcome(trial, choice, outcome_rng);
            }
            const double prev =
                transcript.rows.empty() ? kInitialEndowment : transcript.rows.back().cumulative_points;
            row.cumulative_points = prev + row.outcome;
            transcript.rows.push_back(row);

            agent.observe(trial, row);

            if (task->probe_after.count(index) > 0) {
                const int rating = agent.rate(transcript);
                if (rating < 0 || rating > 100)
                    throw std::runtime_error("agent returned rating outside 0-100: " +
                                             std::to_string(rating));
                transcript.ratings.push_back({index, static_cast<double>(rating)});
            }
        } catch (const SessionError&) {
            throw;
        } catch (const RemoteAgentError& e) {
            throw RemoteAgentError("trial " + std::to_string(index) + ": " + e.what());
        } catch (const std::exception& e) {
            throw SessionError(index, e.what());
        }
    }
    return transcript;
}

namespace {

bool contains(const int* begin, const int* end, int v) {
    return std::find(begin, end, v) != end;
}

void check(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

void validate_trial(const TrialSpec& t) {
    const long long mc = std::llround(t.multiplier * 100.0);
    check(std::abs(t.multiplier * 100.0 - static_cast<double>(mc)) < 1e-9,
          "multiplier is not a two-decimal value");
    switch (t.trial_type) {
        case TrialType::mixed: {
            check(t.certain_value == 0.0, "mixed trial with nonzero certain value");
            const int g = static_cast<int>(t.gamble_gain);
            check(t.gamble_gain == static_cast<double>(g) &&
                      contains(std::begin(kMixedGains), std::end(kMixedGains), g),
                  "mixed trial gain not in grid");
            check(contains(std::begin(kMixedMultipliersCenti), std::end(kMixedMultipliersCenti),
                           static_cast<int>(mc)),
                  "mixed trial multiplier not in grid");
            check(t.gamble_loss == from_centi(-static_cast<long long>(g) * mc),
                  "mixed trial loss != -multiplier*gain");
            break;
        }
        case TrialType::gain: {
            const int c = static_cast<int>(t.certain_value);
            check(t.certain_value == static_cast<double>(c) &&
                      contains(std::begin(kGainCertain), std::end(kGainCertain), c),
                  "gain trial certain value not in grid");
            check(contains(std::begin(kGainLossMultipliersCenti),
                           std::end(kGainLossMultipliersCenti), static_cast<int>(mc)),
                  "gain trial multiplier not in grid");
            check(t.gamble_loss == 0.0, "gain trial with nonzero gamble loss");
            check(t.gamble_gain == from_centi(static_cast<long long>(c) * mc),
                  "gain trial gamble gain != multiplier*certain");
            break;
        }
        case TrialType::loss: {
            const int c = static_cast<int>(t.certain_value);
            check(t.certain_value == static_cast<double>(c) &&
                      contains(std::begin(kLossCertain), std::end(kLossCertain), c),
                  "loss trial certain value not in grid");
            check(contains(std::begin(kGainLossMultipliersCenti),
                           std::end(kGainLossMultipliersCenti), static_cast<int>(mc)),
                  "loss trial multiplier not in grid");
            check(t.gamble_gain == 0.0, "loss trial with nonzero gamble gain");
            check(t.gamble_loss == from_centi(static_cast<long long>(c) * mc),
                  "loss trial gamble loss != multiplier*certain");
            break;
        }
    }
}

}  // namespace

void validate_task(const TaskSet& task) {
    check(task.trials.size() == kTrialCount, "task must have 90 trials");

    int per_type[3] = {0, 0, 0};
    std::set<std::pair<long long, long long>> cells[3];
    for (const auto& t : task.trials) {
        validate_trial(t);
        const int type = static_cast<int>(t.trial_type);
        ++per_type[type];
        const long long amount = std::llround(
            t.trial_type == TrialType::mixed ? t.gamble_gain : t.certain_value);
        cells[type].insert({amount, std::llround(t.multiplier * 100.0)});
    }
    for (int type = 0; type < 3; ++type) {
        check(per_type[type] == kTrialsPerType, "expected 30 trials per type");
        check(cells[type].size() == kTrialsPerType, "duplicate (amount, multiplier) cell");
    }

    check(!task.probe_after.empty(), "empty probe schedule");
    const int n = static_cast<int>(task.trials.size());
    int prev = 0;
    for (int p : task.probe_after) {
        const int gap = p - prev;
        check(gap == 2 || gap == 3, "probe gap outside {2,3}");
        check(p >= 1 && p <= n, "probe index out of range");
        prev = p;
    }
    const auto count = static_cast<int>(task.probe_after.size());
    check(count >= 30 && count <= 45, "probe count outside [30,45]");
}

void validate_transcript(const SessionTranscript& transcript) {
    check(static_cast<bool>(transcript.task), "transcript lacks a task reference");
    const auto& trials = transcript.task->trials;
    check(transcript.rows.size() == trials.size(), "row count != trial count");

    double cumulative = kInitialEndowment;
    for (std::size_t i = 0; i < transcript.rows.size(); ++i) {
        const auto& row = transcript.rows[i];
        const auto& trial = trials[i];
        check(row.trial == static_cast<int>(i) + 1, "rows out of order");
        if (row.choice == Choice::certain) {
            check(row.outcome == trial.certain_value, "certain outcome != certain value");
        } else {
            check(row.outcome == trial.gamble_gain || row.outcome == trial.gamble_loss,
                  "gamble outcome not one of the gamble branches");
        }
        cumulative += row.outcome;
        check(std::abs(row.cumulative_points - cumulative) < 1e-9,
              "cumulative points is not the running sum");
    }

    for (const auto& r : transcript.ratings) {
        check(transcript.task->probe_after.count(r.trial) > 0, "rating at a non-probe trial");
        check(r.rating >= 0.0 && r.rating <= 100.0, "rating outside [0,100]");
    }
}

const char* to_string(TrialType t) {
    switch (t) {
        case TrialType::mixed: return "mixed";
        case TrialType::gain: return "gain";
        case TrialType::loss: return "loss";
    }
    return "?";
}

const char* to_string(OptionOrder o) {
    return o == OptionOrder::gamble_first ? "gamble_first" : "certain_first";
}

const char* to_string(Choice c) { return c == Choice::gamble ? "gamble" : "certain"; }

TrialType trial_type_from_string(const std::string& s) {
    if (s == "mixed") return TrialType::mixed;
    if (s == "gain") return TrialType::gain;
    if (s == "loss") return TrialType::loss;
    throw ValidationError("unknown trial type: " + s);
}

OptionOrder option_order_from_string(const std::string& s) {
    if (s == "gamble_first") return OptionOrder::gamble_first;
    if (s == "certain_first") return OptionOrder::certain_first;
    throw ValidationError("unknown option order: " + s);
}

Choice choice_from_string(const std::string& s) {
    if (s == "gamble") return Choice::gamble;
    if (s == "certain") return Choice::certain;
    throw ValidationError("unknown choice: " + s);
}

}  // namespace risklab
