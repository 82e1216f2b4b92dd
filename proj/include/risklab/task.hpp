#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "risklab/rng.hpp"

namespace risklab {

enum class TrialType { mixed, gain, loss };
enum class OptionOrder { gamble_first, certain_first };
enum class Choice { gamble, certain };

constexpr double kInitialEndowment = 500.0;
constexpr int kTrialsPerType = 30;
constexpr int kTrialCount = 90;

// One trial: a certain option vs a 50/50 gamble. Values are exact decimals
// (amount x two-decimal multiplier), constructed from integer arithmetic so
// equality checks and EV ties are exact.
struct TrialSpec {
    TrialType trial_type = TrialType::mixed;
    double certain_value = 0.0;
    double gamble_gain = 0.0;  // >= 0
    double gamble_loss = 0.0;  // <= 0
    double multiplier = 0.0;
    OptionOrder option_order = OptionOrder::gamble_first;

    double gamble_ev() const { return 0.5 * gamble_gain + 0.5 * gamble_loss; }
};

struct TaskSet {
    std::vector<TrialSpec> trials;
    std::set<int> probe_after;  // 1-based trial indices with a happiness probe
    std::uint64_t seed = 0;
};

struct TranscriptRow {
    int trial = 0;  // 1-based
    Choice choice = Choice::certain;
    double outcome = 0.0;
    double cumulative_points = 0.0;
};

// Ratings are integers 0-100 on the task protocol; the field is a double so
// models (which treat ratings as reals) and synthetic oracles can share it.
struct RatingRow {
    int trial = 0;
    double rating = 0.0;
};

struct SessionTranscript {
    std::string agent_id;
    std::uint64_t session_seed = 0;
    std::string prompt_version;  // set for chat-agent sessions
    std::shared_ptr<const TaskSet> task;
    std::vector<TranscriptRow> rows;
    std::vector<RatingRow> ratings;

    double final_points() const {
        return rows.empty() ? kInitialEndowment : rows.back().cumulative_points;
    }
};

// Decision agent driven by run_session. choose() sees the history up to the
// previous trial; observe() delivers the resolved outcome; rate() is called
// after the outcome of a probe trial, with that trial already in the history.
class Agent {
public:
    virtual ~Agent() = default;

    virtual Choice choose(const TrialSpec& trial, const SessionTranscript& history) = 0;
    virtual int rate(const SessionTranscript& history) = 0;
    virtual void observe(const TrialSpec& /*trial*/, const TranscriptRow& /*row*/) {}

    // Replay agents supply recorded outcomes; everyone else leaves resolution
    // to the session RNG.
    virtual std::optional<double> replay_outcome(int /*trial_index*/) { return std::nullopt; }
};

// Canonical 90-trial task: each (amount x multiplier) cell once per type,
// uniformly shuffled, option order a fair coin per trial, probes from
// schedule_probes(seed).
TaskSet build_trial_set(std::uint64_t seed);

// Probe indices: first at 2 or 3, subsequent gaps uniform on {2,3}, all <= n.
// Throws std::invalid_argument for n_trials < 3.
std::set<int> schedule_probes(int n_trials, std::uint64_t seed);

// Same trials, different probe schedule (probe schedules are re-randomized
// per session; see run pipeline).
TaskSet with_probe_schedule(const TaskSet& base, std::set<int> probes);

double resolve_outcome(const TrialSpec& trial, Choice choice, Rng& rng);

SessionTranscript run_session(Agent& agent, std::shared_ptr<const TaskSet> task,
                              std::uint64_t session_seed, std::string agent_id = {});

// Throw ValidationError if an invariant fails.
void validate_task(const TaskSet& task);
void validate_transcript(const SessionTranscript& transcript);

const char* to_string(TrialType t);
const char* to_string(OptionOrder o);
const char* to_string(Choice c);
TrialType trial_type_from_string(const std::string& s);
OptionOrder option_order_from_string(const std::string& s);
Choice choice_from_string(const std::string& s);

}  // namespace risklab
