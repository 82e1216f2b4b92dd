#pragma once

#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "risklab/affect_models.hpp"
#include "risklab/chat_client.hpp"
#include "risklab/choice_models.hpp"
#include "risklab/prompt.hpp"
#include "risklab/rng.hpp"
#include "risklab/task.hpp"

namespace risklab {

enum class AgentKind { synthetic, ev_max, llm, replay };

struct AgentDescriptor {
    std::string id;
    AgentKind kind = AgentKind::synthetic;

    // synthetic
    ChoiceParams choice_params;
    AffectParams affect_params;
    double rating_noise_sigma = 0.0;

    // llm
    std::string endpoint;
    std::string model_name;
    double temperature = 1.0;
    int max_retries = 3;  // clarification re-asks per malformed reply
    std::string api_key_env = "RISKLAB_API_KEY";

    // replay
    std::string source_transcript;
};

// Samples from the model's own choice rule.
Choice synthetic_choose(const TrialSpec& trial, const ChoiceParams& params, Rng& rng);

// Model prediction at the current trial plus Gaussian noise, rounded and
// clamped to [0, 100].
int synthetic_rate(const SessionTranscript& history, const AffectParams& affect, double sigma,
                   Rng& rng);

// Gamble iff EV(gamble) > EV(certain); fair coin on exact ties.
Choice ev_max_choose(const TrialSpec& trial, Rng& rng);

class SyntheticAgent : public Agent {
public:
    SyntheticAgent(ChoiceParams choice, AffectParams affect, double sigma, Rng rng)
        : choice_(choice), affect_(affect), sigma_(sigma), rng_(rng) {}

    Choice choose(const TrialSpec& trial, const SessionTranscript&) override {
        return synthetic_choose(trial, choice_, rng_);
    }
    int rate(const SessionTranscript& history) override {
        return synthetic_rate(history, affect_, sigma_, rng_);
    }

private:
    ChoiceParams choice_;
    AffectParams affect_;
    double sigma_;
    Rng rng_;
};

class EvMaxAgent : public Agent {
public:
    explicit EvMaxAgent(Rng rng) : rng_(rng) {}

    Choice choose(const TrialSpec& trial, const SessionTranscript&) override {
        return ev_max_choose(trial, rng_);
    }
    int rate(const SessionTranscript&) override { return 50; }

private:
    Rng rng_;
};

// Feeds a stored transcript back through run_session, outcomes included.
class ReplayAgent : public Agent {
public:
    explicit ReplayAgent(SessionTranscript source) : source_(std::move(source)) {}

    Choice choose(const TrialSpec& trial, const SessionTranscript& history) override;
    int rate(const SessionTranscript& history) override;
    std::optional<double> replay_outcome(int trial_index) override;

private:
    SessionTranscript source_;
};

using AuditSink = std::function<void(const nlohmann::json&)>;

// Conversational agent over a chat-completions endpoint. The full session
// history stays in context; malformed replies get a clarification turn up to
// max_retries before the session aborts.
class ChatAgent : public Agent {
public:
    ChatAgent(const AgentDescriptor& descriptor, PromptScript script, std::string api_key,
              AuditSink audit = {}, RetryPolicy transport_policy = {});

    Choice choose(const TrialSpec& trial, const SessionTranscript& history) override;
    int rate(const SessionTranscript& history) override;
    void observe(const TrialSpec& trial, const TranscriptRow& row) override;

    const PromptScript& script() const { return script_; }

private:
    std::string ask(const std::string& user_text);
    void audit(const nlohmann::json& entry);

    AgentDescriptor descriptor_;
    PromptScript script_;
    ChatClient client_;
    AuditSink audit_;
    std::vector<ChatMessage> conversation_;
    std::string pending_feedback_;
};

// Reads the credential named by the descriptor (empty name -> no credential).
// Throws ValidationError if the variable is named but unset.
std::string resolve_api_key(const AgentDescriptor& descriptor);

const char* to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& s);

}  // namespace risklab
