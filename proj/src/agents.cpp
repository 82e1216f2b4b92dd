#include "risklab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "risklab/errors.hpp"

namespace risklab {

Choice synthetic_choose(const TrialSpec& trial, const ChoiceParams& params, Rng& rng) {
    return rng.uniform() < p_gamble(trial, params) ? Choice::gamble : Choice::certain;
}

int synthetic_rate(const SessionTranscript& history, const AffectParams& affect, double sigma,
                   Rng& rng) {
    if (history.rows.empty())
        throw std::invalid_argument("synthetic_rate: empty history");
    const int t = history.rows.back().trial;
    double rating = predict_happiness_at(affect, history, t);
    if (sigma > 0.0) rating += rng.normal(0.0, sigma);
    const auto rounded = std::lround(rating);
    return static_cast<int>(std::clamp(rounded, 0L, 100L));
}

Choice ev_max_choose(const TrialSpec& trial, Rng& rng) {
    const double gamble_ev = trial.gamble_ev();
    if (gamble_ev > trial.certain_value) return Choice::gamble;
    if (gamble_ev < trial.certain_value) return Choice::certain;
    return rng.coin() ? Choice::gamble : Choice::certain;
}

Choice ReplayAgent::choose(const TrialSpec&, const SessionTranscript& history) {
    const std::size_t index = history.rows.size();
    if (index >= source_.rows.size())
        throw ValidationError("replay: source transcript is shorter than the task");
    return source_.rows[index].choice;
}

int ReplayAgent::rate(const SessionTranscript& history) {
    const int trial = history.rows.back().trial;
    for (const auto& r : source_.ratings)
        if (r.trial == trial) return static_cast<int>(std::lround(r.rating));
    throw ValidationError("replay: source transcript has no rating at trial " +
                          std::to_string(trial));
}

std::optional<double> ReplayAgent::replay_outcome(int trial_index) {
    const auto index = static_cast<std::size_t>(trial_index) - 1;
    if (index >= source_.rows.size()) return std::nullopt;
    return source_.rows[index].outcome;
}

ChatAgent::ChatAgent(const AgentDescriptor& descriptor, PromptScript script, std::string api_key,
                     AuditSink audit, RetryPolicy transport_policy)
    : descriptor_(descriptor),
      script_(std::move(script)),
      client_(descriptor.endpoint, std::move(api_key), transport_policy),
      audit_(std::move(audit)) {
    client_.set_audit_sink([this](const nlohmann::json& entry) { this->audit(entry); });
    conversation_.push_back({"system", render_system(script_)});
}

void ChatAgent::audit(const nlohmann::json& entry) {
    if (audit_) audit_(entry);
}

std::string ChatAgent::ask(const std::string& user_text) {
    conversation_.push_back({"user", user_text});
    ChatRequest request;
    request.model = descriptor_.model_name;
    request.temperature = descriptor_.temperature;
    request.messages = conversation_;
    std::string reply = client_.complete(request);
    conversation_.push_back({"assistant", reply});
    return reply;
}

Choice ChatAgent::choose(const TrialSpec& trial, const SessionTranscript& history) {
    const int trial_index = static_cast<int>(history.rows.size()) + 1;
    const int n_trials = static_cast<int>(history.task->trials.size());

    std::string text = render_trial(script_, trial, trial_index, n_trials);
    if (!pending_feedback_.empty()) {
        text = pending_feedback_ + "\n\n" + text;
        pending_feedback_.clear();
    }

    std::string reply = ask(text);
    for (int attempt = 0;; ++attempt) {
        if (auto letter = parse_choice(reply)) return option_at(*letter, trial.option_order);
        audit({{"event", "parse_failure"}, {"kind", "choice"}, {"reply", reply}});
        if (attempt >= descriptor_.max_retries)
            throw RemoteAgentError("could not parse a choice after " +
                                   std::to_string(descriptor_.max_retries) + " clarifications");
        reply = ask(script_.clarify_choice_text);
    }
}

int ChatAgent::rate(const SessionTranscript&) {
    std::string text = render_probe(script_);
    if (!pending_feedback_.empty()) {
        text = pending_feedback_ + "\n\n" + text;
        pending_feedback_.clear();
    }

    std::string reply = ask(text);
    for (int attempt = 0;; ++attempt) {
        if (auto rating = parse_rating(reply)) return *rating;
        audit({{"event", "parse_failure"}, {"kind", "rating"}, {"reply", reply}});
        if (attempt >= descriptor_.max_retries)
            throw RemoteAgentError("could not parse a rating after " +
                                   std::to_string(descriptor_.max_retries) + " clarifications");
        reply = ask(script_.clarify_rating_text);
    }
}

void ChatAgent::observe(const TrialSpec& trial, const TranscriptRow& row) {
    pending_feedback_ = render_outcome(script_, trial, row);
}

std::string resolve_api_key(const AgentDescriptor& descriptor) {
    if (descriptor.api_key_env.empty()) return "";
    const char* value = std::getenv(descriptor.api_key_env.c_str());
    if (value == nullptr)
        throw ValidationError("credential environment variable not set: " +
                              descriptor.api_key_env);
    return value;
}

const char* to_string(AgentKind k) {
    switch (k) {
        case AgentKind::synthetic: return "synthetic";
        case AgentKind::ev_max: return "ev_max";
        case AgentKind::llm: return "llm";
        case AgentKind::replay: return "replay";
    }
    return "?";
}

AgentKind agent_kind_from_string(const std::string& s) {
    if (s == "synthetic") return AgentKind::synthetic;
    if (s == "ev_max") return AgentKind::ev_max;
    if (s == "llm") return AgentKind::llm;
    if (s == "replay") return AgentKind::replay;
    throw ValidationError("unknown agent kind: " + s);
}

}  // namespace risklab
