#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace risklab {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

struct ChatRequest {
    std::string model;
    double temperature = 1.0;
    std::vector<ChatMessage> messages;
};

struct RetryPolicy {
    int max_attempts = 5;
    double initial_delay_s = 0.5;
    double backoff_factor = 2.0;
    double max_delay_s = 8.0;
};

// Chat-completions style JSON-over-HTTP client. Transient failures
// (connection errors, 408/429/5xx) are retried with exponential backoff up to
// the policy budget; anything else, or an exhausted budget, raises
// RemoteAgentError. Every request and response is passed to the audit sink.
class ChatClient {
public:
    ChatClient(std::string base_url, std::string api_key, RetryPolicy policy = {});

    // Returns the assistant message content.
    std::string complete(const ChatRequest& request);

    void set_audit_sink(std::function<void(const nlohmann::json&)> sink) {
        audit_sink_ = std::move(sink);
    }

    int request_count() const { return request_count_; }

private:
    void audit(const nlohmann::json& entry);

    std::string scheme_host_port_;
    std::string path_prefix_;
    std::string api_key_;
    RetryPolicy policy_;
    std::function<void(const nlohmann::json&)> audit_sink_;
    int request_count_ = 0;
};

}  // namespace risklab
