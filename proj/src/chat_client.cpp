#include "risklab/chat_client.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <httplib.h>

#include "risklab/errors.hpp"

namespace risklab {

namespace {

// Split "http://host:port/v1" into (scheme://host:port, /v1).
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ValidationError("endpoint must start with http:// or https://: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

bool retryable_status(int status) {
    return status == 408 || status == 429 || (status >= 500 && status < 600);
}

}  // namespace

ChatClient::ChatClient(std::string base_url, std::string api_key, RetryPolicy policy)
    : api_key_(std::move(api_key)), policy_(policy) {
    auto [host, prefix] = split_base_url(base_url);
    scheme_host_port_ = std::move(host);
    path_prefix_ = std::move(prefix);
}

void ChatClient::audit(const nlohmann::json& entry) {
    if (audit_sink_) audit_sink_(entry);
}

std::string ChatClient::complete(const ChatRequest& request) {
    nlohmann::json body{{"model", request.model}, {"temperature", request.temperature}};
    auto& messages = body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        messages.push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();
    const std::string path = path_prefix_ + "/chat/completions";

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    double delay_s = policy_.initial_delay_s;
    std::string last_error;

    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
        ++request_count_;
        audit({{"event", "request"},
               {"attempt", attempt},
               {"url", scheme_host_port_ + path},
               {"body", body}});

        auto res = client.Post(path, headers, payload, "application/json");

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            audit({{"event", "transport_error"}, {"attempt", attempt}, {"error", last_error}});
        } else {
            audit({{"event", "response"},
                   {"attempt", attempt},
                   {"status", res->status},
                   {"body", res->body}});
            if (res->status == 200) {
                nlohmann::json reply;
                try {
                    reply = nlohmann::json::parse(res->body);
                    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
                } catch (const nlohmann::json::exception& e) {
                    throw RemoteAgentError(std::string("malformed completion response: ") +
                                           e.what());
                }
            }
            if (!retryable_status(res->status))
                throw RemoteAgentError("endpoint returned status " + std::to_string(res->status) +
                                       ": " + res->body);
            last_error = "status " + std::to_string(res->status);
        }

        if (attempt < policy_.max_attempts) {
            audit({{"event", "retry"}, {"attempt", attempt}, {"delay_s", delay_s}});
            std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
            delay_s = std::min(delay_s * policy_.backoff_factor, policy_.max_delay_s);
        }
    }
    throw RemoteAgentError("request failed after " + std::to_string(policy_.max_attempts) +
                           " attempts; last error: " + last_error);
}

}  // namespace risklab
