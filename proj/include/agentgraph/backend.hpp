#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace agentgraph {

/// Anything that turns a prompt into a completion. `complete` either returns
/// or throws BackendError; it must not block past its configured timeout and
/// must accept concurrent calls.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string backend_id() const = 0;
};

/// Offline backend driven by ordered (matcher, responses) rules.
///
/// The first rule whose matcher hits the prompt answers. A rule with several
/// responses hands them out in order and then keeps repeating the last one.
/// Every prompt/response pair is recorded.
class ScriptedBackend final : public ModelBackend {
public:
    struct Rule {
        std::string pattern;
        bool regex = false;
        std::vector<std::string> responses;
        // a rule that raises BackendError instead of answering
        bool fail = false;
    };

    struct Exchange {
        std::string prompt;
        std::string response;
    };

    ScriptedBackend() = default;
    ScriptedBackend(ScriptedBackend&& other) noexcept;
    ScriptedBackend(std::vector<Rule> rules, std::optional<std::string> fallback, std::string id = "scripted");

    /// Rules file: {"backend_id": "...", "rules": [{"match": "...",
    /// "regex": false, "response": "..." | "responses": [...] | "fail": true}],
    /// "fallback": "..."}. Throws ConfigError.
    static ScriptedBackend from_json_text(const std::string& text);

    void add_rule(Rule rule);
    void add_rule(std::string substring, std::string response);
    void set_fallback(std::optional<std::string> fallback);

    std::string complete(const std::string& prompt) override;
    std::string backend_id() const override { return id_; }

    std::vector<Exchange> transcript() const;
    std::size_t call_count() const;

private:
    struct CompiledRule {
        Rule rule;
        std::regex re;
        std::size_t uses = 0;
    };

    mutable std::mutex mu_;
    std::vector<CompiledRule> rules_;
    std::optional<std::string> fallback_;
    std::string id_ = "scripted";
    std::vector<Exchange> transcript_;
};

struct HttpBackendConfig {
    std::string base_url;          // e.g. http://localhost:8080
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string auth_env;          // env var holding the bearer token
    double temperature = 0.0;
    std::chrono::seconds timeout{60};
};

/// OpenAI-compatible chat completions client.
class HttpBackend final : public ModelBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string complete(const std::string& prompt) override;
    std::string backend_id() const override { return "http:" + config_.model; }

private:
    HttpBackendConfig config_;
};

/// Backend config file: {"kind": "scripted", "rules_file": "..."} (relative
/// paths resolve against the config file) or {"kind": "http", "base_url",
/// "model", "auth_env", "temperature", "timeout_s"}.
std::shared_ptr<ModelBackend> load_backend(const std::string& config_path);

} // namespace agentgraph
