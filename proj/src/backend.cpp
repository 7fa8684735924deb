#include "agentgraph/backend.hpp"
#include "agentgraph/errors.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace agentgraph {

namespace {

std::regex compile(const ScriptedBackend::Rule& rule) {
    if (!rule.regex) return {};
    try {
        return std::regex(rule.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
        throw ConfigError("bad scripted rule pattern '" + rule.pattern + "': " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScriptedBackend scripted_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("scripted backend rules must be an object");
    std::vector<ScriptedBackend::Rule> rules;
    std::optional<std::string> fallback;
    std::string id = "scripted";
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "backend_id") {
                id = value.get<std::string>();
            } else if (key == "fallback") {
                fallback = value.get<std::string>();
            } else if (key == "rules") {
                for (const auto& r : value) {
                    ScriptedBackend::Rule rule;
                    for (const auto& [rk, rv] : r.items()) {
                        if (rk == "match") rule.pattern = rv.get<std::string>();
                        else if (rk == "regex") rule.regex = rv.get<bool>();
                        else if (rk == "response") rule.responses.push_back(rv.get<std::string>());
                        else if (rk == "responses") rule.responses = rv.get<std::vector<std::string>>();
                        else if (rk == "fail") rule.fail = rv.get<bool>();
                        else throw ConfigError("unknown scripted rule key '" + rk + "'");
                    }
                    if (rule.pattern.empty()) throw ConfigError("scripted rule needs a non-empty \"match\"");
                    if (rule.responses.empty() && !rule.fail)
                        throw ConfigError("scripted rule '" + rule.pattern + "' has no response");
                    rules.push_back(std::move(rule));
                }
            } else if (key != "kind") {
                throw ConfigError("unknown scripted backend key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scripted backend rules: ") + e.what());
    }
    return ScriptedBackend(std::move(rules), std::move(fallback), std::move(id));
}

} // namespace

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules, std::optional<std::string> fallback, std::string id)
    : fallback_(std::move(fallback)), id_(std::move(id)) {
    for (auto& r : rules) add_rule(std::move(r));
}

ScriptedBackend::ScriptedBackend(ScriptedBackend&& other) noexcept {
    std::lock_guard lock(other.mu_);
    rules_ = std::move(other.rules_);
    fallback_ = std::move(other.fallback_);
    id_ = std::move(other.id_);
    transcript_ = std::move(other.transcript_);
}

ScriptedBackend ScriptedBackend::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scripted backend rules are not valid JSON: ") + e.what());
    }
    return scripted_from_json(j);
}

void ScriptedBackend::add_rule(Rule rule) {
    std::lock_guard lock(mu_);
    auto re = compile(rule);
    rules_.push_back({std::move(rule), std::move(re), 0});
}

void ScriptedBackend::add_rule(std::string substring, std::string response) {
    add_rule(Rule{std::move(substring), false, {std::move(response)}, false});
}

void ScriptedBackend::set_fallback(std::optional<std::string> fallback) {
    std::lock_guard lock(mu_);
    fallback_ = std::move(fallback);
}

std::string ScriptedBackend::complete(const std::string& prompt) {
    std::lock_guard lock(mu_);
    for (auto& r : rules_) {
        const bool hit = r.rule.regex ? std::regex_search(prompt, r.re) : prompt.find(r.rule.pattern) != std::string::npos;
        if (!hit) continue;
        if (r.rule.fail) {
            transcript_.push_back({prompt, "<error>"});
            throw BackendError("scripted failure for rule '" + r.rule.pattern + "'");
        }
        const auto& resp = r.rule.responses[std::min(r.uses, r.rule.responses.size() - 1)];
        ++r.uses;
        transcript_.push_back({prompt, resp});
        return resp;
    }
    if (fallback_) {
        transcript_.push_back({prompt, *fallback_});
        return *fallback_;
    }
    transcript_.push_back({prompt, "<error>"});
    throw BackendError("scripted backend has no rule matching the prompt");
}

std::vector<ScriptedBackend::Exchange> ScriptedBackend::transcript() const {
    std::lock_guard lock(mu_);
    return transcript_;
}

std::size_t ScriptedBackend::call_count() const {
    std::lock_guard lock(mu_);
    return transcript_.size();
}

std::shared_ptr<ModelBackend> load_backend(const std::string& config_path) {
    namespace fs = std::filesystem;
    if (!fs::exists(config_path)) throw ConfigError("backend config not found: " + config_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("backend config " + config_path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("backend config needs a string \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "scripted") {
        if (j.contains("rules_file")) {
            if (j.size() != 2) throw ConfigError("scripted backend config with rules_file takes no other keys");
            fs::path rules = j.at("rules_file").get<std::string>();
            if (rules.is_relative()) rules = fs::path(config_path).parent_path() / rules;
            return std::make_shared<ScriptedBackend>(ScriptedBackend::from_json_text(read_file(rules)));
        }
        return std::make_shared<ScriptedBackend>(scripted_from_json(j));
    }
    if (kind == "http") {
        HttpBackendConfig cfg;
        try {
            for (const auto& [key, value] : j.items()) {
                if (key == "kind") continue;
                if (key == "base_url") cfg.base_url = value.get<std::string>();
                else if (key == "path") cfg.path = value.get<std::string>();
                else if (key == "model") cfg.model = value.get<std::string>();
                else if (key == "auth_env") cfg.auth_env = value.get<std::string>();
                else if (key == "temperature") cfg.temperature = value.get<double>();
                else if (key == "timeout_s") cfg.timeout = std::chrono::seconds(value.get<long>());
                else throw ConfigError("unknown http backend key '" + key + "'");
            }
        } catch (const nlohmann::json::type_error& e) {
            throw ConfigError(std::string("http backend config has a field of the wrong type: ") + e.what());
        }
        if (cfg.base_url.empty() || cfg.model.empty()) throw ConfigError("http backend needs base_url and model");
        if (cfg.timeout.count() <= 0) throw ConfigError("http backend timeout must be positive");
        if (cfg.temperature < 0.0 || cfg.temperature > 2.0) throw ConfigError("temperature must be in [0, 2]");
        return std::make_shared<HttpBackend>(std::move(cfg));
    }
    throw ConfigError("unknown backend kind '" + kind + "'");
}

} // namespace agentgraph
