// HTTP adapters for model-backed completion and embedding services. Both speak
// the OpenAI-compatible JSON wire format.
#include "agentgraph/backend.hpp"
#include "agentgraph/embedding.hpp"
#include "agentgraph/errors.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>

namespace agentgraph {

namespace {

httplib::Headers auth_headers(const std::string& env_name) {
    httplib::Headers headers;
    if (env_name.empty()) return headers;
    if (const char* token = std::getenv(env_name.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    return headers;
}

nlohmann::json post_json(const std::string& base_url, const std::string& path, const nlohmann::json& body,
                         const std::string& auth_env, std::chrono::seconds timeout) {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, auth_headers(auth_env), body.dump(), "application/json");
    if (!res) throw BackendError("request to " + base_url + path + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw BackendError("request to " + base_url + path + " returned HTTP " + std::to_string(res->status));
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
        throw BackendError(std::string("response body is not JSON: ") + e.what());
    }
}

} // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::complete(const std::string& prompt) {
    nlohmann::json body = {
        {"model", config_.model},
        {"temperature", config_.temperature},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    auto reply = post_json(config_.base_url, config_.path, body, config_.auth_env, config_.timeout);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected chat completion payload: ") + e.what());
    }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(EmbeddingProviderConfig config) : config_(std::move(config)) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(std::span<const std::string> texts) const {
    nlohmann::json body = {{"model", config_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    auto reply = post_json(config_.endpoint, "/v1/embeddings", body, config_.auth_env, config_.timeout);
    std::vector<EmbeddingVector> out;
    try {
        const auto& data = reply.at("data");
        if (data.size() != texts.size()) throw BackendError("embedding service returned the wrong number of vectors");
        for (const auto& item : data) {
            EmbeddingVector v(item.at("embedding").get<std::vector<double>>());
            if (v.dim() != config_.dim)
                throw DimensionMismatchError("embedding service returned dim " + std::to_string(v.dim()) +
                                             ", configured " + std::to_string(config_.dim));
            out.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected embedding payload: ") + e.what());
    }
    return out;
}

} // namespace agentgraph
