#include "agentgraph/embedding.hpp"
#include "agentgraph/errors.hpp"
#include "agentgraph/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agentgraph {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("embedding vector must have a positive dimension");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("embedding vector has a non-finite component");
}

double EmbeddingVector::norm() const noexcept {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatchError("cannot compare embeddings of dimension " + std::to_string(a.dim()) +
                                     " and " + std::to_string(b.dim()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVectorError("cosine similarity of an all-zero vector is undefined");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim) {
    if (dim < 8) throw std::invalid_argument("deterministic embedding needs dim >= 8");
    auto tokens = tokenize(text);
    if (tokens.empty()) throw EmptyTextError("cannot embed text without any tokens: '" + std::string(text) + "'");
    std::vector<double> buckets(dim, 0.0);
    for (const auto& tok : tokens) buckets[fnv1a64(tok) % dim] += 1.0;
    double norm = 0.0;
    for (double v : buckets) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : buckets) v /= norm;
    return EmbeddingVector(std::move(buckets));
}

EmbeddingVector EmbeddingProvider::embed_one(const std::string& text) const {
    auto out = embed(std::span<const std::string>(&text, 1));
    return std::move(out.front());
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim) : dim_(dim) {
    if (dim < 8) throw std::invalid_argument("hash embedding provider needs dim >= 8");
}

std::vector<EmbeddingVector> HashEmbeddingProvider::embed(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(deterministic_embed(t, dim_));
    return out;
}

std::string HashEmbeddingProvider::model_id() const { return "hash-bow-fnv1a/" + std::to_string(dim_); }

EmbeddingProviderConfig parse_embedding_config(const std::string& json_text) {
    EmbeddingProviderConfig cfg;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("embedding config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("embedding config must be an object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "kind") cfg.kind = value.get<std::string>();
            else if (key == "endpoint") cfg.endpoint = value.get<std::string>();
            else if (key == "model") cfg.model = value.get<std::string>();
            else if (key == "dim") cfg.dim = value.get<std::size_t>();
            else if (key == "timeout_s") cfg.timeout = std::chrono::seconds(value.get<long>());
            else if (key == "auth_env") cfg.auth_env = value.get<std::string>();
            else throw ConfigError("unknown embedding config key '" + key + "'");
        }
    } catch (const nlohmann::json::type_error& e) {
        throw ConfigError(std::string("embedding config has a field of the wrong type: ") + e.what());
    }
    if (cfg.kind != "hash" && cfg.kind != "http") throw ConfigError("embedding provider kind must be hash or http");
    if (cfg.kind == "http" && cfg.endpoint.empty()) throw ConfigError("http embedding provider needs an endpoint");
    if (cfg.dim < 8 && cfg.kind == "hash") throw ConfigError("hash embedding dim must be >= 8");
    if (cfg.timeout.count() <= 0) throw ConfigError("embedding timeout must be positive");
    return cfg;
}

std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config) {
    if (config.kind == "http") return std::make_shared<HttpEmbeddingProvider>(config);
    return std::make_shared<HashEmbeddingProvider>(config.dim);
}

} // namespace agentgraph
