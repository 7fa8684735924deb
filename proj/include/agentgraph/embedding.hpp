#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agentgraph {

class EmbeddingVector {
public:
    EmbeddingVector() = default;
    /// Throws std::invalid_argument for an empty or non-finite vector.
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double norm() const noexcept;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<double> values_;
};

/// dot(a,b) / (|a||b|), clamped to [-1, 1].
/// Throws DimensionMismatchError or ZeroVectorError.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Offline bag-of-words embedding: tokens are hashed (FNV-1a) into `dim`
/// buckets, counted, then L2-normalised. Texts sharing more tokens score
/// higher. Throws EmptyTextError when the text has no tokens.
EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    // Implementations must tolerate concurrent calls.
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
    virtual std::string model_id() const = 0;
    virtual std::size_t dim() const = 0;

    EmbeddingVector embed_one(const std::string& text) const;
};

class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    static constexpr std::size_t default_dim = 256;

    explicit HashEmbeddingProvider(std::size_t dim = default_dim);

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
    std::string model_id() const override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
};

struct EmbeddingProviderConfig {
    std::string kind = "hash"; // "hash" or "http"
    std::string endpoint;      // base URL of an OpenAI-compatible server
    std::string model = "all-MiniLM-L6-v2";
    std::size_t dim = HashEmbeddingProvider::default_dim;
    std::chrono::seconds timeout{60};
    std::string auth_env; // name of the env var holding a bearer token
};

/// Posts to {endpoint}/v1/embeddings. Each call opens its own connection so
/// concurrent use is safe.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(EmbeddingProviderConfig config);

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
    std::string model_id() const override { return config_.model; }
    std::size_t dim() const override { return config_.dim; }

private:
    EmbeddingProviderConfig config_;
};

EmbeddingProviderConfig parse_embedding_config(const std::string& json_text);
std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config);

} // namespace agentgraph
