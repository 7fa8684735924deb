#pragma once

#include "agentgraph/embedding.hpp"
#include "agentgraph/evaluation.hpp"
#include "agentgraph/execution.hpp"
#include "agentgraph/orchestration.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace agentgraph {

/// Effective settings for every command. Built from defaults, then a config
/// file, then explicit flags, each layer overriding the previous one.
struct RunConfig {
    std::string backend;  // path to a backend config file
    std::string manifest; // tool manifest for `run`
    nlohmann::json embedding = nlohmann::json::object();
    DecompositionStrategy strategy = DecompositionStrategy::default_;
    ExecutionMode mode = ExecutionMode::sequential;
    std::optional<std::size_t> max_concurrency;
    std::size_t max_repairs = 2;
    bool include_indirect_dependencies = false;
    bool semantic_tool_filtering = true;
    bool feedback = false;
    bool profile = false;
    std::size_t tool_k = 5;
    double tool_min_sim = 0.0;
    double theta = 0.75;
    double alpha = 1.0;
    NodeMatching matching = NodeMatching::greedy;
    std::string judge = "lexical"; // or "backend"
    std::string out;

    ExecutionOptions execution_options() const;
    EvaluationConfig evaluation_config() const;
    std::shared_ptr<const EmbeddingProvider> embedding_provider() const;
};

/// Throws ConfigError for unknown keys, wrong types or out-of-range values.
RunConfig config_from_json(const nlohmann::json& document);
nlohmann::json to_json(const RunConfig& config);

/// defaults <- file (when given) <- overrides. Relative backend and manifest
/// paths in the file resolve against the file's directory.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides);

} // namespace agentgraph
