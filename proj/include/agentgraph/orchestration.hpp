#pragma once

#include "agentgraph/backend.hpp"
#include "agentgraph/graph.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace agentgraph {

enum class DecompositionStrategy { default_, coarse, fine, critical_path };

/// Accepts "default", "coarse", "fine", "critical-path" (or "critical_path").
std::optional<DecompositionStrategy> parse_strategy(std::string_view name);
std::string to_string(DecompositionStrategy s);

/// Decomposition prompt for `query`, with one extra instruction for every
/// strategy other than default. Throws std::invalid_argument on an empty query.
std::string build_task_graph_prompt(const std::string& query, DecompositionStrategy strategy);

/// Returns the first balanced top-level {...} in `text`, skipping braces that
/// sit inside JSON strings. std::nullopt when there is none.
std::optional<std::string> extract_json_object(std::string_view text);

inline constexpr int default_max_repairs = 2;

/// Asks the backend for a task graph and validates it. A rejected answer is
/// fed back with the validation error, at most `max_repairs` times, so the
/// backend sees at most max_repairs + 1 prompts.
///
/// Throws OrchestrationError once repairs are exhausted; BackendError from
/// the backend propagates unchanged.
TaskGraph produce_task_graph(ModelBackend& backend, const std::string& query, DecompositionStrategy strategy,
                             int max_repairs = default_max_repairs);

} // namespace agentgraph
