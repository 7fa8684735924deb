#pragma once

#include "agentgraph/backend.hpp"
#include "agentgraph/embedding.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/tools.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace agentgraph {

enum class ScenarioCategory { sequential, parallel, async };

std::string to_string(ScenarioCategory c);
std::optional<ScenarioCategory> parse_category(std::string_view s);

struct ScenarioRecord {
    std::string name;
    TaskGraph expected_graph;
    std::vector<ToolDeclaration> tool_manifest;
    std::vector<std::string> expected_tool_calls;
    std::string gold_response;
    ScenarioCategory category = ScenarioCategory::sequential;
    long complexity = 0;

    friend bool operator==(const ScenarioRecord&, const ScenarioRecord&) = default;
};

/// Throws ScenarioError describing the first broken invariant.
void check_scenario(const ScenarioRecord& record);

using SourceEdge = std::pair<std::string, std::string>;

/// Drops nodes labelled exactly "Start" or "End", renumbers the rest
/// task_1..task_k in order and keeps edges whose endpoints both survive.
/// Edge endpoints are 1-based positions into `node_descriptions`.
TaskGraph create_seq_task_graph(const std::vector<SourceEdge>& edges, const std::vector<std::string>& node_descriptions);

/// One node per tool, ids "1".."n", no edges.
TaskGraph create_parallel_graph(const std::vector<std::string>& tools);

/// Nodes "1".."n" labelled as given, edges copied verbatim. Throws CycleError
/// (or DanglingEdgeError) for unusable edge lists.
TaskGraph create_async_graph(const std::vector<SourceEdge>& edges, const std::vector<std::string>& node_descriptions);

/// File name -> exact bytes of a scenario directory.
std::map<std::string, std::string> serialize_scenario(const ScenarioRecord& record);
void write_scenario(const ScenarioRecord& record, const std::filesystem::path& root);
/// Throws ScenarioError naming the offending file.
ScenarioRecord load_scenario(const std::filesystem::path& dir);

struct ScenarioDiagnostic {
    std::string path;
    std::string message;
};

struct ScenarioLoad {
    std::vector<ScenarioRecord> records; // sorted by name
    std::vector<ScenarioDiagnostic> diagnostics;
};

/// Loads every scenario directory below `root`, in parallel. Broken
/// scenarios become diagnostics; loading carries on.
ScenarioLoad load_scenarios(const std::filesystem::path& root);
ScenarioLoad load_scenarios_serial(const std::filesystem::path& root);

/// Offline (no backend): one fixed_output tool per description with a
/// payload derived from the description. With a backend, the backend's
/// proposal is used once it passes validation (one retry, then offline).
std::vector<ToolDeclaration> synthesize_tool_manifest(const std::vector<std::string>& tool_descriptions,
                                                      ModelBackend* backend = nullptr);

std::string build_tool_generation_prompt(const std::string& tool_description);

/// One entry of the AsyncHow-style build input.
struct SourceScenario {
    std::string name;
    ScenarioCategory category = ScenarioCategory::sequential;
    std::vector<std::string> node_descriptions;
    std::vector<SourceEdge> edges;
    std::vector<std::string> tools; // parallel scenarios list tools instead of steps
    std::optional<std::string> gold_response;
    std::optional<std::vector<std::string>> expected_tool_calls;
};

/// Input file: a list of {name, category, steps?, edges?, tools?,
/// gold_response?, expected_tool_calls?}. Throws ScenarioError.
std::vector<SourceScenario> parse_source_scenarios(const nlohmann::json& document);

struct ScenarioBuild {
    std::vector<ScenarioRecord> records;
    std::vector<std::string> dropped_duplicates;
    std::vector<ScenarioDiagnostic> diagnostics;
};

/// Runs the graph builders, drops scenarios whose names are semantic
/// duplicates of an earlier one, and synthesises manifests, expected calls
/// and gold responses where the source omits them.
ScenarioBuild build_scenarios(const std::vector<SourceScenario>& sources, const EmbeddingProvider& provider,
                              ModelBackend* backend = nullptr, double duplicate_threshold = default_duplicate_threshold);

/// Scripted backend that reproduces a scenario: the decomposition prompt gets
/// the expected graph, the task at topological position i calls expected
/// tool i, and consolidation answers with the gold response.
ScriptedBackend gold_replay_backend(const ScenarioRecord& record);

} // namespace agentgraph
