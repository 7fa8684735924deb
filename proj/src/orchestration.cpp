#include "agentgraph/orchestration.hpp"
#include "agentgraph/errors.hpp"

#include <stdexcept>

namespace agentgraph {

namespace {

constexpr std::string_view task_graph_skeleton = R"(Turn the user request below into a plan of tasks.
Each node is one task. An edge from A to B means B needs the result of A.
No task may depend on itself, directly or through other tasks.

User Query: {user_query}

Reply with the plan as JSON in exactly this shape:
{
  "nodes": [
    {"id": 1, "label": "<what the first task does>"},
    {"id": 2, "label": "<what the second task does>"}
  ],
  "edges": [
    {"from": 1, "to": 2}
  ]
}
)";

constexpr std::string_view coarse_clause =
    "Strategy: coarse-grained. Use as few tasks as possible; each task should cover a large, "
    "self-contained unit of work so that scheduling and hand-offs stay minimal.\n";
constexpr std::string_view fine_clause =
    "Strategy: fine-grained. Split the work into many small tasks, each a minimal unit of work, "
    "and only add an edge where a task truly needs another task's result, so that independent "
    "tasks can run in parallel.\n";
constexpr std::string_view critical_path_clause =
    "Strategy: critical path. Identify the longest chain of dependent tasks and keep it as short "
    "as possible; move any work that does not need a predecessor's result off that chain.\n";

} // namespace

std::optional<DecompositionStrategy> parse_strategy(std::string_view name) {
    if (name == "default") return DecompositionStrategy::default_;
    if (name == "coarse") return DecompositionStrategy::coarse;
    if (name == "fine") return DecompositionStrategy::fine;
    if (name == "critical-path" || name == "critical_path") return DecompositionStrategy::critical_path;
    return std::nullopt;
}

std::string to_string(DecompositionStrategy s) {
    switch (s) {
    case DecompositionStrategy::coarse: return "coarse";
    case DecompositionStrategy::fine: return "fine";
    case DecompositionStrategy::critical_path: return "critical-path";
    case DecompositionStrategy::default_: break;
    }
    return "default";
}

std::string build_task_graph_prompt(const std::string& query, DecompositionStrategy strategy) {
    if (query.empty()) throw std::invalid_argument("query must be non-empty");
    std::string prompt(task_graph_skeleton);
    const std::string slot = "{user_query}";
    prompt.replace(prompt.find(slot), slot.size(), query);
    switch (strategy) {
    case DecompositionStrategy::coarse: prompt += "\n"; prompt += coarse_clause; break;
    case DecompositionStrategy::fine: prompt += "\n"; prompt += fine_clause; break;
    case DecompositionStrategy::critical_path: prompt += "\n"; prompt += critical_path_clause; break;
    case DecompositionStrategy::default_: break;
    }
    return prompt;
}

std::optional<std::string> extract_json_object(std::string_view text) {
    for (std::size_t start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}' && --depth == 0) return std::string(text.substr(start, i - start + 1));
        }
    }
    return std::nullopt;
}

TaskGraph produce_task_graph(ModelBackend& backend, const std::string& query, DecompositionStrategy strategy,
                             int max_repairs) {
    if (max_repairs < 0) throw std::invalid_argument("max_repairs must be >= 0");
    const auto base_prompt = build_task_graph_prompt(query, strategy);
    std::string prompt = base_prompt;
    std::string last_failure;
    for (int attempt = 0; attempt <= max_repairs; ++attempt) {
        const auto response = backend.complete(prompt);
        try {
            auto doc = extract_json_object(response);
            if (!doc) throw ParseError("response contains no JSON object");
            return validate(std::string_view(*doc));
        } catch (const Error& e) {
            last_failure = e.what();
        }
        prompt = base_prompt + "\nYour previous response could not be used: " + last_failure +
                 "\nRespond again with a corrected task graph in the JSON format above.\n";
    }
    throw OrchestrationError(last_failure, max_repairs + 1);
}

} // namespace agentgraph
