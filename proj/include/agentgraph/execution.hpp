#pragma once

#include "agentgraph/backend.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/tools.hpp"

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agentgraph {

using Clock = std::chrono::steady_clock;

enum class TaskStatus { completed, failed, skipped };
enum class ExecutionMode { sequential, parallel };

std::string to_string(TaskStatus s);
std::string to_string(ExecutionMode m);

struct TaskResult {
    std::string task_id;
    TaskStatus status = TaskStatus::skipped;
    std::string output;
    std::string error;
    std::vector<ToolCall> tool_calls;
    // unset for skipped tasks
    std::optional<Clock::time_point> started;
    std::optional<Clock::time_point> ended;
    // intra-task record: what the agent was asked and what it answered
    std::string prompt;
    std::string response;
    // ids whose results were injected into the prompt, in topological order
    std::vector<std::string> buffer_ids;
};

struct BufferEntry {
    std::string task_id;
    std::string label;
    std::string output;
};

struct FeedbackEvent {
    std::string task_id;
    std::string phrase;
    Clock::time_point at;
};

using FeedbackSink = std::function<void(const FeedbackEvent&)>;

/// Produces one short progress phrase per task start. Phrases come from the
/// backend when one is given, otherwise round-robin from the canned list;
/// any backend failure falls back to the canned list.
class FeedbackGenerator {
public:
    explicit FeedbackGenerator(std::vector<std::string> canned = default_phrases(), ModelBackend* backend = nullptr);

    FeedbackEvent next(const std::string& task_id, const std::string& task_label);

    static std::vector<std::string> default_phrases();

private:
    std::vector<std::string> canned_;
    ModelBackend* backend_;
    std::atomic<std::size_t> cursor_{0};
};

std::string build_feedback_prompt(const std::string& task_label);

struct ExecutionOptions {
    bool include_indirect_dependencies = false;
    bool semantic_tool_filtering = true;
    std::size_t tool_k = 5;
    double tool_min_sim = 0.0;
    // defaults to the number of roots, capped at 16
    std::optional<std::size_t> max_concurrency;
    bool consolidate_with_backend = true;
    bool feedback = false;
    bool feedback_from_backend = false;
    std::vector<std::string> canned_feedback = FeedbackGenerator::default_phrases();
    FeedbackSink feedback_sink;
    // test hook: extra latency before each tool invocation
    std::function<Clock::duration(const std::string& tool_name)> tool_latency;
};

struct TimingProfile {
    Clock::time_point run_start;
    Clock::time_point run_end;
    std::map<std::string, std::pair<Clock::time_point, Clock::time_point>, IdLess> tasks;
};

struct ExecutionTrace {
    std::string query;
    TaskGraph graph;
    std::map<std::string, TaskResult, IdLess> results;
    std::string final_answer;
    bool consolidation_fallback = false;
    ExecutionMode mode = ExecutionMode::sequential;
    Clock::time_point run_start;
    Clock::time_point run_end;
    std::vector<FeedbackEvent> feedback;

    Clock::duration wall_time() const { return run_end - run_start; }
    TimingProfile timing() const;
    /// Tool names in topological task order, call order within a task.
    std::vector<std::string> tool_call_names() const;
};

struct RequestedCall {
    std::string tool;
    ToolArguments arguments;
};

struct ParsedTaskResponse {
    std::string text;
    std::vector<RequestedCall> calls;
};

/// Splits a task response into free text and <tool_calls>[...]</tool_calls>
/// directives. Throws ParseError for an unterminated block, invalid JSON or
/// an entry without a "tool" name.
ParsedTaskResponse parse_task_response(const std::string& response);

std::string build_task_prompt(const std::string& task_label, const std::vector<BufferEntry>& buffer,
                              const std::vector<const ToolDescriptor*>& tools);

std::string build_consolidation_prompt(const std::string& query, const std::vector<BufferEntry>& completed);

/// "label: output" lines in the given order.
std::string fallback_consolidation(const std::vector<BufferEntry>& completed);

/// Backend answer for the completed tasks (which must be non-empty, in
/// topological order). Falls back to the concatenation when `backend` is null,
/// throws, or answers with blank text; `used_fallback` reports which happened.
std::string consolidate(const std::string& query, const std::vector<BufferEntry>& completed, ModelBackend* backend,
                        bool& used_fallback);

ExecutionTrace execute_sequential(const std::string& query, const TaskGraph& graph, const ToolCatalog& catalog,
                                  ModelBackend& backend, const ExecutionOptions& options = {});

/// Dependency-aware parallel run on a pool of max_concurrency workers. A task
/// becomes ready once every direct predecessor completed; a failed task marks
/// all of its descendants skipped.
ExecutionTrace execute_parallel(const std::string& query, const TaskGraph& graph, const ToolCatalog& catalog,
                                ModelBackend& backend, const ExecutionOptions& options = {});

ExecutionTrace execute(ExecutionMode mode, const std::string& query, const TaskGraph& graph,
                       const ToolCatalog& catalog, ModelBackend& backend, const ExecutionOptions& options = {});

/// Trace file: {"content": {...}, "timing": {...}}. Only the timing section
/// depends on the clock. `config` is echoed into the content section.
nlohmann::json trace_to_json(const ExecutionTrace& trace, const nlohmann::json& config = nlohmann::json::object());

/// Inverse of trace_to_json. Timestamps are rebuilt relative to a zero
/// run_start. Throws ParseError.
ExecutionTrace trace_from_json(const nlohmann::json& document);

} // namespace agentgraph
