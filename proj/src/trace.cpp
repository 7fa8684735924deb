#include "agentgraph/errors.hpp"
#include "agentgraph/execution.hpp"

namespace agentgraph {

namespace {

long long offset_us(Clock::time_point origin, Clock::time_point t) {
    return std::chrono::duration_cast<std::chrono::microseconds>(t - origin).count();
}

Clock::time_point at_offset(long long us) { return Clock::time_point(std::chrono::microseconds(us)); }

std::optional<TaskStatus> parse_status(const std::string& s) {
    if (s == "completed") return TaskStatus::completed;
    if (s == "failed") return TaskStatus::failed;
    if (s == "skipped") return TaskStatus::skipped;
    return std::nullopt;
}

} // namespace

nlohmann::json trace_to_json(const ExecutionTrace& trace, const nlohmann::json& config) {
    auto tasks = nlohmann::json::array();
    auto task_timing = nlohmann::json::array();
    auto call_timing = nlohmann::json::array();
    for (const auto& id : topological_order(trace.graph)) {
        const auto& r = trace.results.at(id);
        auto calls = nlohmann::json::array();
        for (const auto& c : r.tool_calls) {
            calls.push_back({{"tool", c.tool_name}, {"arguments", c.arguments}, {"output", c.output}});
            call_timing.push_back({{"task", id}, {"tool", c.tool_name}, {"at_us", offset_us(trace.run_start, c.at)}});
        }
        tasks.push_back({{"id", id},
                         {"label", trace.graph.node(id).label},
                         {"status", to_string(r.status)},
                         {"output", r.output},
                         {"error", r.error},
                         {"buffer", r.buffer_ids},
                         {"prompt", r.prompt},
                         {"response", r.response},
                         {"tool_calls", std::move(calls)}});
        if (r.started && r.ended)
            task_timing.push_back({{"id", id},
                                   {"start_us", offset_us(trace.run_start, *r.started)},
                                   {"end_us", offset_us(trace.run_start, *r.ended)}});
    }
    auto feedback = nlohmann::json::array();
    for (const auto& f : trace.feedback)
        feedback.push_back({{"task", f.task_id}, {"phrase", f.phrase}, {"at_us", offset_us(trace.run_start, f.at)}});

    return {
        {"content",
         {{"query", trace.query},
          {"mode", to_string(trace.mode)},
          {"graph", to_json(trace.graph)},
          {"tasks", std::move(tasks)},
          {"final_answer", trace.final_answer},
          {"consolidation_fallback", trace.consolidation_fallback},
          {"config", config}}},
        {"timing",
         {{"wall_time_us", offset_us(trace.run_start, trace.run_end)},
          {"tasks", std::move(task_timing)},
          {"tool_calls", std::move(call_timing)},
          {"feedback", std::move(feedback)}}},
    };
}

ExecutionTrace trace_from_json(const nlohmann::json& document) {
    ExecutionTrace trace;
    try {
        const auto& content = document.at("content");
        trace.query = content.at("query").get<std::string>();
        trace.mode = content.at("mode").get<std::string>() == "parallel" ? ExecutionMode::parallel
                                                                        : ExecutionMode::sequential;
        trace.graph = validate(content.at("graph"));
        trace.final_answer = content.at("final_answer").get<std::string>();
        trace.consolidation_fallback = content.value("consolidation_fallback", false);

        std::map<std::string, std::pair<long long, long long>> spans;
        std::map<std::string, std::vector<long long>> call_at;
        if (document.contains("timing")) {
            const auto& timing = document.at("timing");
            trace.run_end = at_offset(timing.value("wall_time_us", 0LL));
            for (const auto& t : timing.value("tasks", nlohmann::json::array()))
                spans[t.at("id").get<std::string>()] = {t.at("start_us").get<long long>(), t.at("end_us").get<long long>()};
            for (const auto& c : timing.value("tool_calls", nlohmann::json::array()))
                call_at[c.at("task").get<std::string>()].push_back(c.at("at_us").get<long long>());
            for (const auto& f : timing.value("feedback", nlohmann::json::array()))
                trace.feedback.push_back({f.at("task").get<std::string>(), f.at("phrase").get<std::string>(),
                                          at_offset(f.at("at_us").get<long long>())});
        }

        for (const auto& t : content.at("tasks")) {
            TaskResult r;
            r.task_id = t.at("id").get<std::string>();
            if (!trace.graph.contains(r.task_id)) throw ParseError("trace task '" + r.task_id + "' is not in its graph");
            auto status = parse_status(t.at("status").get<std::string>());
            if (!status) throw ParseError("unknown task status in trace: " + t.at("status").dump());
            r.status = *status;
            r.output = t.value("output", "");
            r.error = t.value("error", "");
            r.prompt = t.value("prompt", "");
            r.response = t.value("response", "");
            r.buffer_ids = t.value("buffer", std::vector<std::string>{});
            const auto& times = call_at[r.task_id];
            std::size_t k = 0;
            for (const auto& c : t.value("tool_calls", nlohmann::json::array())) {
                ToolCall call;
                call.tool_name = c.at("tool").get<std::string>();
                call.arguments = c.value("arguments", ToolArguments{});
                call.output = c.value("output", "");
                call.at = k < times.size() ? at_offset(times[k]) : Clock::time_point{};
                ++k;
                r.tool_calls.push_back(std::move(call));
            }
            if (auto it = spans.find(r.task_id); it != spans.end()) {
                r.started = at_offset(it->second.first);
                r.ended = at_offset(it->second.second);
            }
            auto id = r.task_id;
            if (!trace.results.emplace(std::move(id), std::move(r)).second)
                throw ParseError("trace lists a task twice");
        }
        for (const auto& n : trace.graph.nodes())
            if (!trace.results.count(n.id)) throw ParseError("trace has no result for task '" + n.id + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed trace document: ") + e.what());
    }
    return trace;
}

} // namespace agentgraph
