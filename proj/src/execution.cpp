#include "agentgraph/execution.hpp"
#include "agentgraph/errors.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace agentgraph {

std::string to_string(TaskStatus s) {
    switch (s) {
    case TaskStatus::completed: return "completed";
    case TaskStatus::failed: return "failed";
    case TaskStatus::skipped: break;
    }
    return "skipped";
}

std::string to_string(ExecutionMode m) { return m == ExecutionMode::parallel ? "parallel" : "sequential"; }

FeedbackGenerator::FeedbackGenerator(std::vector<std::string> canned, ModelBackend* backend)
    : canned_(std::move(canned)), backend_(backend) {
    if (canned_.empty()) canned_ = default_phrases();
}

std::vector<std::string> FeedbackGenerator::default_phrases() {
    return {"Working on it...", "Making progress, hang tight.", "Almost there..."};
}

std::string build_feedback_prompt(const std::string& task_label) {
    return "A task has just started. Write one short, friendly status line\n"
           "telling the user it is underway.\n\n"
           "Task: " + task_label + "\n\nStatus line:\n";
}

FeedbackEvent FeedbackGenerator::next(const std::string& task_id, const std::string& task_label) {
    if (backend_) {
        try {
            auto phrase = std::string(trim(backend_->complete(build_feedback_prompt(task_label))));
            if (!phrase.empty()) return {task_id, std::move(phrase), Clock::now()};
        } catch (const std::exception&) {
            // feedback never affects execution
        }
    }
    const auto i = cursor_.fetch_add(1, std::memory_order_relaxed);
    return {task_id, canned_[i % canned_.size()], Clock::now()};
}

TimingProfile ExecutionTrace::timing() const {
    TimingProfile p{run_start, run_end, {}};
    for (const auto& [id, r] : results)
        if (r.started && r.ended) p.tasks.emplace(id, std::make_pair(*r.started, *r.ended));
    return p;
}

std::vector<std::string> ExecutionTrace::tool_call_names() const {
    std::vector<std::string> names;
    for (const auto& id : topological_order(graph)) {
        auto it = results.find(id);
        if (it == results.end()) continue;
        for (const auto& c : it->second.tool_calls) names.push_back(c.tool_name);
    }
    return names;
}

ParsedTaskResponse parse_task_response(const std::string& response) {
    static const std::string open = "<tool_calls>";
    static const std::string close = "</tool_calls>";
    ParsedTaskResponse parsed;
    std::string text;
    std::size_t pos = 0;
    for (;;) {
        auto start = response.find(open, pos);
        if (start == std::string::npos) {
            text += response.substr(pos);
            break;
        }
        text += response.substr(pos, start - pos);
        auto end = response.find(close, start + open.size());
        if (end == std::string::npos) throw ParseError("unterminated <tool_calls> block");
        auto body = response.substr(start + open.size(), end - start - open.size());
        nlohmann::json calls;
        try {
            calls = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("tool call block is not valid JSON: ") + e.what());
        }
        if (calls.is_object()) calls = nlohmann::json::array({calls});
        if (!calls.is_array()) throw ParseError("tool call block must hold a list of calls");
        for (const auto& c : calls) {
            if (!c.is_object() || !c.contains("tool") || !c.at("tool").is_string())
                throw ParseError("every tool call needs a string \"tool\": " + c.dump());
            RequestedCall call{c.at("tool").get<std::string>(), {}};
            if (c.contains("arguments")) {
                const auto& args = c.at("arguments");
                if (!args.is_object()) throw ParseError("tool call arguments must be an object");
                for (const auto& [k, v] : args.items()) call.arguments.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
            }
            parsed.calls.push_back(std::move(call));
        }
        pos = end + close.size();
        text += "\n";
    }
    parsed.text = std::string(trim(text));
    return parsed;
}

std::string build_task_prompt(const std::string& task_label, const std::vector<BufferEntry>& buffer,
                              const std::vector<const ToolDescriptor*>& tools) {
    std::string p = "You are an agent executing one task of a larger plan.\n\nTask: " + task_label + "\n\n";
    p += "Results of the tasks this one depends on:\n";
    if (buffer.empty()) p += "(none)\n";
    for (const auto& e : buffer) p += "- [" + e.task_id + "] " + e.label + ": " + e.output + "\n";
    p += "\nTools you may call:\n";
    if (tools.empty()) p += "(none)\n";
    for (const auto* t : tools) p += "- " + tool_signature(t->decl) + ": " + t->description() + "\n";
    p += "\nTo call tools, reply with a block of the form\n"
         "<tool_calls>\n[{\"tool\": \"<name>\", \"arguments\": {\"<param>\": \"<value>\"}}]\n</tool_calls>\n"
         "Text outside the block is kept as the task result.\n";
    return p;
}

std::string build_consolidation_prompt(const std::string& query, const std::vector<BufferEntry>& completed) {
    std::string results;
    for (const auto& e : completed) results += "\n- " + e.label + ": " + e.output;
    return "Several tasks were run to answer the user request below.\n"
           "Combine their results into one reply that covers every part of the request.\n\n"
           "User Query: " + query + "\n\nCompleted task results:" + results +
           "\n\nKeep the reply under 50 words.\n";
}

std::string fallback_consolidation(const std::vector<BufferEntry>& completed) {
    std::string out;
    for (const auto& e : completed) {
        if (!out.empty()) out += "\n";
        out += e.label + ": " + e.output;
    }
    return out;
}

std::string consolidate(const std::string& query, const std::vector<BufferEntry>& completed, ModelBackend* backend,
                        bool& used_fallback) {
    if (completed.empty()) throw std::invalid_argument("consolidate needs at least one completed task");
    used_fallback = false;
    if (backend) {
        try {
            auto answer = std::string(trim(backend->complete(build_consolidation_prompt(query, completed))));
            if (!answer.empty()) return answer;
        } catch (const BackendError&) {
        }
    }
    used_fallback = true;
    return fallback_consolidation(completed);
}

namespace {

// Shared machinery of both execution modes. Results live in a vector indexed
// by node; each slot is written only by the task that owns it.
class Run {
public:
    Run(const std::string& query, const TaskGraph& graph, const ToolCatalog& catalog, ModelBackend& backend,
        const ExecutionOptions& options, ExecutionMode mode)
        : query_(query), graph_(graph), catalog_(catalog), backend_(backend), options_(options), mode_(mode),
          feedback_(options.canned_feedback, options.feedback_from_backend ? &backend : nullptr),
          order_(topological_order(graph)), results_(graph.node_count()) {
        position_.resize(graph.node_count());
        for (std::size_t i = 0; i < order_.size(); ++i) position_[*graph.index_of(order_[i])] = i;
        auto view = dependency_view(graph);
        buffer_sources_.resize(graph.node_count());
        for (std::size_t i = 0; i < graph.node_count(); ++i) {
            const auto& id = graph.nodes()[i].id;
            const auto& src = options.include_indirect_dependencies ? view.ancestors.at(id) : view.direct_predecessors.at(id);
            for (const auto& s : src) buffer_sources_[i].push_back(*graph.index_of(s));
            std::sort(buffer_sources_[i].begin(), buffer_sources_[i].end(),
                      [&](std::size_t a, std::size_t b) { return position_[a] < position_[b]; });
        }
        for (std::size_t i = 0; i < graph.node_count(); ++i) results_[i].task_id = graph.nodes()[i].id;
    }

    std::size_t node_count() const { return graph_.node_count(); }
    const TaskGraph& graph() const { return graph_; }
    const std::vector<std::string>& order() const { return order_; }
    TaskResult& result(std::size_t i) { return results_[i]; }

    void run_task(std::size_t index) {
        auto& r = results_[index];
        const auto& node = graph_.nodes()[index];
        r.started = Clock::now();
        if (options_.feedback) {
            auto ev = feedback_.next(node.id, node.label);
            {
                std::lock_guard lock(feedback_mu_);
                feedback_events_.push_back(ev);
            }
            if (options_.feedback_sink) {
                try {
                    options_.feedback_sink(ev);
                } catch (...) {
                }
            }
        }

        std::vector<BufferEntry> buffer;
        for (auto src : buffer_sources_[index]) {
            const auto& n = graph_.nodes()[src];
            buffer.push_back({n.id, n.label, results_[src].output});
            r.buffer_ids.push_back(n.id);
        }

        std::vector<const ToolDescriptor*> tools;
        if (options_.semantic_tool_filtering) {
            for (const auto& s : catalog_.filter_by_task(node.label, options_.tool_k, options_.tool_min_sim))
                tools.push_back(s.tool);
        } else {
            for (const auto& t : catalog_.tools()) tools.push_back(&t);
        }

        r.prompt = build_task_prompt(node.label, buffer, tools);
        try {
            r.response = backend_.complete(r.prompt);
            auto parsed = parse_task_response(r.response);
            std::string output = parsed.text;
            for (const auto& call : parsed.calls) {
                if (options_.tool_latency) std::this_thread::sleep_for(options_.tool_latency(call.tool));
                auto tc = catalog_.invoke(call.tool, call.arguments);
                if (!output.empty()) output += "\n";
                output += tc.output;
                r.tool_calls.push_back(std::move(tc));
            }
            r.output = std::move(output);
            r.status = TaskStatus::completed;
        } catch (const std::exception& e) {
            r.status = TaskStatus::failed;
            r.error = e.what();
        }
        r.ended = Clock::now();
    }

    ExecutionTrace finish(Clock::time_point run_start) {
        ExecutionTrace trace;
        trace.query = query_;
        trace.graph = graph_;
        trace.mode = mode_;
        trace.run_start = run_start;
        std::vector<BufferEntry> completed;
        for (const auto& id : order_) {
            auto i = *graph_.index_of(id);
            if (results_[i].status == TaskStatus::completed)
                completed.push_back({id, graph_.nodes()[i].label, results_[i].output});
        }
        if (!completed.empty()) {
            trace.final_answer = consolidate(query_, completed, options_.consolidate_with_backend ? &backend_ : nullptr,
                                             trace.consolidation_fallback);
            if (!options_.consolidate_with_backend) trace.consolidation_fallback = false;
        }
        for (auto& r : results_) {
            auto id = r.task_id;
            trace.results.emplace(std::move(id), std::move(r));
        }
        trace.feedback = std::move(feedback_events_);
        trace.run_end = Clock::now();
        return trace;
    }

private:
    const std::string& query_;
    const TaskGraph& graph_;
    const ToolCatalog& catalog_;
    ModelBackend& backend_;
    const ExecutionOptions& options_;
    ExecutionMode mode_;
    FeedbackGenerator feedback_;
    std::vector<std::string> order_;
    std::vector<std::size_t> position_;
    std::vector<std::vector<std::size_t>> buffer_sources_;
    std::vector<TaskResult> results_;
    std::mutex feedback_mu_;
    std::vector<FeedbackEvent> feedback_events_;
};

std::size_t effective_concurrency(const TaskGraph& graph, const ExecutionOptions& options) {
    if (options.max_concurrency) {
        if (*options.max_concurrency < 1) throw std::invalid_argument("max_concurrency must be >= 1");
        return *options.max_concurrency;
    }
    return std::clamp<std::size_t>(graph.roots().size(), 1, 16);
}

} // namespace

ExecutionTrace execute_sequential(const std::string& query, const TaskGraph& graph, const ToolCatalog& catalog,
                                  ModelBackend& backend, const ExecutionOptions& options) {
    Run run(query, graph, catalog, backend, options, ExecutionMode::sequential);
    const auto start = Clock::now();
    for (const auto& id : run.order()) {
        auto i = *graph.index_of(id);
        bool ready = true;
        for (auto p : graph.predecessors(i)) ready = ready && run.result(p).status == TaskStatus::completed;
        if (ready) run.run_task(i);
    }
    return run.finish(start);
}

ExecutionTrace execute_parallel(const std::string& query, const TaskGraph& graph, const ToolCatalog& catalog,
                                ModelBackend& backend, const ExecutionOptions& options) {
    const auto workers = std::min(effective_concurrency(graph, options), std::max<std::size_t>(graph.node_count(), 1));
    Run run(query, graph, catalog, backend, options, ExecutionMode::parallel);
    const auto n = graph.node_count();

    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::size_t> waiting(n);
    std::vector<bool> resolved(n, false);
    std::size_t resolved_count = 0;
    // ready queue kept sorted by topological position, smallest last
    std::vector<std::size_t> ready;
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < run.order().size(); ++i) position[*graph.index_of(run.order()[i])] = i;
    const auto push_ready = [&](std::size_t i) {
        ready.push_back(i);
        std::sort(ready.begin(), ready.end(), [&](std::size_t a, std::size_t b) { return position[a] > position[b]; });
    };
    for (std::size_t i = 0; i < n; ++i) {
        waiting[i] = graph.predecessors(i).size();
        if (waiting[i] == 0) push_ready(i);
    }

    const auto skip_descendants = [&](std::size_t failed) {
        std::vector<std::size_t> stack{failed};
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            for (auto s : graph.successors(cur)) {
                if (resolved[s]) continue;
                resolved[s] = true;
                ++resolved_count;
                stack.push_back(s);
            }
        }
    };

    const auto worker = [&] {
        std::unique_lock lock(mu);
        for (;;) {
            cv.wait(lock, [&] { return !ready.empty() || resolved_count == n; });
            if (resolved_count == n) return;
            auto task = ready.back();
            ready.pop_back();
            lock.unlock();
            run.run_task(task);
            lock.lock();
            resolved[task] = true;
            ++resolved_count;
            if (run.result(task).status == TaskStatus::completed) {
                for (auto s : graph.successors(task))
                    if (--waiting[s] == 0 && !resolved[s]) push_ready(s);
            } else {
                skip_descendants(task);
            }
            cv.notify_all();
        }
    };

    const auto start = Clock::now();
    if (n > 0) {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return run.finish(start);
}

ExecutionTrace execute(ExecutionMode mode, const std::string& query, const TaskGraph& graph,
                       const ToolCatalog& catalog, ModelBackend& backend, const ExecutionOptions& options) {
    return mode == ExecutionMode::parallel ? execute_parallel(query, graph, catalog, backend, options)
                                           : execute_sequential(query, graph, catalog, backend, options);
}

} // namespace agentgraph
