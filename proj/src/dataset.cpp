#include "agentgraph/dataset.hpp"
#include "agentgraph/errors.hpp"
#include "agentgraph/orchestration.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace agentgraph {

namespace fs = std::filesystem;

namespace {

constexpr const char* metadata_file = "metadata.json";
constexpr const char* graph_file = "graph.json";
constexpr const char* tools_file = "tools.json";
constexpr const char* calls_file = "expected_calls.json";
constexpr const char* gold_file = "gold_response.txt";

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path.string() + ": cannot read file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(path.string() + ": not valid JSON: " + e.what());
    }
}

std::string hex8(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
    return buf;
}

std::string edge_endpoint(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ScenarioError("edge endpoints must be strings or integers: " + v.dump());
}

std::vector<std::string> distinct_tool_names(const std::vector<std::string>& descriptions) {
    std::vector<std::string> names;
    std::set<std::string> used;
    for (const auto& d : descriptions) {
        auto base = slugify(d);
        if (base.empty()) base = "tool";
        if (base.size() > 48) base.resize(48);
        auto name = base;
        for (int k = 2; !used.insert(name).second; ++k) name = base + "_" + std::to_string(k);
        names.push_back(std::move(name));
    }
    return names;
}

ToolDeclaration offline_tool(const std::string& name, const std::string& description) {
    return {name, description, {},
            FixedOutput{"Result of '" + description + "': completed (ref " + hex8(fnv1a64(description)) + ")"}};
}

std::optional<ToolDeclaration> backend_tool(ModelBackend& backend, const std::string& name,
                                            const std::string& description) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            auto doc = extract_json_object(backend.complete(build_tool_generation_prompt(description)));
            if (!doc) throw BadBehaviorSpecError("no JSON object in the proposal");
            auto proposal = nlohmann::json::parse(*doc);
            if (!proposal.is_object()) throw BadBehaviorSpecError("proposal must be an object");
            proposal["name"] = name;
            proposal["description"] = description;
            return parse_tool_declaration(proposal);
        } catch (const Error&) {
        } catch (const nlohmann::json::exception&) {
        }
    }
    return std::nullopt;
}

} // namespace

std::string to_string(ScenarioCategory c) {
    switch (c) {
    case ScenarioCategory::parallel: return "parallel";
    case ScenarioCategory::async: return "async";
    case ScenarioCategory::sequential: break;
    }
    return "sequential";
}

std::optional<ScenarioCategory> parse_category(std::string_view s) {
    if (s == "sequential") return ScenarioCategory::sequential;
    if (s == "parallel") return ScenarioCategory::parallel;
    if (s == "async") return ScenarioCategory::async;
    return std::nullopt;
}

void check_scenario(const ScenarioRecord& record) {
    if (record.name.empty()) throw ScenarioError("scenario name is empty");
    const auto actual = complexity_score(record.expected_graph);
    if (record.complexity != actual)
        throw ScenarioError("scenario '" + record.name + "': complexity field is " + std::to_string(record.complexity) +
                            " but the graph has |V|+|E| = " + std::to_string(actual));
    std::set<std::string> tools;
    for (const auto& t : record.tool_manifest) {
        check_declaration(t);
        if (!tools.insert(t.name).second)
            throw ScenarioError("scenario '" + record.name + "': duplicate tool '" + t.name + "'");
    }
    for (const auto& call : record.expected_tool_calls)
        if (!tools.count(call))
            throw ScenarioError("scenario '" + record.name + "': expected call '" + call + "' is not in the manifest");
    if (record.category == ScenarioCategory::parallel && record.expected_graph.edge_count() != 0)
        throw ScenarioError("scenario '" + record.name + "': parallel scenarios must not have edges");
}

TaskGraph create_seq_task_graph(const std::vector<SourceEdge>& edges, const std::vector<std::string>& node_descriptions) {
    std::map<std::string, std::string> task_map;
    std::vector<TaskNode> nodes;
    int next = 1;
    for (std::size_t i = 0; i < node_descriptions.size(); ++i) {
        const auto& d = node_descriptions[i];
        if (d == "Start" || d == "End") continue;
        auto id = "task_" + std::to_string(next++);
        task_map.emplace(std::to_string(i + 1), id);
        nodes.push_back({id, d});
    }
    std::vector<TaskEdge> kept;
    for (const auto& [from, to] : edges) {
        auto f = task_map.find(from);
        auto t = task_map.find(to);
        if (f != task_map.end() && t != task_map.end()) kept.push_back({f->second, t->second});
    }
    return TaskGraph::build(std::move(nodes), std::move(kept));
}

TaskGraph create_parallel_graph(const std::vector<std::string>& tools) {
    if (tools.empty()) throw std::invalid_argument("create_parallel_graph needs at least one tool");
    std::vector<TaskNode> nodes;
    for (std::size_t i = 0; i < tools.size(); ++i) nodes.push_back({std::to_string(i + 1), tools[i]});
    return TaskGraph::build(std::move(nodes), {});
}

TaskGraph create_async_graph(const std::vector<SourceEdge>& edges, const std::vector<std::string>& node_descriptions) {
    std::vector<TaskNode> nodes;
    for (std::size_t i = 0; i < node_descriptions.size(); ++i) nodes.push_back({std::to_string(i + 1), node_descriptions[i]});
    std::vector<TaskEdge> out;
    for (const auto& [from, to] : edges) out.push_back({from, to});
    return TaskGraph::build(std::move(nodes), std::move(out));
}

std::map<std::string, std::string> serialize_scenario(const ScenarioRecord& record) {
    nlohmann::ordered_json metadata;
    metadata["name"] = record.name;
    metadata["category"] = to_string(record.category);
    metadata["complexity"] = record.complexity;
    return {
        {metadata_file, metadata.dump(2) + "\n"},
        {graph_file, dump(to_json(record.expected_graph))},
        {tools_file, dump(manifest_to_json(record.tool_manifest))},
        {calls_file, dump(record.expected_tool_calls)},
        {gold_file, record.gold_response + "\n"},
    };
}

void write_scenario(const ScenarioRecord& record, const fs::path& root) {
    const auto dir = root / record.name;
    fs::create_directories(dir);
    for (const auto& [file, bytes] : serialize_scenario(record)) {
        std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
        if (!out) throw ScenarioError((dir / file).string() + ": cannot write file");
        out << bytes;
    }
}

ScenarioRecord load_scenario(const fs::path& dir) {
    ScenarioRecord r;
    const auto meta_path = dir / metadata_file;
    auto meta = read_json(meta_path);
    try {
        if (!meta.is_object()) throw ScenarioError("metadata must be an object");
        for (const auto& [key, value] : meta.items()) {
            if (key == "name") r.name = value.get<std::string>();
            else if (key == "category") {
                auto c = parse_category(value.get<std::string>());
                if (!c) throw ScenarioError("unknown category " + value.dump());
                r.category = *c;
            } else if (key == "complexity") r.complexity = value.get<long>();
            else throw ScenarioError("unknown metadata field '" + key + "'");
        }
        if (!meta.contains("name") || !meta.contains("category") || !meta.contains("complexity"))
            throw ScenarioError("metadata needs name, category and complexity");
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(meta_path.string() + ": " + e.what());
    } catch (const ScenarioError& e) {
        throw ScenarioError(meta_path.string() + ": " + e.what());
    }

    try {
        r.expected_graph = validate(read_json(dir / graph_file));
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& e) {
        throw ScenarioError((dir / graph_file).string() + ": " + e.what());
    }
    try {
        r.tool_manifest = parse_manifest(read_json(dir / tools_file));
    } catch (const ScenarioError&) {
        throw;
    } catch (const Error& e) {
        throw ScenarioError((dir / tools_file).string() + ": " + e.what());
    }
    try {
        r.expected_tool_calls = read_json(dir / calls_file).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError((dir / calls_file).string() + ": expected a list of tool names: " + e.what());
    }
    r.gold_response = read_text(dir / gold_file);
    if (!r.gold_response.empty() && r.gold_response.back() == '\n') r.gold_response.pop_back();

    try {
        check_scenario(r);
    } catch (const ScenarioError& e) {
        throw ScenarioError(meta_path.string() + ": " + e.what());
    }
    return r;
}

namespace {

ScenarioLoad load_tree(const fs::path& root, bool parallel) {
    ScenarioLoad out;
    if (!fs::is_directory(root)) {
        out.diagnostics.push_back({root.string(), "not a directory"});
        return out;
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    std::vector<std::optional<ScenarioRecord>> loaded(dirs.size());
    std::vector<std::string> errors(dirs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(dirs.size()); ++i) {
        try {
            loaded[i] = load_scenario(dirs[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (loaded[i]) out.records.push_back(std::move(*loaded[i]));
        else out.diagnostics.push_back({dirs[i].string(), errors[i]});
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const ScenarioRecord& a, const ScenarioRecord& b) { return a.name < b.name; });
    return out;
}

} // namespace

ScenarioLoad load_scenarios(const fs::path& root) { return load_tree(root, true); }
ScenarioLoad load_scenarios_serial(const fs::path& root) { return load_tree(root, false); }

std::string build_tool_generation_prompt(const std::string& tool_description) {
    return "Design a deterministic stand-in for a real-world tool so an agent can be evaluated against it.\n"
           "The stand-in must return realistic synthetic data for the tool described below.\n\n"
           "Tool Description: " + tool_description + "\n\n"
           "Respond with one JSON object of the form\n"
           "{\"params\": [{\"name\": \"<param>\", \"type\": \"string\", \"required\": true}],\n"
           " \"behavior\": {\"kind\": \"fixed_output\" | \"template\" | \"table_lookup\", \"payload\": ...}}\n"
           "fixed_output and template payloads are strings (templates may use {param} slots);\n"
           "a table_lookup payload is {\"table\": {\"<key>\": \"<value>\"}, \"default\": \"<value>\"} keyed on the first param.\n";
}

std::vector<ToolDeclaration> synthesize_tool_manifest(const std::vector<std::string>& tool_descriptions,
                                                      ModelBackend* backend) {
    if (tool_descriptions.empty()) throw std::invalid_argument("synthesize_tool_manifest needs descriptions");
    const auto names = distinct_tool_names(tool_descriptions);
    std::vector<ToolDeclaration> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::optional<ToolDeclaration> decl;
        if (backend) decl = backend_tool(*backend, names[i], tool_descriptions[i]);
        out.push_back(decl ? std::move(*decl) : offline_tool(names[i], tool_descriptions[i]));
    }
    return out;
}

std::vector<SourceScenario> parse_source_scenarios(const nlohmann::json& document) {
    if (!document.is_array()) throw ScenarioError("scenario source must be a list");
    std::vector<SourceScenario> out;
    for (const auto& item : document) {
        SourceScenario s;
        try {
            if (!item.is_object()) throw ScenarioError("every source scenario must be an object");
            for (const auto& [key, value] : item.items()) {
                if (key == "name") s.name = value.get<std::string>();
                else if (key == "category") {
                    auto c = parse_category(value.get<std::string>());
                    if (!c) throw ScenarioError("unknown category " + value.dump());
                    s.category = *c;
                } else if (key == "steps") s.node_descriptions = value.get<std::vector<std::string>>();
                else if (key == "tools") s.tools = value.get<std::vector<std::string>>();
                else if (key == "gold_response") s.gold_response = value.get<std::string>();
                else if (key == "expected_tool_calls") s.expected_tool_calls = value.get<std::vector<std::string>>();
                else if (key == "edges") {
                    for (const auto& e : value) {
                        if (e.is_array() && e.size() == 2) s.edges.emplace_back(edge_endpoint(e[0]), edge_endpoint(e[1]));
                        else if (e.is_object()) s.edges.emplace_back(edge_endpoint(e.at("from")), edge_endpoint(e.at("to")));
                        else throw ScenarioError("bad edge " + e.dump());
                    }
                } else throw ScenarioError("unknown source field '" + key + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ScenarioError("malformed source scenario: " + std::string(e.what()));
        }
        if (s.name.empty()) throw ScenarioError("source scenario without a name");
        out.push_back(std::move(s));
    }
    return out;
}

ScenarioBuild build_scenarios(const std::vector<SourceScenario>& sources, const EmbeddingProvider& provider,
                              ModelBackend* backend, double duplicate_threshold) {
    ScenarioBuild out;
    if (sources.empty()) return out;
    std::vector<std::string> names;
    for (const auto& s : sources) names.push_back(s.name);
    auto unique = remove_semantic_duplicates(names, provider, duplicate_threshold);
    std::multiset<std::string> keep(unique.begin(), unique.end());

    for (const auto& s : sources) {
        if (auto it = keep.find(s.name); it != keep.end()) {
            keep.erase(it);
        } else {
            out.dropped_duplicates.push_back(s.name);
            continue;
        }
        try {
            ScenarioRecord r;
            r.name = slugify(s.name);
            r.category = s.category;
            switch (s.category) {
            case ScenarioCategory::sequential: r.expected_graph = create_seq_task_graph(s.edges, s.node_descriptions); break;
            case ScenarioCategory::parallel:
                r.expected_graph = create_parallel_graph(s.tools.empty() ? s.node_descriptions : s.tools);
                break;
            case ScenarioCategory::async: r.expected_graph = create_async_graph(s.edges, s.node_descriptions); break;
            }
            r.complexity = complexity_score(r.expected_graph);
            std::vector<std::string> descriptions;
            for (const auto& id : topological_order(r.expected_graph)) descriptions.push_back(r.expected_graph.node(id).label);
            if (descriptions.empty()) throw ScenarioError("scenario '" + s.name + "' has no tasks");
            r.tool_manifest = synthesize_tool_manifest(descriptions, backend);
            if (s.expected_tool_calls) {
                r.expected_tool_calls = *s.expected_tool_calls;
            } else {
                for (const auto& t : r.tool_manifest) r.expected_tool_calls.push_back(t.name);
            }
            if (s.gold_response) {
                r.gold_response = *s.gold_response;
            } else {
                std::vector<ToolDeclaration> manifest = r.tool_manifest;
                std::map<std::string, const ToolDeclaration*> by_name;
                for (const auto& t : manifest) by_name.emplace(t.name, &t);
                for (const auto& call : r.expected_tool_calls) {
                    auto it = by_name.find(call);
                    if (it == by_name.end()) continue;
                    if (!r.gold_response.empty()) r.gold_response += " ";
                    r.gold_response += render_behavior(*it->second, {});
                }
            }
            check_scenario(r);
            out.records.push_back(std::move(r));
        } catch (const Error& e) {
            out.diagnostics.push_back({s.name, e.what()});
        }
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const ScenarioRecord& a, const ScenarioRecord& b) { return a.name < b.name; });
    return out;
}

ScriptedBackend gold_replay_backend(const ScenarioRecord& record) {
    ScriptedBackend backend;
    backend.add_rule("Write one short, friendly status line", "On it!");
    const auto body = to_json(record.expected_graph).at("task_graph");
    backend.add_rule("Turn the user request below into a plan of tasks", body.dump(2));
    backend.add_rule("Completed task results:", record.gold_response);
    const auto order = topological_order(record.expected_graph);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& label = record.expected_graph.node(order[i]).label;
        std::string response = "Done.";
        if (i < record.expected_tool_calls.size()) {
            nlohmann::json calls = nlohmann::json::array({{{"tool", record.expected_tool_calls[i]}}});
            response = "<tool_calls>\n" + calls.dump() + "\n</tool_calls>";
        }
        backend.add_rule("Task: " + label + "\n", response);
    }
    return backend;
}

} // namespace agentgraph
