#pragma once

// Deterministic imperfect traces for the committed scenarios: each scenario
// gets a scripted backend that replays its gold plan with a few edits.

#include "agentgraph/dataset.hpp"
#include "agentgraph/execution.hpp"
#include "agentgraph/orchestration.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fixtures {

struct Perturbation {
    std::map<std::string, std::string> relabel;        // node id -> new label
    std::set<std::string> drop;                         // node ids removed
    std::vector<agentgraph::TaskNode> add;              // extra nodes (no tool)
    std::optional<std::vector<agentgraph::TaskEdge>> edges; // replaces the edge list
    std::vector<agentgraph::TaskEdge> extra_edges;
    std::map<std::string, std::string> tool;            // node id -> tool override
    std::optional<std::string> answer;
};

inline std::map<std::string, Perturbation> perturbations() {
    std::map<std::string, Perturbation> p;
    p["bake_banana_bread"] = {};
    p["change_a_flat_bicycle_tire"].drop = {"task_4"};
    p["change_a_flat_bicycle_tire"].answer = "Wheel removed, tire levered off and the tube patched.";
    p["plan_a_weekend_trip_to_lisbon"].relabel = {{"2", "Book a hotel room in Lisbon"},
                                                  {"3", "Check the weather forecast for Lisbon"}};
    p["plan_a_weekend_trip_to_lisbon"].tool = {{"2", "search_flights_to_lisbon"}};
    p["plan_a_weekend_trip_to_lisbon"].answer = "Flights found and the weather looks good, no hotel yet.";
    p["research_a_used_car_purchase"].add = {{"5", "Negotiate the final price with the seller"}};
    p["research_a_used_car_purchase"].extra_edges = {{"2", "5"}, {"4", "5"}};
    p["host_a_dinner_party"].edges = std::vector<agentgraph::TaskEdge>{{"1", "5"}, {"2", "3"}, {"3", "4"}, {"4", "5"}};
    p["host_a_dinner_party"].answer = "Dinner served.";
    p["repaint_the_bedroom_walls"] = {};
    return p;
}

inline agentgraph::ScriptedBackend perturbed_backend(const agentgraph::ScenarioRecord& record, const Perturbation& p) {
    using namespace agentgraph;
    const auto& gold = record.expected_graph;
    std::map<std::string, std::string> tool_of;
    const auto order = topological_order(gold);
    for (std::size_t i = 0; i < order.size() && i < record.expected_tool_calls.size(); ++i)
        tool_of[order[i]] = record.expected_tool_calls[i];
    for (const auto& [id, t] : p.tool) tool_of[id] = t;

    nlohmann::json nodes = nlohmann::json::array(), edges = nlohmann::json::array();
    std::vector<std::pair<std::string, std::string>> tasks; // label, tool
    for (const auto& n : gold.nodes()) {
        if (p.drop.count(n.id)) continue;
        auto label = p.relabel.count(n.id) ? p.relabel.at(n.id) : n.label;
        nodes.push_back({{"id", n.id}, {"label", label}});
        tasks.emplace_back(label, tool_of.count(n.id) ? tool_of.at(n.id) : "");
    }
    for (const auto& n : p.add) {
        nodes.push_back({{"id", n.id}, {"label", n.label}});
        tasks.emplace_back(n.label, "");
    }
    auto edge_list = p.edges ? *p.edges : gold.edges();
    edge_list.insert(edge_list.end(), p.extra_edges.begin(), p.extra_edges.end());
    for (const auto& e : edge_list)
        if (!p.drop.count(e.from) && !p.drop.count(e.to)) edges.push_back({{"from", e.from}, {"to", e.to}});

    ScriptedBackend backend({}, std::nullopt, "scripted-fixture");
    backend.add_rule("Write one short, friendly status line", "On it!");
    backend.add_rule("Turn the user request below into a plan of tasks", nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump());
    backend.add_rule("Completed task results:", p.answer ? *p.answer : record.gold_response);
    for (const auto& [label, tool] : tasks) {
        std::string response = "Done.";
        if (!tool.empty()) response = "<tool_calls>[{\"tool\": \"" + tool + "\"}]</tool_calls>";
        backend.add_rule("Task: " + label + "\n", response);
    }
    return backend;
}

inline std::string fixture_query(const agentgraph::ScenarioRecord& record) {
    return "Help me with this: " + record.name;
}

inline agentgraph::ExecutionTrace make_trace(const agentgraph::ScenarioRecord& record, const Perturbation& p,
                                             agentgraph::ExecutionMode mode) {
    using namespace agentgraph;
    auto backend = perturbed_backend(record, p);
    ToolCatalog catalog(record.tool_manifest, std::make_shared<HashEmbeddingProvider>());
    auto graph = produce_task_graph(backend, fixture_query(record), DecompositionStrategy::default_);
    return execute(mode, fixture_query(record), graph, catalog, backend);
}

inline const nlohmann::json& fixture_trace_config() {
    static const nlohmann::json cfg = {{"generator", "fixture-traces"}, {"mode", "seq"}};
    return cfg;
}

} // namespace fixtures
