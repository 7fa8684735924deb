#pragma once

#include "agentgraph/text.hpp"

#include "json.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agentgraph {

struct TaskNode {
    std::string id;
    std::string label;

    friend bool operator==(const TaskNode&, const TaskNode&) = default;
};

struct TaskEdge {
    std::string from;
    std::string to;

    friend bool operator==(const TaskEdge&, const TaskEdge&) = default;
};

/// Validated, immutable dependency DAG.
///
/// Nodes and edges keep the order they were declared in. Adjacency is stored
/// as node indices so algorithms never hash strings in their inner loops.
class TaskGraph {
public:
    TaskGraph() = default;

    /// Checks every invariant and throws the matching error on the first
    /// violation: DuplicateIdError, DanglingEdgeError, DuplicateEdgeError,
    /// ParseError (empty id or label) or CycleError.
    static TaskGraph build(std::vector<TaskNode> nodes, std::vector<TaskEdge> edges);

    const std::vector<TaskNode>& nodes() const noexcept { return nodes_; }
    const std::vector<TaskEdge>& edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    std::optional<std::size_t> index_of(std::string_view id) const;
    bool contains(std::string_view id) const { return index_of(id).has_value(); }
    const TaskNode& node(std::string_view id) const;
    bool has_edge(std::string_view from, std::string_view to) const;

    const std::vector<std::size_t>& successors(std::size_t index) const { return succ_[index]; }
    const std::vector<std::size_t>& predecessors(std::size_t index) const { return pred_[index]; }

    std::vector<std::string> roots() const;

    friend bool operator==(const TaskGraph& a, const TaskGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    std::vector<TaskNode> nodes_;
    std::vector<TaskEdge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    // sorted by id_less of the neighbour id
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::vector<std::size_t>> pred_;
};

using IdSet = std::set<std::string, IdLess>;

struct DependencyView {
    std::map<std::string, IdSet, IdLess> direct_predecessors;
    std::map<std::string, IdSet, IdLess> ancestors;
};

struct CriticalPath {
    std::vector<std::string> path;
    double length = 0.0;
};

/// Accepts {"nodes": [...], "edges": [...]} or the same wrapped as
/// {"task_graph": {...}}. Integer ids are coerced to their decimal string.
TaskGraph validate(const nlohmann::json& document);
TaskGraph validate(std::string_view document_text);
inline TaskGraph validate(const char* document_text) { return validate(std::string_view(document_text)); }
inline TaskGraph validate(const std::string& document_text) { return validate(std::string_view(document_text)); }

/// Canonical wrapped form: {"task_graph": {"nodes": [...], "edges": [...]}}.
nlohmann::json to_json(const TaskGraph& g);

/// Kahn's algorithm; among ready nodes the smallest id (id_less) goes first.
std::vector<std::string> topological_order(const TaskGraph& g);

DependencyView dependency_view(const TaskGraph& g);

/// Maximum-weight directed path. Missing weights count as 1.0; among equal
/// weight paths the lexicographically smallest id sequence wins.
CriticalPath critical_path(const TaskGraph& g, const std::map<std::string, double>* weights = nullptr);

/// |V| + |E|.
inline long complexity_score(const TaskGraph& g) noexcept {
    return static_cast<long>(g.node_count() + g.edge_count());
}

/// Shortest directed path lengths (edge count) from `source`; -1 when unreachable.
std::vector<int> shortest_path_lengths(const TaskGraph& g, std::size_t source);

} // namespace agentgraph
