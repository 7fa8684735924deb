#include "agentgraph/graph.hpp"
#include "agentgraph/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <set>

namespace agentgraph {

namespace {

// Returns the ids of one cycle among the nodes Kahn's algorithm could not
// drain. Walks predecessor links, which always exist for such nodes.
std::vector<std::string> find_cycle(const std::vector<TaskNode>& nodes,
                                    const std::vector<std::vector<std::size_t>>& pred,
                                    const std::vector<bool>& drained) {
    std::size_t start = 0;
    while (start < nodes.size() && drained[start]) ++start;
    std::vector<int> seen_at(nodes.size(), -1);
    std::vector<std::size_t> walk;
    std::size_t cur = start;
    while (seen_at[cur] < 0) {
        seen_at[cur] = static_cast<int>(walk.size());
        walk.push_back(cur);
        for (auto p : pred[cur]) {
            if (!drained[p]) {
                cur = p;
                break;
            }
        }
    }
    // walk follows edges backwards; reverse to report them forwards
    std::vector<std::string> cycle;
    for (auto i = walk.size(); i-- > static_cast<std::size_t>(seen_at[cur]);) {
        cycle.push_back(nodes[walk[i]].id);
    }
    return cycle;
}

std::string coerce_id(const nlohmann::json& v, const char* what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    throw ParseError(std::string(what) + " must be a string or an integer, got " + v.dump());
}

} // namespace

TaskGraph TaskGraph::build(std::vector<TaskNode> nodes, std::vector<TaskEdge> edges) {
    TaskGraph g;
    g.index_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id.empty()) throw ParseError("task node has an empty id");
        if (nodes[i].label.empty()) throw ParseError("task node '" + nodes[i].id + "' has an empty label");
        if (!g.index_.emplace(nodes[i].id, i).second) throw DuplicateIdError("duplicate task id '" + nodes[i].id + "'");
    }
    g.succ_.assign(nodes.size(), {});
    g.pred_.assign(nodes.size(), {});
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges) {
        auto f = g.index_.find(e.from);
        auto t = g.index_.find(e.to);
        if (f == g.index_.end() || t == g.index_.end()) {
            throw DanglingEdgeError("edge " + e.from + " -> " + e.to + " references unknown task '" +
                                    (f == g.index_.end() ? e.from : e.to) + "'");
        }
        if (f->second == t->second) throw CycleError({e.from});
        if (!seen.emplace(f->second, t->second).second) {
            throw DuplicateEdgeError("duplicate edge " + e.from + " -> " + e.to);
        }
        g.succ_[f->second].push_back(t->second);
        g.pred_[t->second].push_back(f->second);
    }
    const auto by_id = [&](std::size_t a, std::size_t b) { return id_less(nodes[a].id, nodes[b].id); };
    for (auto& s : g.succ_) std::sort(s.begin(), s.end(), by_id);
    for (auto& p : g.pred_) std::sort(p.begin(), p.end(), by_id);

    // acyclicity
    std::vector<std::size_t> indegree(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) indegree[i] = g.pred_[i].size();
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (indegree[i] == 0) stack.push_back(i);
    std::vector<bool> drained(nodes.size(), false);
    std::size_t count = 0;
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        drained[n] = true;
        ++count;
        for (auto s : g.succ_[n])
            if (--indegree[s] == 0) stack.push_back(s);
    }
    if (count != nodes.size()) throw CycleError(find_cycle(nodes, g.pred_, drained));

    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    return g;
}

std::optional<std::size_t> TaskGraph::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const TaskNode& TaskGraph::node(std::string_view id) const {
    auto idx = index_of(id);
    if (!idx) throw std::out_of_range("no task with id '" + std::string(id) + "'");
    return nodes_[*idx];
}

bool TaskGraph::has_edge(std::string_view from, std::string_view to) const {
    auto f = index_of(from);
    auto t = index_of(to);
    if (!f || !t) return false;
    const auto& s = succ_[*f];
    return std::find(s.begin(), s.end(), *t) != s.end();
}

std::vector<std::string> TaskGraph::roots() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (pred_[i].empty()) out.push_back(nodes_[i].id);
    std::sort(out.begin(), out.end(), IdLess{});
    return out;
}

TaskGraph validate(const nlohmann::json& document) {
    const nlohmann::json* body = &document;
    if (!document.is_object()) throw ParseError("task graph document must be an object");
    if (document.contains("task_graph")) {
        if (document.size() != 1) throw ParseError("wrapped task graph document has unexpected keys");
        body = &document.at("task_graph");
        if (!body->is_object()) throw ParseError("\"task_graph\" must be an object");
    }
    if (!body->contains("nodes") || !body->at("nodes").is_array())
        throw ParseError("task graph document needs a \"nodes\" array");
    if (body->contains("edges") && !body->at("edges").is_array())
        throw ParseError("\"edges\" must be an array");

    std::vector<TaskNode> nodes;
    for (const auto& n : body->at("nodes")) {
        if (!n.is_object() || !n.contains("id") || !n.contains("label"))
            throw ParseError("every node needs \"id\" and \"label\": " + n.dump());
        if (!n.at("label").is_string()) throw ParseError("node label must be a string: " + n.dump());
        nodes.push_back({coerce_id(n.at("id"), "node id"), n.at("label").get<std::string>()});
    }
    std::vector<TaskEdge> edges;
    if (body->contains("edges")) {
        for (const auto& e : body->at("edges")) {
            if (!e.is_object() || !e.contains("from") || !e.contains("to"))
                throw ParseError("every edge needs \"from\" and \"to\": " + e.dump());
            edges.push_back({coerce_id(e.at("from"), "edge endpoint"), coerce_id(e.at("to"), "edge endpoint")});
        }
    }
    return TaskGraph::build(std::move(nodes), std::move(edges));
}

TaskGraph validate(std::string_view document_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("task graph is not valid JSON: ") + e.what());
    }
    return validate(doc);
}

nlohmann::json to_json(const TaskGraph& g) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : g.nodes()) nodes.push_back({{"id", n.id}, {"label", n.label}});
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges()) edges.push_back({{"from", e.from}, {"to", e.to}});
    return {{"task_graph", {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}}};
}

std::vector<std::string> topological_order(const TaskGraph& g) {
    const auto& nodes = g.nodes();
    const auto cmp = [&](std::size_t a, std::size_t b) { return id_less(nodes[b].id, nodes[a].id); };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
    std::vector<std::size_t> indegree(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        indegree[i] = g.predecessors(i).size();
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<std::string> order;
    order.reserve(nodes.size());
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(nodes[n].id);
        for (auto s : g.successors(n))
            if (--indegree[s] == 0) ready.push(s);
    }
    return order;
}

DependencyView dependency_view(const TaskGraph& g) {
    DependencyView view;
    const auto& nodes = g.nodes();
    std::vector<IdSet> anc(nodes.size());
    for (const auto& id : topological_order(g)) {
        auto i = *g.index_of(id);
        IdSet direct;
        for (auto p : g.predecessors(i)) {
            direct.insert(nodes[p].id);
            anc[i].insert(nodes[p].id);
            anc[i].insert(anc[p].begin(), anc[p].end());
        }
        view.direct_predecessors.emplace(id, std::move(direct));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) view.ancestors.emplace(nodes[i].id, std::move(anc[i]));
    return view;
}

CriticalPath critical_path(const TaskGraph& g, const std::map<std::string, double>* weights) {
    const auto& nodes = g.nodes();
    if (nodes.empty()) return {};
    std::vector<double> w(nodes.size(), 1.0);
    if (weights) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto it = weights->find(nodes[i].id);
            if (it == weights->end()) continue;
            if (!(it->second >= 0.0)) throw std::invalid_argument("task weights must be non-negative");
            w[i] = it->second;
        }
    }
    // best[i] = heaviest path starting at i; tail[i] = heaviest continuation
    std::vector<double> best(nodes.size()), tail(nodes.size(), 0.0);
    auto order = topological_order(g);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto i = *g.index_of(*it);
        for (auto s : g.successors(i)) tail[i] = std::max(tail[i], best[s]);
        best[i] = w[i] + tail[i];
    }
    // smallest-id start among the maxima, then smallest-id continuation; a
    // zero-weight continuation is dropped since the shorter prefix sorts first
    std::size_t cur = 0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (best[i] > best[cur] || (best[i] == best[cur] && id_less(nodes[i].id, nodes[cur].id))) cur = i;
    }
    CriticalPath result;
    result.length = best[cur];
    for (;;) {
        result.path.push_back(nodes[cur].id);
        if (tail[cur] <= 0.0) break;
        for (auto s : g.successors(cur)) { // already in id order
            if (best[s] == tail[cur]) {
                cur = s;
                break;
            }
        }
    }
    return result;
}

std::vector<int> shortest_path_lengths(const TaskGraph& g, std::size_t source) {
    std::vector<int> dist(g.node_count(), -1);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        for (auto s : g.successors(n)) {
            if (dist[s] < 0) {
                dist[s] = dist[n] + 1;
                queue.push_back(s);
            }
        }
    }
    return dist;
}

} // namespace agentgraph
