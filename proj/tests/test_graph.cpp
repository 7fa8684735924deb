#include "agentgraph/errors.hpp"
#include "agentgraph/graph.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <random>

using namespace agentgraph;

namespace {

TaskGraph chain3() { return TaskGraph::build({{"A", "a"}, {"B", "b"}, {"C", "c"}}, {{"A", "B"}, {"B", "C"}}); }

TaskGraph diamond() {
    return TaskGraph::build({{"A", "a"}, {"B", "b"}, {"C", "c"}, {"D", "d"}},
                            {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}});
}

} // namespace

TEST_CASE("validate accepts a minimal chain with integer ids") {
    auto g = validate(R"({"nodes":[{"id":1,"label":"A"},{"id":2,"label":"B"}],"edges":[{"from":1,"to":2}]})");
    CHECK(g.node_count() == 2);
    CHECK(g.has_edge("1", "2"));
    CHECK(g.node("2").label == "B");
}

TEST_CASE("validate accepts the wrapped form") {
    auto g = validate(R"({"task_graph":{"nodes":[{"id":"task_1","label":"x"}],"edges":[]}})");
    CHECK(g.node_count() == 1);
    CHECK(g.nodes()[0].id == "task_1");
}

TEST_CASE("validate reports each kind of broken document") {
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1,"label":"A"},{"id":2,"label":"B"}],
                               "edges":[{"from":1,"to":2},{"from":2,"to":1}]})"),
                    CycleError);
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1,"label":"A"}],"edges":[{"from":1,"to":2}]})"), DanglingEdgeError);
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1,"label":"A"},{"id":1,"label":"B"}],"edges":[]})"),
                    DuplicateIdError);
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1,"label":"A"},{"id":2,"label":"B"}],
                               "edges":[{"from":1,"to":2},{"from":1,"to":2}]})"),
                    DuplicateEdgeError);
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1,"label":"A"}],"edges":[{"from":1,"to":1}]})"), CycleError);
    CHECK_THROWS_AS(validate("not json"), ParseError);
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1}],"edges":[]})"), ParseError);
    CHECK_THROWS_AS(validate(R"({"nodes":[{"id":1,"label":""}],"edges":[]})"), ParseError);
    CHECK_THROWS_AS(validate(R"({"edges":[]})"), ParseError);
}

TEST_CASE("cycle errors name the nodes on the cycle") {
    try {
        TaskGraph::build({{"1", "a"}, {"2", "b"}, {"3", "c"}, {"4", "d"}}, {{"1", "2"}, {"2", "3"}, {"3", "4"}, {"4", "2"}});
        FAIL("expected CycleError");
    } catch (const CycleError& e) {
        std::set<std::string> ids(e.cycle().begin(), e.cycle().end());
        CHECK(ids == std::set<std::string>{"2", "3", "4"});
    }
}

TEST_CASE("empty graph is valid") {
    auto g = validate(R"({"nodes":[],"edges":[]})");
    CHECK(g.empty());
    CHECK(complexity_score(g) == 0);
    CHECK(topological_order(g).empty());
    CHECK(critical_path(g).path.empty());
}

TEST_CASE("topological order examples") {
    CHECK(topological_order(chain3()) == std::vector<std::string>{"A", "B", "C"});
    CHECK(topological_order(diamond()) == std::vector<std::string>{"A", "B", "C", "D"});
    auto iso = TaskGraph::build({{"d", "x"}, {"b", "x"}, {"c", "x"}, {"a", "x"}}, {});
    CHECK(topological_order(iso) == std::vector<std::string>{"a", "b", "c", "d"});
    // numeric ids compare by value
    auto num = TaskGraph::build({{"10", "x"}, {"9", "x"}, {"2", "x"}}, {});
    CHECK(topological_order(num) == std::vector<std::string>{"2", "9", "10"});
}

TEST_CASE("topological order is the smallest valid order on random small DAGs") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 300; ++t) {
        auto g = oracle::random_dag(rng, 0, 6, 0.35);
        CHECK(topological_order(g) == oracle::smallest_topological_order(g));
    }
}

TEST_CASE("dependency view examples") {
    auto v = dependency_view(chain3());
    CHECK(v.ancestors.at("C") == IdSet{"A", "B"});
    auto d = dependency_view(diamond());
    CHECK(d.ancestors.at("D") == IdSet{"A", "B", "C"});
    CHECK(d.direct_predecessors.at("D") == IdSet{"B", "C"});
    CHECK(d.ancestors.at("A").empty());
}

TEST_CASE("dependency view matches DFS reachability") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        auto g = oracle::random_dag(rng, 8, 8, 0.3);
        auto view = dependency_view(g);
        auto reach = oracle::reachability(g);
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            const auto& id = g.nodes()[v].id;
            IdSet expected;
            for (std::size_t u = 0; u < g.node_count(); ++u)
                if (reach[u][v]) expected.insert(g.nodes()[u].id);
            CHECK(view.ancestors.at(id) == expected);
            CHECK_FALSE(view.ancestors.at(id).count(id));
            for (const auto& p : view.direct_predecessors.at(id)) CHECK(view.ancestors.at(id).count(p));
        }
    }
}

TEST_CASE("critical path examples") {
    auto c = critical_path(chain3());
    CHECK(c.length == doctest::Approx(3.0));
    CHECK(c.path == std::vector<std::string>{"A", "B", "C"});
    auto g = TaskGraph::build({{"A", "a"}, {"B", "b"}, {"C", "c"}}, {{"A", "B"}, {"A", "C"}});
    std::map<std::string, double> w{{"A", 1.0}, {"B", 5.0}, {"C", 2.0}};
    auto p = critical_path(g, &w);
    CHECK(p.path == std::vector<std::string>{"A", "B"});
    CHECK(p.length == doctest::Approx(6.0));
    CHECK(critical_path(diamond()).path == std::vector<std::string>{"A", "B", "D"});
}

TEST_CASE("critical path equals exhaustive path enumeration") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dur(0.5, 4.0);
    for (int t = 0; t < 100; ++t) {
        auto g = oracle::random_dag(rng, 1, 10, 0.3);
        std::map<std::string, double> unit, random;
        for (const auto& n : g.nodes()) {
            unit[n.id] = 1.0;
            random[n.id] = dur(rng);
        }
        for (const auto* w : {&unit, &random}) {
            auto got = critical_path(g, w);
            auto [path, length] = oracle::heaviest_path(g, *w);
            CHECK(got.path == path);
            CHECK(got.length == doctest::Approx(length).epsilon(1e-12));
        }
        CHECK(critical_path(g).length == doctest::Approx(oracle::heaviest_path(g, unit).second));
    }
}

TEST_CASE("complexity score") {
    auto g = TaskGraph::build({{"1", "a"}, {"2", "b"}, {"3", "c"}, {"4", "d"}}, {{"1", "2"}, {"2", "3"}, {"3", "4"}});
    CHECK(complexity_score(g) == 7);
    CHECK(complexity_score(diamond()) == 8);
    // additive under disjoint union
    auto u = TaskGraph::build({{"A", "a"}, {"B", "b"}, {"C", "c"}, {"x1", "a"}, {"x2", "b"}, {"x3", "c"}},
                              {{"A", "B"}, {"B", "C"}, {"x1", "x2"}, {"x2", "x3"}});
    CHECK(complexity_score(u) == 2 * complexity_score(chain3()));
}

TEST_CASE("round trip through the canonical document") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        auto g = oracle::random_dag(rng, 0, 9, 0.3);
        auto doc = to_json(g);
        CHECK(doc.contains("task_graph"));
        CHECK(validate(doc) == g);
        CHECK(validate(doc.dump()) == g);
    }
}

TEST_CASE("shortest path lengths match Floyd-Warshall") {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 50; ++t) {
        auto g = oracle::random_dag(rng, 1, 9, 0.3);
        auto d = oracle::distances(g);
        for (std::size_t s = 0; s < g.node_count(); ++s) CHECK(shortest_path_lengths(g, s) == d[s]);
    }
}

TEST_CASE("duplicate labels on distinct ids are accepted") {
    auto g = TaskGraph::build({{"1", "same"}, {"2", "same"}}, {{"1", "2"}});
    CHECK(g.node_count() == 2);
}
