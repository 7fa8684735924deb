#include "agentgraph/errors.hpp"
#include "agentgraph/orchestration.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>

using namespace agentgraph;

namespace {

const std::string chain_doc =
    R"({"nodes":[{"id":1,"label":"Find flights"},{"id":2,"label":"Book hotel"},{"id":3,"label":"Plan days"}],)"
    R"("edges":[{"from":1,"to":2},{"from":2,"to":3}]})";
const std::string cyclic_doc =
    R"({"nodes":[{"id":1,"label":"a"},{"id":2,"label":"b"}],"edges":[{"from":1,"to":2},{"from":2,"to":1}]})";

} // namespace

TEST_CASE("decomposition prompt") {
    const auto base = build_task_graph_prompt("plan a trip", DecompositionStrategy::default_);
    CHECK(base.find("User Query: plan a trip") != std::string::npos);
    CHECK(base.find("Turn the user request below into a plan of tasks") != std::string::npos);
    CHECK(base.find("\"edges\"") != std::string::npos);
    CHECK(base.find("No task may depend on itself") != std::string::npos);
    for (auto s : {DecompositionStrategy::coarse, DecompositionStrategy::fine, DecompositionStrategy::critical_path}) {
        const auto p = build_task_graph_prompt("plan a trip", s);
        CHECK(p.size() > base.size());
        CHECK(p.compare(0, base.size(), base) == 0);
    }
    CHECK(build_task_graph_prompt("plan a trip", DecompositionStrategy::coarse) !=
          build_task_graph_prompt("plan a trip", DecompositionStrategy::fine));
    CHECK_THROWS_AS(build_task_graph_prompt("", DecompositionStrategy::default_), std::invalid_argument);
}

TEST_CASE("strategy names") {
    for (auto s : {DecompositionStrategy::default_, DecompositionStrategy::coarse, DecompositionStrategy::fine,
                   DecompositionStrategy::critical_path})
        CHECK(parse_strategy(to_string(s)) == s);
    CHECK(parse_strategy("critical_path") == DecompositionStrategy::critical_path);
    CHECK_FALSE(parse_strategy("medium").has_value());
}

TEST_CASE("json extraction tolerates prose and braces inside strings") {
    CHECK(extract_json_object("Sure! {\"a\": 1} and {\"b\": 2}") == std::optional<std::string>("{\"a\": 1}"));
    CHECK(extract_json_object(R"(x {"s": "a } b {", "n": {"m": 1}} y)") ==
          std::optional<std::string>(R"({"s": "a } b {", "n": {"m": 1}})"));
    CHECK(extract_json_object(R"({"s": "quote \" }"})") == std::optional<std::string>(R"({"s": "quote \" }"})"));
    CHECK_FALSE(extract_json_object("no object here").has_value());
    CHECK(extract_json_object("{ unclosed {\"ok\": true}") == std::optional<std::string>("{\"ok\": true}"));
}

TEST_CASE("produce_task_graph round trip") {
    ScriptedBackend b;
    b.add_rule("Turn the user request below into a plan of tasks", "Here you go:\n" + chain_doc + "\nLet me know!");
    auto g = produce_task_graph(b, "plan a trip", DecompositionStrategy::default_);
    CHECK(g.node_count() == 3);
    CHECK(g.has_edge("2", "3"));
    CHECK(b.call_count() == 1);
    // bit-deterministic
    ScriptedBackend b2;
    b2.add_rule("Turn the user request below into a plan of tasks", chain_doc);
    CHECK(to_json(produce_task_graph(b2, "plan a trip", DecompositionStrategy::fine)).dump() == to_json(g).dump());
}

TEST_CASE("produce_task_graph repairs once") {
    ScriptedBackend b({{"Turn the user request below into a plan of tasks", false, {cyclic_doc, chain_doc}, false}}, std::nullopt);
    auto g = produce_task_graph(b, "plan a trip", DecompositionStrategy::default_, 1);
    CHECK(g.node_count() == 3);
    const auto t = b.transcript();
    REQUIRE(t.size() == 2);
    // the repair prompt carries the validation error
    CHECK(t[1].prompt.find("cycle") != std::string::npos);
    CHECK(t[1].prompt.size() > t[0].prompt.size());
}

TEST_CASE("produce_task_graph gives up after max_repairs + 1 calls") {
    for (int repairs : {0, 1, 2, 4}) {
        ScriptedBackend b;
        b.add_rule("Turn the user request below into a plan of tasks", cyclic_doc);
        try {
            produce_task_graph(b, "plan a trip", DecompositionStrategy::default_, repairs);
            FAIL("expected OrchestrationError");
        } catch (const OrchestrationError& e) {
            CHECK(e.attempts() == repairs + 1);
            CHECK(e.last_failure().find("cycle") != std::string::npos);
        }
        CHECK(b.call_count() == static_cast<std::size_t>(repairs + 1));
    }
    ScriptedBackend prose;
    prose.add_rule("plan of tasks", "I cannot help with that.");
    CHECK_THROWS_AS(produce_task_graph(prose, "q", DecompositionStrategy::default_), OrchestrationError);
    CHECK_THROWS_AS(produce_task_graph(prose, "q", DecompositionStrategy::default_, -1), std::invalid_argument);
}

TEST_CASE("backend errors propagate") {
    ScriptedBackend b({{"Decompose", false, {}, true}}, std::nullopt);
    CHECK_THROWS_AS(produce_task_graph(b, "q", DecompositionStrategy::default_), BackendError);
    ScriptedBackend empty;
    CHECK_THROWS_AS(empty.complete("anything"), BackendError);
}

TEST_CASE("scripted backend rules") {
    auto b = ScriptedBackend::from_json_text(R"({
        "backend_id": "t",
        "rules": [
            {"match": "^hello \\d+$", "regex": true, "responses": ["one", "two"]},
            {"match": "hello", "response": "plain"}
        ],
        "fallback": "fb"})");
    CHECK(b.backend_id() == "t");
    CHECK(b.complete("hello 1") == "one");
    CHECK(b.complete("hello 2") == "two");
    CHECK(b.complete("hello 3") == "two");
    CHECK(b.complete("say hello") == "plain");
    CHECK(b.complete("bye") == "fb");
    CHECK(b.call_count() == 5);
    CHECK_THROWS_AS(ScriptedBackend::from_json_text(R"({"rules":[{"match":"x"}]})"), ConfigError);
    CHECK_THROWS_AS(ScriptedBackend::from_json_text(R"({"rules":[{"match":"(", "regex": true, "response": "r"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(ScriptedBackend::from_json_text(R"({"rulez":[]})"), ConfigError);
}

TEST_CASE("load_backend") {
    const auto dir = std::filesystem::temp_directory_path() / "ag_backend_cfg";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "rules.json") << R"({"rules":[{"match":"x","response":"y"}]})";
    std::ofstream(dir / "a.json") << R"({"kind":"scripted","rules_file":"rules.json"})";
    std::ofstream(dir / "b.json") << R"({"kind":"http","base_url":"http://localhost:1","model":"m"})";
    std::ofstream(dir / "c.json") << R"({"kind":"http","base_url":"http://localhost:1"})";
    std::ofstream(dir / "d.json") << R"({"kind":"carrier-pigeon"})";
    std::ofstream(dir / "e.json") << R"({"kind":"http","base_url":"http://localhost:1","model":"m","colour":1})";
    CHECK(load_backend((dir / "a.json").string())->complete("x") == "y");
    CHECK(load_backend((dir / "b.json").string())->backend_id().find("m") != std::string::npos);
    CHECK_THROWS_AS(load_backend((dir / "c.json").string()), ConfigError);
    CHECK_THROWS_AS(load_backend((dir / "d.json").string()), ConfigError);
    CHECK_THROWS_AS(load_backend((dir / "e.json").string()), ConfigError);
    CHECK_THROWS_AS(load_backend((dir / "missing.json").string()), ConfigError);
}
