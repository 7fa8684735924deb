#include "agentgraph/cli.hpp"
#include "agentgraph/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>

namespace {

using agentgraph::RunConfig;

// Flags that were actually given on the command line, as config overrides.
struct Overrides {
    std::string backend, manifest, strategy, mode, matching, judge, out;
    long max_concurrency = 0;
    bool indirect = false, feedback = false, profile = false, no_filter = false;
    long tool_k = 0;
    double tool_min_sim = 0, theta = 0, alpha = 0;
    std::multimap<std::string, CLI::Option*> options;

    CLI::Option*& track(const std::string& key) { return options.emplace(key, nullptr)->second; }

    void add_common(CLI::App& app) {
        track("backend") = app.add_option("--backend", backend, "Backend config file (scripted or http)");
        track("out") = app.add_option("--out", out, "Output path");
    }
    void add_run(CLI::App& app) {
        track("manifest") = app.add_option("--manifest", manifest, "Tool manifest JSON");
        track("strategy") = app.add_option("--strategy", strategy, "Decomposition strategy")
                                  ->check(CLI::IsMember({"default", "coarse", "fine", "critical-path"}));
        track("mode") = app.add_option("--mode", mode, "Execution mode")->check(CLI::IsMember({"seq", "par"}));
        track("max_concurrency") = app.add_option("--max-concurrency", max_concurrency, "Parallel worker count");
        track("include_indirect_dependencies") =
            app.add_flag("--indirect-deps", indirect, "Give each task the results of all its ancestors");
        track("feedback") = app.add_flag("--feedback", feedback, "Print a progress phrase as each task starts");
        track("profile") = app.add_flag("--profile", profile, "Print per-task timings");
        track("tool_k") = app.add_option("--tool-k", tool_k, "Tools offered per task");
        track("tool_min_sim") = app.add_option("--tool-min-sim", tool_min_sim, "Minimum tool similarity");
        track("semantic_tool_filtering") =
            app.add_flag("--no-tool-filter", no_filter, "Offer every tool to every task");
    }
    void add_eval(CLI::App& app) {
        track("theta") = app.add_option("--theta", theta, "Node match threshold");
        track("alpha") = app.add_option("--alpha", alpha, "Path length decay");
        track("matching") = app.add_option("--matching", matching, "Node matching")
                                  ->check(CLI::IsMember({"greedy", "optimal"}));
        track("judge") = app.add_option("--judge", judge, "Answer judge")->check(CLI::IsMember({"lexical", "backend"}));
    }

    nlohmann::json json() const {
        nlohmann::json j = nlohmann::json::object();
        const auto given = [&](const char* key) {
            auto [lo, hi] = options.equal_range(key);
            for (auto it = lo; it != hi; ++it)
                if (it->second->count() > 0) return true;
            return false;
        };
        if (given("backend")) j["backend"] = backend;
        if (given("manifest")) j["manifest"] = manifest;
        if (given("out")) j["out"] = out;
        if (given("strategy")) j["strategy"] = strategy;
        if (given("mode")) j["mode"] = mode;
        if (given("max_concurrency")) j["max_concurrency"] = max_concurrency;
        if (given("include_indirect_dependencies")) j["include_indirect_dependencies"] = indirect;
        if (given("feedback")) j["feedback"] = feedback;
        if (given("profile")) j["profile"] = profile;
        if (given("tool_k")) j["tool_k"] = tool_k;
        if (given("tool_min_sim")) j["tool_min_sim"] = tool_min_sim;
        if (given("semantic_tool_filtering")) j["semantic_tool_filtering"] = !no_filter;
        if (given("theta")) j["theta"] = theta;
        if (given("alpha")) j["alpha"] = alpha;
        if (given("matching")) j["matching"] = matching;
        if (given("judge")) j["judge"] = judge;
        return j;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Task-graph agent orchestration and evaluation"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "JSON run config (flags override it)");

    Overrides ov;

    auto* run = app.add_subcommand("run", "Decompose and execute a query");
    std::string query;
    run->add_option("query", query, "User query")->required();
    ov.add_common(*run);
    ov.add_run(*run);

    auto* eval = app.add_subcommand("eval", "Score traces against scenarios");
    std::string scenarios_dir, traces_dir;
    eval->add_option("scenarios", scenarios_dir, "Scenario directory tree")->required();
    eval->add_option("traces", traces_dir, "Directory of <scenario>.json traces")->required();
    ov.add_common(*eval);
    ov.add_eval(*eval);

    auto* report = app.add_subcommand("report", "Correlation and regression over a metrics CSV");
    std::string csv_path, report_out;
    std::vector<std::string> features = agentgraph::default_report_features;
    report->add_option("csv", csv_path, "metrics.csv from eval")->required();
    report->add_option("--features", features, "Regression features")->delimiter(',');
    report->add_option("--out", report_out, "Report JSON path");

    auto* dataset = app.add_subcommand("dataset", "Build or validate scenario directories");
    dataset->require_subcommand(1);
    auto* build = dataset->add_subcommand("build", "Build scenarios from a source list");
    std::string source, build_out;
    bool with_backend = false;
    build->add_option("source", source, "Source scenario list (JSON)")->required();
    build->add_option("out_dir", build_out, "Destination directory")->required();
    build->add_option("--backend", ov.backend, "Backend config for manifest synthesis");
    build->add_flag("--synthesize-with-backend", with_backend, "Ask the backend for tool behaviors");
    auto* validate = dataset->add_subcommand("validate", "Load and check every scenario");
    std::string validate_root;
    validate->add_option("root", validate_root, "Scenario directory tree")->required();

    CLI11_PARSE(app, argc, argv);

    if (*validate) return agentgraph::cmd_dataset_validate(validate_root, std::cout, std::cerr);
    if (*report) return agentgraph::cmd_report(csv_path, features, report_out, std::cout, std::cerr);

    RunConfig config;
    try {
        auto overrides = ov.json();
        if (*build && !ov.backend.empty()) overrides["backend"] = ov.backend;
        config = agentgraph::resolve_config(
            config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file), overrides);
    } catch (const agentgraph::Error& e) {
        std::cerr << e.what() << "\n";
        return agentgraph::exit_config;
    }
    if (*run) return agentgraph::cmd_run(query, config, std::cout, std::cerr);
    if (*eval) return agentgraph::cmd_eval(scenarios_dir, traces_dir, config, std::cout, std::cerr);
    return agentgraph::cmd_dataset_build(source, build_out, config, with_backend, std::cout, std::cerr);
}
