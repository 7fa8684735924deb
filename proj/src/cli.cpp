#include "agentgraph/cli.hpp"
#include "agentgraph/analysis.hpp"
#include "agentgraph/dataset.hpp"
#include "agentgraph/errors.hpp"
#include "agentgraph/text.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace agentgraph {

namespace fs = std::filesystem;

namespace {

struct IoError : Error {
    using Error::Error;
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream o(path, std::ios::binary | std::ios::trunc);
    if (!o) throw IoError("cannot write " + path.string());
    o << text;
    if (!o) throw IoError("failed writing " + path.string());
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    if (cell == "true") return 1.0;
    if (cell == "false") return 0.0;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> cols = {
        "node_precision", "node_recall", "node_f1",  "edge_precision", "edge_recall",
        "edge_f1",        "tool_precision", "tool_recall", "tool_f1", "node_label_similarity",
        "ssi",            "path_length_similarity", "ged", "expected_complexity", "actual_complexity",
    };
    return cols;
}

nlohmann::json analyze_group(const std::vector<const std::map<std::string, std::string>*>& rows,
                             const std::vector<std::string>& features) {
    const auto value = [](const std::map<std::string, std::string>& row, const std::string& col) {
        auto it = row.find(col);
        return it == row.end() ? std::nullopt : parse_number(it->second);
    };
    nlohmann::json group;
    group["rows"] = rows.size();
    nlohmann::json pearson = nlohmann::json::object();
    for (const auto& col : metric_columns()) {
        std::vector<double> x, y;
        for (const auto* row : rows) {
            auto a = value(*row, col);
            auto b = value(*row, "answer_score");
            if (a && b) {
                x.push_back(*a);
                y.push_back(*b);
            }
        }
        try {
            auto c = pearson_r(x, y);
            pearson[col] = {{"r", c.r}, {"p_value", c.p_value}, {"n", c.n}};
        } catch (const DegenerateSampleError&) {
            pearson[col] = nullptr;
        }
    }
    group["pearson"] = std::move(pearson);

    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (const auto* row : rows) {
        std::vector<double> feats;
        for (const auto& f : features) {
            auto v = value(*row, f);
            if (!v) break;
            feats.push_back(*v);
        }
        auto target = value(*row, "answer_score");
        if (feats.size() == features.size() && target) {
            xs.push_back(std::move(feats));
            ys.push_back(*target);
        }
    }
    nlohmann::json ols = {{"features", features}, {"n", xs.size()}};
    try {
        auto fit = ols_fit(xs, ys);
        ols["coefficients"] = fit.coefficients;
        ols["r_squared"] = fit.r_squared;
    } catch (const RankDeficiencyError&) {
        ols["coefficients"] = nullptr;
        ols["r_squared"] = nullptr;
    }
    group["ols"] = std::move(ols);
    return group;
}

std::string fixed(const nlohmann::json& v, int precision = 4) {
    if (v.is_null()) return "";
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v.get<double>();
    return s.str();
}

void print_report(const nlohmann::json& report, std::ostream& out) {
    for (const auto& [category, group] : report.at("categories").items()) {
        out << "== " << category << " (" << group.at("rows").get<std::size_t>() << " rows)\n";
        out << std::left << std::setw(26) << "metric" << std::right << std::setw(10) << "r" << std::setw(12)
            << "p" << std::setw(6) << "n" << "\n";
        for (const auto& col : metric_columns()) {
            const auto& c = group.at("pearson").at(col);
            out << std::left << std::setw(26) << col << std::right << std::setw(10)
                << (c.is_null() ? "" : fixed(c.at("r"))) << std::setw(12)
                << (c.is_null() ? "" : fixed(c.at("p_value"), 6)) << std::setw(6)
                << (c.is_null() ? "" : std::to_string(c.at("n").get<std::size_t>())) << "\n";
        }
        const auto& ols = group.at("ols");
        out << "OLS R^2 over";
        for (const auto& f : ols.at("features")) out << " " << f.get<std::string>();
        out << ": " << (ols.at("r_squared").is_null() ? "(degenerate)" : fixed(ols.at("r_squared"))) << "\n\n";
    }
}

std::unique_ptr<AnswerJudge> make_judge(const RunConfig& config, std::shared_ptr<ModelBackend>& holder) {
    if (config.judge == "backend") {
        if (config.backend.empty()) throw ConfigError("the backend judge needs a backend config");
        holder = load_backend(config.backend);
        return std::make_unique<BackendJudge>(*holder);
    }
    return std::make_unique<LexicalJudge>();
}

} // namespace

std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = field_started = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            field_started = false;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw ParseError("CSV ends inside a quoted field");
    if (field_started || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    std::erase_if(records, [](const auto& r) { return r.size() == 1 && r[0].empty(); });
    if (records.empty()) throw ParseError("CSV has no header row");
    const auto& header = records.front();
    std::vector<std::map<std::string, std::string>> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw ParseError("CSV row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                             " cells, header has " + std::to_string(header.size()));
        }
        std::map<std::string, std::string> row;
        for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = records[r][c];
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json analyze_rows(const std::vector<std::map<std::string, std::string>>& rows,
                            const std::vector<std::string>& features) {
    std::map<std::string, std::vector<const std::map<std::string, std::string>*>> groups;
    std::vector<const std::map<std::string, std::string>*> all;
    for (const auto& row : rows) {
        auto it = row.find("category");
        groups[it == row.end() ? std::string() : it->second].push_back(&row);
        all.push_back(&row);
    }
    nlohmann::json categories = nlohmann::json::object();
    for (const auto& [name, members] : groups) categories[name] = analyze_group(members, features);
    categories["all"] = analyze_group(all, features);
    return {{"target", "answer_score"}, {"categories", std::move(categories)}};
}

int cmd_run(const std::string& query, const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (query.empty()) throw ConfigError("query must be non-empty");
        if (config.backend.empty()) throw ConfigError("no backend config given (--backend)");
        if (config.manifest.empty()) throw ConfigError("no tool manifest given (--manifest)");
        if (!fs::exists(config.manifest)) throw IoError("tool manifest not found: " + config.manifest);
        auto backend = load_backend(config.backend);
        auto catalog = load_manifest(config.manifest, config.embedding_provider());

        TaskGraph graph;
        try {
            graph = produce_task_graph(*backend, query, config.strategy, config.max_repairs);
        } catch (const OrchestrationError& e) {
            err << "orchestration failed: " << e.what() << "\n";
            return exit_orchestration;
        } catch (const BackendError& e) {
            err << "orchestration failed: " << e.what() << "\n";
            return exit_orchestration;
        }

        auto options = config.execution_options();
        if (config.feedback) {
            options.feedback_sink = [&out](const FeedbackEvent& ev) {
                out << "[" << ev.task_id << "] " << ev.phrase << "\n";
            };
        }
        auto trace = execute(config.mode, query, graph, catalog, *backend, options);

        const fs::path trace_path = config.out.empty() ? fs::path("trace.json") : fs::path(config.out);
        write_text(trace_path, trace_to_json(trace, to_json(config)).dump(2) + "\n");

        if (config.profile) {
            const auto timing = trace.timing();
            out << "task timings (ms from run start):\n";
            for (const auto& [id, span] : timing.tasks) {
                const auto ms = [&](Clock::time_point t) {
                    return std::chrono::duration<double, std::milli>(t - timing.run_start).count();
                };
                out << "  " << id << ": " << std::fixed << std::setprecision(1) << ms(span.first) << " -> "
                    << ms(span.second) << "\n";
            }
            out << "wall: " << std::chrono::duration<double, std::milli>(trace.wall_time()).count() << " ms\n";
            out.unsetf(std::ios::floatfield);
        }
        for (const auto& [id, r] : trace.results)
            if (r.status != TaskStatus::completed) err << "task " << id << " " << to_string(r.status) << ": " << r.error << "\n";
        out << trace.final_answer << "\n";
        return exit_ok;
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return exit_io;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_config;
    }
}

int cmd_eval(const fs::path& scenarios_dir, const fs::path& traces_dir, const RunConfig& config, std::ostream& out,
             std::ostream& err) {
    try {
        for (const auto& dir : {scenarios_dir, traces_dir})
            if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
        auto provider = config.embedding_provider();
        std::shared_ptr<ModelBackend> judge_backend;
        auto judge = make_judge(config, judge_backend);

        auto scenarios = load_scenarios(scenarios_dir);
        for (const auto& d : scenarios.diagnostics) err << "scenario " << d.path << ": " << d.message << "\n";

        std::map<std::string, fs::path> trace_files;
        for (const auto& entry : fs::directory_iterator(traces_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                trace_files.emplace(entry.path().stem().string(), entry.path());

        std::vector<const ScenarioRecord*> records;
        std::vector<ExecutionTrace> traces;
        std::set<std::string> paired;
        for (const auto& rec : scenarios.records) {
            auto it = trace_files.find(rec.name);
            if (it == trace_files.end()) {
                err << "unpaired scenario: " << rec.name << "\n";
                continue;
            }
            paired.insert(rec.name);
            try {
                traces.push_back(trace_from_json(nlohmann::json::parse(read_text(it->second))));
                records.push_back(&rec);
            } catch (const std::exception& e) {
                err << "unreadable trace " << it->second.string() << ": " << e.what() << "\n";
            }
        }
        for (const auto& [name, path] : trace_files)
            if (!paired.count(name)) err << "unpaired trace: " << path.string() << "\n";
        if (records.empty()) {
            err << "no scenario/trace pair could be evaluated\n";
            return exit_no_pairs;
        }

        std::vector<EvaluationInput> inputs;
        for (std::size_t i = 0; i < records.size(); ++i) inputs.push_back({records[i], &traces[i]});
        const auto reports = evaluate_batch(inputs, *provider, config.evaluation_config(), *judge);

        const fs::path out_dir = config.out.empty() ? fs::path("eval") : fs::path(config.out);
        const auto effective = to_json(config);
        std::string csv = csv_header() + "\n";
        for (const auto& rep : reports) {
            nlohmann::json doc = {{"config", effective}, {"report", to_json(rep)}};
            write_text(out_dir / "reports" / (rep.scenario + ".json"), doc.dump(2) + "\n");
            csv += csv_row(rep) + "\n";
            for (const auto& [metric, message] : rep.errors) err << rep.scenario << ": " << metric << ": " << message << "\n";
        }
        write_text(out_dir / "metrics.csv", csv);
        out << "evaluated " << reports.size() << " scenario(s); wrote " << (out_dir / "metrics.csv").string() << "\n";
        return exit_ok;
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return exit_io;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_config;
    }
}

int cmd_report(const fs::path& csv_path, const std::vector<std::string>& features, const fs::path& json_out,
               std::ostream& out, std::ostream& err) {
    try {
        if (features.empty()) throw ConfigError("at least one regression feature is needed");
        std::vector<std::map<std::string, std::string>> rows;
        try {
            rows = parse_csv(read_text(csv_path));
        } catch (const ParseError& e) {
            throw IoError("malformed CSV " + csv_path.string() + ": " + e.what());
        }
        if (!rows.empty() && !rows.front().count("answer_score"))
            throw IoError("CSV " + csv_path.string() + " has no answer_score column");
        for (const auto& f : features)
            if (!rows.empty() && !rows.front().count(f)) throw ConfigError("unknown feature column '" + f + "'");
        auto report = analyze_rows(rows, features);
        report["source"] = csv_path.string();
        print_report(report, out);
        const fs::path target = json_out.empty() ? csv_path.parent_path() / "report.json" : json_out;
        write_text(target, report.dump(2) + "\n");
        return exit_ok;
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return exit_io;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_config;
    }
}

int cmd_dataset_build(const fs::path& source_json, const fs::path& out_dir, const RunConfig& config, bool use_backend,
                      std::ostream& out, std::ostream& err) {
    try {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_text(source_json));
        } catch (const nlohmann::json::parse_error& e) {
            throw IoError("source " + source_json.string() + " is not valid JSON: " + e.what());
        }
        const auto sources = parse_source_scenarios(doc);
        std::shared_ptr<ModelBackend> backend;
        if (use_backend) {
            if (config.backend.empty()) throw ConfigError("--synthesize-with-backend needs --backend");
            backend = load_backend(config.backend);
        }
        auto build = build_scenarios(sources, *config.embedding_provider(), backend.get());
        for (const auto& name : build.dropped_duplicates) out << "dropped near-duplicate scenario: " << name << "\n";
        for (const auto& d : build.diagnostics) err << d.path << ": " << d.message << "\n";
        for (const auto& rec : build.records) {
            try {
                write_scenario(rec, out_dir);
            } catch (const std::exception& e) {
                throw IoError(e.what());
            }
        }
        out << "wrote " << build.records.size() << " scenario(s) to " << out_dir.string() << "\n";
        return build.diagnostics.empty() ? exit_ok : exit_diagnostics;
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return exit_io;
    } catch (const ScenarioError& e) {
        err << e.what() << "\n";
        return exit_diagnostics;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_config;
    }
}

int cmd_dataset_validate(const fs::path& root, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(root)) {
        err << "not a directory: " << root.string() << "\n";
        return exit_io;
    }
    const auto load = load_scenarios(root);
    for (const auto& d : load.diagnostics) err << d.path << ": " << d.message << "\n";
    out << load.records.size() << " valid scenario(s), " << load.diagnostics.size() << " diagnostic(s)\n";
    return load.diagnostics.empty() ? exit_ok : exit_diagnostics;
}

} // namespace agentgraph
