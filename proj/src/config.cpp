#include "agentgraph/config.hpp"
#include "agentgraph/errors.hpp"

#include <fstream>
#include <sstream>

namespace agentgraph {

namespace {

const char* matching_name(NodeMatching m) { return m == NodeMatching::greedy ? "greedy" : "optimal"; }

template <typename T>
T get(const nlohmann::json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

ExecutionOptions RunConfig::execution_options() const {
    ExecutionOptions o;
    o.include_indirect_dependencies = include_indirect_dependencies;
    o.semantic_tool_filtering = semantic_tool_filtering;
    o.tool_k = tool_k;
    o.tool_min_sim = tool_min_sim;
    o.max_concurrency = max_concurrency;
    o.feedback = feedback;
    o.feedback_from_backend = feedback;
    return o;
}

EvaluationConfig RunConfig::evaluation_config() const {
    EvaluationConfig c;
    c.theta = theta;
    c.alpha = alpha;
    c.matching = matching;
    return c;
}

std::shared_ptr<const EmbeddingProvider> RunConfig::embedding_provider() const {
    return make_embedding_provider(parse_embedding_config(embedding.dump()));
}

RunConfig config_from_json(const nlohmann::json& j) {
    require(j.is_object(), "config must be a JSON object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "backend") {
            c.backend = get<std::string>(value, key);
        } else if (key == "manifest") {
            c.manifest = get<std::string>(value, key);
        } else if (key == "embedding") {
            require(value.is_object(), "config key 'embedding' must be an object");
            c.embedding = value;
        } else if (key == "strategy") {
            auto s = parse_strategy(get<std::string>(value, key));
            require(s.has_value(), "unknown strategy '" + value.get<std::string>() + "'");
            c.strategy = *s;
        } else if (key == "mode") {
            const auto m = get<std::string>(value, key);
            if (m == "seq" || m == "sequential") c.mode = ExecutionMode::sequential;
            else if (m == "par" || m == "parallel") c.mode = ExecutionMode::parallel;
            else throw ConfigError("unknown mode '" + m + "' (expected seq or par)");
        } else if (key == "max_concurrency") {
            if (!value.is_null()) {
                const auto n = get<long>(value, key);
                require(n >= 1 && n <= 256, "max_concurrency must be in [1, 256]");
                c.max_concurrency = static_cast<std::size_t>(n);
            }
        } else if (key == "max_repairs") {
            const auto n = get<long>(value, key);
            require(n >= 0 && n <= 10, "max_repairs must be in [0, 10]");
            c.max_repairs = static_cast<std::size_t>(n);
        } else if (key == "include_indirect_dependencies") {
            c.include_indirect_dependencies = get<bool>(value, key);
        } else if (key == "semantic_tool_filtering") {
            c.semantic_tool_filtering = get<bool>(value, key);
        } else if (key == "feedback") {
            c.feedback = get<bool>(value, key);
        } else if (key == "profile") {
            c.profile = get<bool>(value, key);
        } else if (key == "tool_k") {
            const auto n = get<long>(value, key);
            require(n >= 1, "tool_k must be positive");
            c.tool_k = static_cast<std::size_t>(n);
        } else if (key == "tool_min_sim") {
            c.tool_min_sim = get<double>(value, key);
            require(c.tool_min_sim >= -1.0 && c.tool_min_sim <= 1.0, "tool_min_sim must be in [-1, 1]");
        } else if (key == "theta") {
            c.theta = get<double>(value, key);
            require(c.theta > 0.0 && c.theta <= 1.0, "theta must be in (0, 1]");
        } else if (key == "alpha") {
            c.alpha = get<double>(value, key);
            require(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha must be positive");
        } else if (key == "matching") {
            const auto m = get<std::string>(value, key);
            if (m == "greedy") c.matching = NodeMatching::greedy;
            else if (m == "optimal") c.matching = NodeMatching::optimal;
            else throw ConfigError("unknown matching '" + m + "' (expected greedy or optimal)");
        } else if (key == "judge") {
            c.judge = get<std::string>(value, key);
            require(c.judge == "lexical" || c.judge == "backend", "judge must be lexical or backend");
        } else if (key == "out") {
            c.out = get<std::string>(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    // fail early on a bad embedding section rather than mid-command
    parse_embedding_config(c.embedding.dump());
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["backend"] = c.backend;
    j["manifest"] = c.manifest;
    j["embedding"] = c.embedding;
    j["strategy"] = to_string(c.strategy);
    j["mode"] = c.mode == ExecutionMode::sequential ? "seq" : "par";
    j["max_concurrency"] = c.max_concurrency ? nlohmann::json(*c.max_concurrency) : nlohmann::json(nullptr);
    j["max_repairs"] = c.max_repairs;
    j["include_indirect_dependencies"] = c.include_indirect_dependencies;
    j["semantic_tool_filtering"] = c.semantic_tool_filtering;
    j["feedback"] = c.feedback;
    j["profile"] = c.profile;
    j["tool_k"] = c.tool_k;
    j["tool_min_sim"] = c.tool_min_sim;
    j["theta"] = c.theta;
    j["alpha"] = c.alpha;
    j["matching"] = matching_name(c.matching);
    j["judge"] = c.judge;
    j["out"] = c.out;
    return nlohmann::json::parse(j.dump());
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides) {
    nlohmann::json merged = nlohmann::json::object();
    if (file) {
        std::ifstream in(*file, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file " + file->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config file " + file->string() + " is not valid JSON: " + e.what());
        }
        require(j.is_object(), "config file " + file->string() + " must hold a JSON object");
        for (const char* key : {"backend", "manifest"}) {
            if (j.contains(key) && j[key].is_string()) {
                std::filesystem::path p = j[key].get<std::string>();
                if (!p.empty() && p.is_relative()) j[key] = (file->parent_path() / p).lexically_normal().string();
            }
        }
        merged.update(j);
    }
    if (!overrides.is_null()) {
        require(overrides.is_object(), "overrides must be a JSON object");
        merged.update(overrides);
    }
    return config_from_json(merged);
}

} // namespace agentgraph
