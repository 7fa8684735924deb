#include "agentgraph/tools.hpp"
#include "agentgraph/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace agentgraph {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Calls on_literal / on_slot for each piece of a {param} template.
template <typename Literal, typename Slot>
void scan_template(const std::string& text, Literal on_literal, Slot on_slot) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{' && i + 1 < text.size() && is_ident_start(text[i + 1])) {
            std::size_t j = i + 1;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            if (j < text.size() && text[j] == '}') {
                on_slot(text.substr(i + 1, j - i - 1));
                i = j + 1;
                continue;
            }
        }
        on_literal(text[i]);
        ++i;
    }
}

std::string value_to_string(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

BehaviorSpec parse_behavior(const nlohmann::json& b, const std::string& tool) {
    if (!b.is_object()) throw ManifestParseError("tool '" + tool + "': behavior must be an object");
    for (const auto& [key, _] : b.items())
        if (key != "kind" && key != "payload")
            throw ManifestParseError("tool '" + tool + "': unknown behavior field '" + key + "'");
    if (!b.contains("kind") || !b.at("kind").is_string() || !b.contains("payload"))
        throw ManifestParseError("tool '" + tool + "': behavior needs \"kind\" and \"payload\"");
    const auto kind = b.at("kind").get<std::string>();
    const auto& payload = b.at("payload");
    if (kind == "fixed_output" || kind == "template") {
        if (!payload.is_string())
            throw BadBehaviorSpecError("tool '" + tool + "': " + kind + " payload must be a string");
        if (kind == "fixed_output") return FixedOutput{payload.get<std::string>()};
        return TemplateOutput{payload.get<std::string>()};
    }
    if (kind == "table_lookup") {
        if (!payload.is_object() || !payload.contains("table") || !payload.at("table").is_object())
            throw BadBehaviorSpecError("tool '" + tool + "': table_lookup payload needs a \"table\" object");
        TableLookup t;
        for (const auto& [key, value] : payload.items()) {
            if (key == "table") {
                for (const auto& [k, v] : value.items()) {
                    if (!v.is_string())
                        throw BadBehaviorSpecError("tool '" + tool + "': table values must be strings");
                    t.table.emplace(k, v.get<std::string>());
                }
            } else if (key == "default") {
                if (!value.is_string()) throw BadBehaviorSpecError("tool '" + tool + "': table default must be a string");
                t.fallback = value.get<std::string>();
            } else {
                throw ManifestParseError("tool '" + tool + "': unknown table_lookup field '" + key + "'");
            }
        }
        return t;
    }
    throw BadBehaviorSpecError("tool '" + tool + "': unknown behavior kind '" + kind + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestParseError("cannot read tool manifest " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string behavior_kind(const BehaviorSpec& b) {
    switch (b.index()) {
    case 0: return "fixed_output";
    case 1: return "template";
    default: return "table_lookup";
    }
}

void check_declaration(const ToolDeclaration& decl) {
    if (decl.name.empty()) throw ManifestParseError("tool name must be non-empty");
    if (decl.description.empty()) throw ManifestParseError("tool '" + decl.name + "' needs a description");
    std::set<std::string> names;
    for (const auto& p : decl.params) {
        if (p.name.empty()) throw ManifestParseError("tool '" + decl.name + "' has a parameter without a name");
        if (!names.insert(p.name).second)
            throw ManifestParseError("tool '" + decl.name + "' declares parameter '" + p.name + "' twice");
    }
    if (const auto* t = std::get_if<TemplateOutput>(&decl.behavior)) {
        scan_template(t->text, [](char) {}, [&](const std::string& slot) {
            if (!names.count(slot))
                throw BadBehaviorSpecError("tool '" + decl.name + "': template slot {" + slot +
                                           "} is not a declared parameter");
        });
    } else if (const auto* t = std::get_if<TableLookup>(&decl.behavior)) {
        if (decl.params.empty())
            throw BadBehaviorSpecError("tool '" + decl.name + "': table_lookup needs a parameter to key on");
        if (t->table.empty()) throw BadBehaviorSpecError("tool '" + decl.name + "': table_lookup table is empty");
        for (const auto& [k, _] : t->table)
            if (k.empty()) throw BadBehaviorSpecError("tool '" + decl.name + "': table keys must be non-empty");
    }
}

ToolDeclaration parse_tool_declaration(const nlohmann::json& entry) {
    if (!entry.is_object()) throw ManifestParseError("manifest entries must be objects");
    ToolDeclaration decl;
    if (!entry.contains("name") || !entry.at("name").is_string())
        throw ManifestParseError("manifest entry needs a string \"name\": " + entry.dump());
    decl.name = entry.at("name").get<std::string>();
    bool has_behavior = false;
    for (const auto& [key, value] : entry.items()) {
        if (key == "name") continue;
        if (key == "description") {
            if (!value.is_string()) throw ManifestParseError("tool '" + decl.name + "': description must be a string");
            decl.description = value.get<std::string>();
        } else if (key == "params") {
            if (!value.is_array()) throw ManifestParseError("tool '" + decl.name + "': params must be a list");
            for (const auto& p : value) {
                if (!p.is_object() || !p.contains("name") || !p.at("name").is_string())
                    throw ManifestParseError("tool '" + decl.name + "': every param needs a string name");
                ToolParam param;
                for (const auto& [pk, pv] : p.items()) {
                    if (pk == "name") param.name = pv.get<std::string>();
                    else if (pk == "type" && pv.is_string()) param.type = pv.get<std::string>();
                    else if (pk == "required" && pv.is_boolean()) param.required = pv.get<bool>();
                    else if (pk == "default") param.default_value = value_to_string(pv);
                    else throw ManifestParseError("tool '" + decl.name + "': bad param field '" + pk + "'");
                }
                decl.params.push_back(std::move(param));
            }
        } else if (key == "behavior") {
            decl.behavior = parse_behavior(value, decl.name);
            has_behavior = true;
        } else {
            throw ManifestParseError("tool '" + decl.name + "': unknown field '" + key + "'");
        }
    }
    if (!has_behavior) throw ManifestParseError("tool '" + decl.name + "' has no behavior");
    check_declaration(decl);
    return decl;
}

std::vector<ToolDeclaration> parse_manifest(const nlohmann::json& manifest) {
    if (!manifest.is_array()) throw ManifestParseError("tool manifest must be a list of tools");
    std::vector<ToolDeclaration> out;
    std::set<std::string> seen;
    for (const auto& entry : manifest) {
        auto decl = parse_tool_declaration(entry);
        if (!seen.insert(decl.name).second) throw DuplicateToolError("duplicate tool name '" + decl.name + "'");
        out.push_back(std::move(decl));
    }
    return out;
}

nlohmann::json to_json(const ToolDeclaration& decl) {
    auto params = nlohmann::json::array();
    for (const auto& p : decl.params) {
        nlohmann::json jp = {{"name", p.name}, {"type", p.type}, {"required", p.required}};
        if (p.default_value) jp["default"] = *p.default_value;
        params.push_back(std::move(jp));
    }
    nlohmann::json payload;
    if (const auto* f = std::get_if<FixedOutput>(&decl.behavior)) {
        payload = f->text;
    } else if (const auto* t = std::get_if<TemplateOutput>(&decl.behavior)) {
        payload = t->text;
    } else {
        const auto& tl = std::get<TableLookup>(decl.behavior);
        payload = {{"table", tl.table}};
        if (tl.fallback) payload["default"] = *tl.fallback;
    }
    return {{"name", decl.name},
            {"description", decl.description},
            {"params", std::move(params)},
            {"behavior", {{"kind", behavior_kind(decl.behavior)}, {"payload", std::move(payload)}}}};
}

nlohmann::json manifest_to_json(const std::vector<ToolDeclaration>& decls) {
    auto out = nlohmann::json::array();
    for (const auto& d : decls) out.push_back(to_json(d));
    return out;
}

std::string render_behavior(const ToolDeclaration& decl, const ToolArguments& args) {
    if (const auto* f = std::get_if<FixedOutput>(&decl.behavior)) return f->text;
    if (const auto* t = std::get_if<TemplateOutput>(&decl.behavior)) {
        std::string out;
        scan_template(t->text, [&](char c) { out.push_back(c); }, [&](const std::string& slot) {
            if (auto it = args.find(slot); it != args.end()) out += it->second;
        });
        return out;
    }
    const auto& table = std::get<TableLookup>(decl.behavior);
    const auto& key_param = decl.params.front().name;
    auto key = args.find(key_param);
    if (key == args.end())
        throw MissingArgumentError("tool '" + decl.name + "' needs argument '" + key_param + "' for its lookup");
    if (auto hit = table.table.find(key->second); hit != table.table.end()) return hit->second;
    if (table.fallback) return *table.fallback;
    throw TableKeyError("tool '" + decl.name + "' has no entry for '" + key->second + "'");
}

ToolCatalog::ToolCatalog(std::vector<ToolDeclaration> decls, std::shared_ptr<const EmbeddingProvider> provider)
    : provider_(std::move(provider)) {
    if (!provider_) throw std::invalid_argument("tool catalog needs an embedding provider");
    std::vector<std::string> descriptions;
    for (const auto& d : decls) {
        check_declaration(d);
        if (!index_.emplace(d.name, descriptions.size()).second)
            throw DuplicateToolError("duplicate tool name '" + d.name + "'");
        descriptions.push_back(d.description);
    }
    auto embeddings = provider_->embed(descriptions);
    tools_.reserve(decls.size());
    for (std::size_t i = 0; i < decls.size(); ++i) tools_.push_back({std::move(decls[i]), std::move(embeddings[i])});
}

const ToolDescriptor& ToolCatalog::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownToolError("unknown tool '" + name + "'");
    return tools_[it->second];
}

std::vector<ScoredTool> ToolCatalog::filter_by_task(const std::string& task_label, std::size_t k,
                                                    double min_sim) const {
    if (k == 0 || tools_.empty()) return {};
    const auto query = provider_->embed_one(task_label);
    std::vector<ScoredTool> scored;
    for (const auto& t : tools_) {
        double sim = cosine_similarity(query, t.embedding);
        if (sim >= min_sim) scored.push_back({&t, sim});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredTool& a, const ScoredTool& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.tool->name() < b.tool->name();
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<ScoredTool> ToolCatalog::filter_by_tasks(const std::vector<std::string>& task_labels, std::size_t k,
                                                     double min_sim) const {
    std::map<std::string, ScoredTool> best;
    for (const auto& label : task_labels) {
        for (const auto& s : filter_by_task(label, k, min_sim)) {
            auto [it, inserted] = best.emplace(s.tool->name(), s);
            if (!inserted && s.similarity > it->second.similarity) it->second = s;
        }
    }
    std::vector<ScoredTool> out;
    for (auto& [_, s] : best) out.push_back(s);
    std::sort(out.begin(), out.end(), [](const ScoredTool& a, const ScoredTool& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.tool->name() < b.tool->name();
    });
    return out;
}

ToolCall ToolCatalog::invoke(const std::string& tool_name, const ToolArguments& args) const {
    const auto& decl = at(tool_name).decl;
    ToolArguments effective = args;
    for (const auto& p : decl.params) {
        if (effective.count(p.name)) continue;
        if (p.default_value) effective.emplace(p.name, *p.default_value);
        else if (p.required)
            throw MissingArgumentError("tool '" + tool_name + "' is missing required argument '" + p.name + "'");
    }
    ToolCall call{tool_name, args, render_behavior(decl, effective), std::chrono::steady_clock::now()};
    return call;
}

ToolCatalog load_manifest(const std::string& path, std::shared_ptr<const EmbeddingProvider> provider) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestParseError("tool manifest " + path + " is not valid JSON: " + e.what());
    }
    return ToolCatalog(parse_manifest(j), std::move(provider));
}

std::vector<std::string> remove_semantic_duplicates(const std::vector<std::string>& names,
                                                    const EmbeddingProvider& provider, double threshold) {
    if (names.empty()) throw std::invalid_argument("remove_semantic_duplicates needs at least one name");
    auto embeddings = provider.embed(names);
    std::vector<std::string> unique;
    for (std::size_t i = 0; i < names.size(); ++i) {
        bool duplicate = false;
        for (std::size_t j = 0; j < i && !duplicate; ++j)
            duplicate = cosine_similarity(embeddings[i], embeddings[j]) > threshold;
        if (!duplicate) unique.push_back(names[i]);
    }
    return unique;
}

std::string tool_signature(const ToolDeclaration& decl) {
    std::string out = decl.name + "(";
    for (std::size_t i = 0; i < decl.params.size(); ++i) {
        const auto& p = decl.params[i];
        if (i) out += ", ";
        out += p.name + (p.required && !p.default_value ? "" : "?") + ": " + p.type;
    }
    return out + ")";
}

} // namespace agentgraph
