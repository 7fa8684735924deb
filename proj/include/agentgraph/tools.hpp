#pragma once

#include "agentgraph/embedding.hpp"

#include "json.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace agentgraph {

struct ToolParam {
    std::string name;
    std::string type = "string";
    bool required = true;
    std::optional<std::string> default_value;

    friend bool operator==(const ToolParam&, const ToolParam&) = default;
};

struct FixedOutput {
    std::string text;
    friend bool operator==(const FixedOutput&, const FixedOutput&) = default;
};

/// Text with {param} slots.
struct TemplateOutput {
    std::string text;
    friend bool operator==(const TemplateOutput&, const TemplateOutput&) = default;
};

/// Keyed on the value of the tool's first parameter.
struct TableLookup {
    std::map<std::string, std::string> table;
    std::optional<std::string> fallback;
    friend bool operator==(const TableLookup&, const TableLookup&) = default;
};

using BehaviorSpec = std::variant<FixedOutput, TemplateOutput, TableLookup>;

std::string behavior_kind(const BehaviorSpec& b);

/// One manifest entry: what a scenario declares, before any embedding.
struct ToolDeclaration {
    std::string name;
    std::string description;
    std::vector<ToolParam> params;
    BehaviorSpec behavior;

    friend bool operator==(const ToolDeclaration&, const ToolDeclaration&) = default;
};

using ToolArguments = std::map<std::string, std::string>;

struct ToolCall {
    std::string tool_name;
    ToolArguments arguments;
    std::string output;
    std::chrono::steady_clock::time_point at;
};

/// Parses and checks one manifest entry. Throws ManifestParseError or
/// BadBehaviorSpecError.
ToolDeclaration parse_tool_declaration(const nlohmann::json& entry);
/// Checks behavior/param consistency. Throws BadBehaviorSpecError.
void check_declaration(const ToolDeclaration& decl);
/// Throws ManifestParseError, DuplicateToolError or BadBehaviorSpecError.
std::vector<ToolDeclaration> parse_manifest(const nlohmann::json& manifest);
nlohmann::json to_json(const ToolDeclaration& decl);
nlohmann::json manifest_to_json(const std::vector<ToolDeclaration>& decls);

/// Evaluates a behaviour against arguments (defaults already applied).
std::string render_behavior(const ToolDeclaration& decl, const ToolArguments& args);

struct ToolDescriptor {
    ToolDeclaration decl;
    EmbeddingVector embedding;

    const std::string& name() const noexcept { return decl.name; }
    const std::string& description() const noexcept { return decl.description; }
};

struct ScoredTool {
    const ToolDescriptor* tool;
    double similarity;
};

/// Immutable after construction; every method is safe to call concurrently.
class ToolCatalog {
public:
    ToolCatalog(std::vector<ToolDeclaration> decls, std::shared_ptr<const EmbeddingProvider> provider);

    std::size_t size() const noexcept { return tools_.size(); }
    bool empty() const noexcept { return tools_.empty(); }
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    const ToolDescriptor& at(const std::string& name) const;
    /// In manifest order.
    const std::vector<ToolDescriptor>& tools() const noexcept { return tools_; }
    const EmbeddingProvider& provider() const noexcept { return *provider_; }
    std::shared_ptr<const EmbeddingProvider> provider_ptr() const noexcept { return provider_; }

    /// Tools with cosine >= min_sim to the task label, by similarity
    /// descending then name ascending, at most k of them.
    std::vector<ScoredTool> filter_by_task(const std::string& task_label, std::size_t k, double min_sim) const;
    /// Per-task filtering, unioned; each tool keeps its best similarity.
    std::vector<ScoredTool> filter_by_tasks(const std::vector<std::string>& task_labels, std::size_t k,
                                            double min_sim) const;

    /// Throws UnknownToolError, MissingArgumentError or TableKeyError.
    ToolCall invoke(const std::string& tool_name, const ToolArguments& args) const;

private:
    std::vector<ToolDescriptor> tools_;
    std::map<std::string, std::size_t> index_;
    std::shared_ptr<const EmbeddingProvider> provider_;
};

/// Reads a manifest file and embeds every description.
/// Throws ManifestParseError (also for unreadable files), DuplicateToolError
/// or BadBehaviorSpecError.
ToolCatalog load_manifest(const std::string& path, std::shared_ptr<const EmbeddingProvider> provider);

inline constexpr double default_duplicate_threshold = 0.8;

/// Keeps a name unless its cosine to some earlier input name exceeds the
/// threshold; first occurrence wins.
std::vector<std::string> remove_semantic_duplicates(const std::vector<std::string>& names,
                                                    const EmbeddingProvider& provider,
                                                    double threshold = default_duplicate_threshold);

/// "name(city: string, days?: integer)".
std::string tool_signature(const ToolDeclaration& decl);

} // namespace agentgraph
