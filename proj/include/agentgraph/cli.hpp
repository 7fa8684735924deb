#pragma once

#include "agentgraph/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace agentgraph {

// Stable exit codes shared by every command.
inline constexpr int exit_ok = 0;
inline constexpr int exit_orchestration = 2;
inline constexpr int exit_config = 3;
inline constexpr int exit_io = 4;
inline constexpr int exit_no_pairs = 5;
inline constexpr int exit_diagnostics = 6;

/// Decompose, execute, print the final answer and write the trace to
/// config.out (default "trace.json").
int cmd_run(const std::string& query, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Pairs <traces>/<name>.json with scenario <name>; writes
/// <out>/reports/<name>.json and <out>/metrics.csv (default out: "eval").
int cmd_eval(const std::filesystem::path& scenarios_dir, const std::filesystem::path& traces_dir,
             const RunConfig& config, std::ostream& out, std::ostream& err);

/// Per-category Pearson r of each metric against answer_score plus an OLS fit
/// of answer_score on `features`; prints a table and writes JSON to
/// `json_out` (default: next to the CSV as report.json).
int cmd_report(const std::filesystem::path& csv_path, const std::vector<std::string>& features,
               const std::filesystem::path& json_out, std::ostream& out, std::ostream& err);

int cmd_dataset_build(const std::filesystem::path& source_json, const std::filesystem::path& out_dir,
                      const RunConfig& config, bool use_backend, std::ostream& out, std::ostream& err);
int cmd_dataset_validate(const std::filesystem::path& root, std::ostream& out, std::ostream& err);

inline const std::vector<std::string> default_report_features = {"ssi", "node_f1", "tool_f1",
                                                                 "path_length_similarity"};

/// Header-keyed rows of an RFC 4180 CSV document. Throws ParseError.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text);

/// Analysis JSON for already-parsed metric rows; blank cells stand for
/// missing values and degenerate statistics come back as null.
nlohmann::json analyze_rows(const std::vector<std::map<std::string, std::string>>& rows,
                            const std::vector<std::string>& features);

} // namespace agentgraph
