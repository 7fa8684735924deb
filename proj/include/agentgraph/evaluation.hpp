#pragma once

#include "agentgraph/backend.hpp"
#include "agentgraph/dataset.hpp"
#include "agentgraph/embedding.hpp"
#include "agentgraph/execution.hpp"
#include "agentgraph/graph.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agentgraph {

struct MatchedPair {
    std::string expected_id;
    std::string actual_id;
    double similarity = 1.0;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

struct PRF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

enum class NodeMatching { greedy, optimal };

struct EvaluationConfig {
    double theta = 0.75;
    double alpha = 1.0;
    std::size_t ged_exact_limit = 12;
    NodeMatching matching = NodeMatching::greedy;
};

/// Row-major |expected| x |actual| cosine matrix over node labels.
struct SimilarityMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Label embeddings are computed once per graph; the cosine fill is the
// parallel kernel, the serial variant is its reference.
SimilarityMatrix label_similarity_matrix(const TaskGraph& expected, const TaskGraph& actual,
                                         const EmbeddingProvider& provider);
SimilarityMatrix label_similarity_matrix_serial(const TaskGraph& expected, const TaskGraph& actual,
                                                const EmbeddingProvider& provider);

/// One-to-one node matching over pairs with similarity >= theta. Greedy takes
/// the best remaining pair each round, ties by (expected id, actual id);
/// optimal maximises the summed similarity of the accepted pairs.
MatchResult match_nodes(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims,
                        double theta, NodeMatching matching = NodeMatching::greedy);
MatchResult match_nodes(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider,
                        double theta, NodeMatching matching = NodeMatching::greedy);

/// Direction-sensitive: actual (u,v) is a hit when both ends are matched and
/// the expected graph has the edge between their partners.
MatchResult match_edges(const TaskGraph& expected, const TaskGraph& actual, const MatchResult& node_match);

/// Multiset comparison of tool names.
MatchResult match_tools(const std::vector<std::string>& expected_calls, const std::vector<std::string>& actual_calls);

/// tp=fp=fn=0 counts as a perfect score; otherwise a zero denominator gives 0.
PRF1 prf1(long tp, long fp, long fn);
inline PRF1 prf1(const MatchResult& m) { return prf1(m.tp, m.fp, m.fn); }

/// Mean over expected nodes of the best (non-negative) cosine to any actual
/// node. Throws EmptyExpectedGraphError.
double node_label_similarity(const SimilarityMatrix& sims);
double node_label_similarity(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider);

/// (node label similarity + edge F1) / 2.
double ssi(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider, double theta);

/// Shortest-path agreement over ordered pairs of matched nodes, normalised
/// by the squared number of matched nodes; 0 when nothing matched.
double path_length_similarity(const TaskGraph& expected, const TaskGraph& actual, const MatchResult& node_match,
                              double alpha);

struct GedResult {
    long cost = 0;
    bool exact = true;
};

/// Unit-cost edit distance (node insert/delete 1, substitution 0 when the
/// labels are similar enough else 1, edge insert/delete 1). Exact branch and
/// bound when |V_e| + |V_a| <= exact_limit, otherwise the cost of the
/// greedy node matching, flagged inexact.
GedResult graph_edit_distance(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims,
                              double theta, std::size_t exact_limit = 12);
GedResult graph_edit_distance(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider,
                              double theta, std::size_t exact_limit = 12);
/// The greedy-mapping upper bound on its own.
long approximate_graph_edit_distance(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims,
                                     double theta);

class AnswerJudge {
public:
    virtual ~AnswerJudge() = default;
    /// Score in [0, 1]; throws JudgeError.
    virtual double score(const std::string& gold, const std::string& actual) const = 0;
    virtual std::string judge_id() const = 0;
};

/// Token-level F1 after lowercasing and stripping punctuation.
class LexicalJudge final : public AnswerJudge {
public:
    double score(const std::string& gold, const std::string& actual) const override;
    std::string judge_id() const override { return "lexical-token-f1"; }
};

/// Asks a model for a number in [0, 1].
class BackendJudge final : public AnswerJudge {
public:
    explicit BackendJudge(ModelBackend& backend) : backend_(backend) {}
    double score(const std::string& gold, const std::string& actual) const override;
    std::string judge_id() const override { return "backend:" + backend_.backend_id(); }

private:
    ModelBackend& backend_;
};

double token_f1(const std::string& gold, const std::string& actual);
double score_answer(const std::string& gold, const std::string& actual, const AnswerJudge& judge);

struct MetricReport {
    std::string scenario;
    std::string category;
    std::optional<PRF1> node;
    std::optional<PRF1> edge;
    std::optional<PRF1> tool;
    std::optional<double> node_label_similarity;
    std::optional<double> ssi;
    std::optional<double> path_length_similarity;
    std::optional<long> ged;
    bool ged_exact = false;
    long expected_complexity = 0;
    long actual_complexity = 0;
    std::optional<double> answer_score;
    double theta = 0.0;
    double alpha = 0.0;
    std::string embedding_model;
    std::string judge;
    std::vector<MatchedPair> node_pairs;
    std::map<std::string, std::string> errors;
};

/// Every metric for one trace against its gold scenario. Failures in one
/// metric are recorded in `errors` and leave that field empty.
MetricReport evaluate_scenario(const ScenarioRecord& record, const ExecutionTrace& trace,
                               const EmbeddingProvider& provider, const EvaluationConfig& cfg,
                               const AnswerJudge& judge);

struct EvaluationInput {
    const ScenarioRecord* record;
    const ExecutionTrace* trace;
};

/// Scenario-parallel batch; the provider and judge must be thread-safe.
std::vector<MetricReport> evaluate_batch(std::span<const EvaluationInput> inputs, const EmbeddingProvider& provider,
                                         const EvaluationConfig& cfg, const AnswerJudge& judge);
std::vector<MetricReport> evaluate_batch_serial(std::span<const EvaluationInput> inputs,
                                                const EmbeddingProvider& provider, const EvaluationConfig& cfg,
                                                const AnswerJudge& judge);

nlohmann::json to_json(const MetricReport& report);
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const MetricReport& report);

} // namespace agentgraph
