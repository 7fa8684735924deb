#include "agentgraph/evaluation.hpp"
#include "agentgraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace agentgraph {

namespace {

std::vector<std::string> labels_of(const TaskGraph& g) {
    std::vector<std::string> out;
    out.reserve(g.node_count());
    for (const auto& n : g.nodes()) out.push_back(n.label);
    return out;
}

struct LabelEmbeddings {
    std::vector<EmbeddingVector> expected;
    std::vector<EmbeddingVector> actual;
};

LabelEmbeddings embed_labels(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider) {
    LabelEmbeddings e;
    if (!expected.empty()) e.expected = provider.embed(labels_of(expected));
    if (!actual.empty()) e.actual = provider.embed(labels_of(actual));
    return e;
}

// Hungarian algorithm (shortest augmenting paths), rows <= cols, minimises
// cost. Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const std::size_t m = n ? cost[0].size() : 0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j]) assignment[p[j] - 1] = j - 1;
    return assignment;
}

MatchResult finish_match(const TaskGraph& expected, const TaskGraph& actual, std::vector<MatchedPair> pairs) {
    MatchResult r;
    r.tp = static_cast<long>(pairs.size());
    r.fp = static_cast<long>(actual.node_count()) - r.tp;
    r.fn = static_cast<long>(expected.node_count()) - r.tp;
    std::sort(pairs.begin(), pairs.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return id_less(a.expected_id, b.expected_id); });
    r.pairs = std::move(pairs);
    return r;
}

// Edit cost of a complete mapping: phi[i] is the actual node for expected
// node i, or -1 when it is deleted.
long mapping_cost(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims, double theta,
                  const std::vector<int>& phi) {
    long cost = 0;
    std::vector<bool> used(actual.node_count(), false);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi[i] < 0) {
            ++cost;
        } else {
            used[phi[i]] = true;
            if (sims(i, phi[i]) < theta) ++cost;
        }
    }
    for (bool u : used)
        if (!u) ++cost;
    long matched = 0;
    for (std::size_t i = 0; i < expected.node_count(); ++i) {
        if (phi[i] < 0) continue;
        for (auto j : expected.successors(i)) {
            if (phi[j] < 0) continue;
            const auto& succ = actual.successors(phi[i]);
            if (std::find(succ.begin(), succ.end(), static_cast<std::size_t>(phi[j])) != succ.end()) ++matched;
        }
    }
    return cost + static_cast<long>(expected.edge_count() + actual.edge_count()) - 2 * matched;
}

class GedSearch {
public:
    GedSearch(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims, double theta,
              long upper_bound)
        : n_(expected.node_count()), m_(actual.node_count()), best_(upper_bound) {
        eadj_.assign(n_ * n_, false);
        aadj_.assign(m_ * m_, false);
        for (std::size_t i = 0; i < n_; ++i)
            for (auto j : expected.successors(i)) eadj_[i * n_ + j] = true;
        for (std::size_t i = 0; i < m_; ++i)
            for (auto j : actual.successors(i)) aadj_[i * m_ + j] = true;
        sub_.resize(n_ * m_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < m_; ++j) sub_[i * m_ + j] = sims(i, j) >= theta ? 0 : 1;
        phi_.assign(n_, -1);
        pre_.assign(m_, -1);
    }

    long run() {
        search(0, 0, 0);
        return best_;
    }

private:
    bool e(std::size_t a, std::size_t b) const { return eadj_[a * n_ + b]; }
    bool a(std::size_t x, std::size_t y) const { return aadj_[x * m_ + y]; }

    void search(std::size_t k, std::size_t used, long cost) {
        const long bound = cost + std::labs(static_cast<long>(n_ - k) - static_cast<long>(m_ - used));
        if (bound >= best_) return;
        if (k == n_) {
            long tail = static_cast<long>(m_ - used);
            for (std::size_t x = 0; x < m_; ++x)
                for (std::size_t y = 0; y < m_; ++y)
                    if (a(x, y) && (pre_[x] < 0 || pre_[y] < 0)) ++tail;
            best_ = std::min(best_, cost + tail);
            return;
        }
        for (std::size_t j = 0; j < m_; ++j) {
            if (pre_[j] >= 0) continue;
            long delta = sub_[k * m_ + j];
            for (std::size_t i = 0; i < k; ++i) {
                const int pi = phi_[i];
                if (e(i, k) && !(pi >= 0 && a(pi, j))) ++delta;
                if (e(k, i) && !(pi >= 0 && a(j, pi))) ++delta;
            }
            for (std::size_t y = 0; y < m_; ++y) {
                const int i = pre_[y];
                if (i < 0) continue;
                if (a(j, y) && !e(k, i)) ++delta;
                if (a(y, j) && !e(i, k)) ++delta;
            }
            phi_[k] = static_cast<int>(j);
            pre_[j] = static_cast<int>(k);
            search(k + 1, used + 1, cost + delta);
            pre_[j] = -1;
            phi_[k] = -1;
        }
        long delta = 1;
        for (std::size_t i = 0; i < k; ++i) delta += (e(i, k) ? 1 : 0) + (e(k, i) ? 1 : 0);
        search(k + 1, used, cost + delta);
    }

    std::size_t n_, m_;
    long best_;
    std::vector<bool> eadj_, aadj_;
    std::vector<int> sub_;
    std::vector<int> phi_, pre_;
};

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

template <typename T>
std::string cell(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_same_v<T, double>) return format_double(*v);
    else return std::to_string(*v);
}

} // namespace

SimilarityMatrix label_similarity_matrix(const TaskGraph& expected, const TaskGraph& actual,
                                         const EmbeddingProvider& provider) {
    const auto emb = embed_labels(expected, actual, provider);
    SimilarityMatrix s{expected.node_count(), actual.node_count(), {}};
    s.values.resize(s.rows * s.cols);
    const auto total = static_cast<std::ptrdiff_t>(s.values.size());
    const auto cols = static_cast<std::ptrdiff_t>(s.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
        s.values[k] = cosine_similarity(emb.expected[k / cols], emb.actual[k % cols]);
    }
    return s;
}

SimilarityMatrix label_similarity_matrix_serial(const TaskGraph& expected, const TaskGraph& actual,
                                                const EmbeddingProvider& provider) {
    const auto emb = embed_labels(expected, actual, provider);
    SimilarityMatrix s{expected.node_count(), actual.node_count(), {}};
    s.values.reserve(s.rows * s.cols);
    for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t j = 0; j < s.cols; ++j) s.values.push_back(cosine_similarity(emb.expected[i], emb.actual[j]));
    return s;
}

MatchResult match_nodes(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims,
                        double theta, NodeMatching matching) {
    const auto& en = expected.nodes();
    const auto& an = actual.nodes();
    std::vector<MatchedPair> pairs;
    if (matching == NodeMatching::greedy) {
        struct Candidate {
            std::size_t i, j;
            double sim;
        };
        std::vector<Candidate> candidates;
        for (std::size_t i = 0; i < sims.rows; ++i)
            for (std::size_t j = 0; j < sims.cols; ++j)
                if (sims(i, j) >= theta) candidates.push_back({i, j, sims(i, j)});
        std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.sim != b.sim) return a.sim > b.sim;
            if (en[a.i].id != en[b.i].id) return id_less(en[a.i].id, en[b.i].id);
            return id_less(an[a.j].id, an[b.j].id);
        });
        std::vector<bool> etaken(sims.rows, false), ataken(sims.cols, false);
        for (const auto& c : candidates) {
            if (etaken[c.i] || ataken[c.j]) continue;
            etaken[c.i] = ataken[c.j] = true;
            pairs.push_back({en[c.i].id, an[c.j].id, c.sim});
        }
    } else if (sims.rows > 0 && sims.cols > 0) {
        const bool transpose = sims.rows > sims.cols;
        const auto r = transpose ? sims.cols : sims.rows;
        const auto c = transpose ? sims.rows : sims.cols;
        std::vector<std::vector<double>> cost(r, std::vector<double>(c));
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                double s = transpose ? sims(j, i) : sims(i, j);
                cost[i][j] = s >= theta ? -s : 0.0;
            }
        }
        auto assignment = hungarian(cost);
        for (std::size_t i = 0; i < r; ++i) {
            auto ei = transpose ? assignment[i] : i;
            auto aj = transpose ? i : assignment[i];
            if (sims(ei, aj) >= theta) pairs.push_back({en[ei].id, an[aj].id, sims(ei, aj)});
        }
    }
    return finish_match(expected, actual, std::move(pairs));
}

MatchResult match_nodes(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider,
                        double theta, NodeMatching matching) {
    return match_nodes(expected, actual, label_similarity_matrix(expected, actual, provider), theta, matching);
}

MatchResult match_edges(const TaskGraph& expected, const TaskGraph& actual, const MatchResult& node_match) {
    std::map<std::string, std::string> to_expected;
    for (const auto& p : node_match.pairs) to_expected.emplace(p.actual_id, p.expected_id);
    MatchResult r;
    for (const auto& edge : actual.edges()) {
        auto f = to_expected.find(edge.from);
        auto t = to_expected.find(edge.to);
        if (f != to_expected.end() && t != to_expected.end() && expected.has_edge(f->second, t->second)) {
            ++r.tp;
            r.pairs.push_back({f->second + "->" + t->second, edge.from + "->" + edge.to, 1.0});
        } else {
            ++r.fp;
        }
    }
    r.fn = static_cast<long>(expected.edge_count()) - r.tp;
    return r;
}

MatchResult match_tools(const std::vector<std::string>& expected_calls, const std::vector<std::string>& actual_calls) {
    std::map<std::string, std::pair<long, long>> counts;
    for (const auto& n : expected_calls) ++counts[n].first;
    for (const auto& n : actual_calls) ++counts[n].second;
    MatchResult r;
    for (const auto& [name, c] : counts) {
        const auto hit = std::min(c.first, c.second);
        r.tp += hit;
        r.fn += c.first - hit;
        r.fp += c.second - hit;
        for (long k = 0; k < hit; ++k) r.pairs.push_back({name, name, 1.0});
    }
    return r;
}

PRF1 prf1(long tp, long fp, long fn) {
    if (tp < 0 || fp < 0 || fn < 0) throw std::invalid_argument("match counts must be non-negative");
    if (tp == 0 && fp == 0 && fn == 0) return {1.0, 1.0, 1.0};
    PRF1 s;
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

double node_label_similarity(const SimilarityMatrix& sims) {
    if (sims.rows == 0) throw EmptyExpectedGraphError("node label similarity needs a non-empty expected graph");
    double total = 0.0;
    for (std::size_t i = 0; i < sims.rows; ++i) {
        double best = 0.0;
        for (std::size_t j = 0; j < sims.cols; ++j) best = std::max(best, sims(i, j));
        total += best;
    }
    return total / static_cast<double>(sims.rows);
}

double node_label_similarity(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider) {
    if (expected.empty()) throw EmptyExpectedGraphError("node label similarity needs a non-empty expected graph");
    return node_label_similarity(label_similarity_matrix(expected, actual, provider));
}

double ssi(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider, double theta) {
    if (expected.empty()) throw EmptyExpectedGraphError("SSI needs a non-empty expected graph");
    const auto sims = label_similarity_matrix(expected, actual, provider);
    const auto nodes = match_nodes(expected, actual, sims, theta);
    return (node_label_similarity(sims) + prf1(match_edges(expected, actual, nodes)).f1) / 2.0;
}

double path_length_similarity(const TaskGraph& expected, const TaskGraph& actual, const MatchResult& node_match,
                              double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const auto m = node_match.pairs.size();
    if (m == 0) return 0.0;
    std::vector<std::size_t> ei(m), ai(m);
    for (std::size_t k = 0; k < m; ++k) {
        ei[k] = *expected.index_of(node_match.pairs[k].expected_id);
        ai[k] = *actual.index_of(node_match.pairs[k].actual_id);
    }
    double total = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
        const auto de = shortest_path_lengths(expected, ei[u]);
        const auto da = shortest_path_lengths(actual, ai[u]);
        for (std::size_t v = 0; v < m; ++v) {
            const int d1 = de[ei[v]];
            const int d2 = da[ai[v]];
            if (d1 < 0 && d2 < 0) total += 1.0;
            else if (d1 >= 0 && d2 >= 0) total += std::exp(-alpha * std::abs(d1 - d2));
        }
    }
    return total / static_cast<double>(m * m);
}

long approximate_graph_edit_distance(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims,
                                     double theta) {
    const auto match = match_nodes(expected, actual, sims, theta);
    std::vector<int> phi(expected.node_count(), -1);
    for (const auto& p : match.pairs) phi[*expected.index_of(p.expected_id)] = static_cast<int>(*actual.index_of(p.actual_id));
    return mapping_cost(expected, actual, sims, theta, phi);
}

GedResult graph_edit_distance(const TaskGraph& expected, const TaskGraph& actual, const SimilarityMatrix& sims,
                              double theta, std::size_t exact_limit) {
    const long upper = approximate_graph_edit_distance(expected, actual, sims, theta);
    if (expected.node_count() + actual.node_count() > exact_limit) return {upper, false};
    // best_ starts one above the known solution so that an equal-cost path is
    // still accepted by the strict bound check
    GedSearch search(expected, actual, sims, theta, upper + 1);
    return {std::min(upper, search.run()), true};
}

GedResult graph_edit_distance(const TaskGraph& expected, const TaskGraph& actual, const EmbeddingProvider& provider,
                              double theta, std::size_t exact_limit) {
    return graph_edit_distance(expected, actual, label_similarity_matrix(expected, actual, provider), theta, exact_limit);
}

double token_f1(const std::string& gold, const std::string& actual) {
    auto g = tokenize(gold);
    auto a = tokenize(actual);
    if (g.empty() && a.empty()) return 1.0;
    if (g.empty() || a.empty()) return 0.0;
    std::map<std::string, long> counts;
    for (const auto& t : g) ++counts[t];
    long common = 0;
    for (const auto& t : a) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double p = static_cast<double>(common) / static_cast<double>(a.size());
    const double r = static_cast<double>(common) / static_cast<double>(g.size());
    return 2.0 * p * r / (p + r);
}

double LexicalJudge::score(const std::string& gold, const std::string& actual) const { return token_f1(gold, actual); }

double BackendJudge::score(const std::string& gold, const std::string& actual) const {
    const std::string prompt =
        "Rate how well the candidate answer matches the reference answer on a scale from 0 to 1.\n"
        "Reply with the number only.\n\nReference: " + gold + "\n\nCandidate: " + actual + "\n";
    std::string reply;
    try {
        reply = std::string(trim(backend_.complete(prompt)));
    } catch (const BackendError& e) {
        throw JudgeError(std::string("judge backend failed: ") + e.what());
    }
    try {
        std::size_t used = 0;
        double v = std::stod(reply, &used);
        if (used != reply.size() || !(v >= 0.0 && v <= 1.0)) throw std::out_of_range("score");
        return v;
    } catch (const std::logic_error&) {
        throw JudgeError("judge replied with something other than a score in [0, 1]: '" + reply + "'");
    }
}

double score_answer(const std::string& gold, const std::string& actual, const AnswerJudge& judge) {
    if (gold.empty()) throw std::invalid_argument("gold response must be non-empty");
    return std::clamp(judge.score(gold, actual), 0.0, 1.0);
}

MetricReport evaluate_scenario(const ScenarioRecord& record, const ExecutionTrace& trace,
                               const EmbeddingProvider& provider, const EvaluationConfig& cfg,
                               const AnswerJudge& judge) {
    MetricReport rep;
    rep.scenario = record.name;
    rep.category = to_string(record.category);
    rep.theta = cfg.theta;
    rep.alpha = cfg.alpha;
    rep.embedding_model = provider.model_id();
    rep.judge = judge.judge_id();
    const auto& expected = record.expected_graph;
    const auto& actual = trace.graph;
    rep.expected_complexity = complexity_score(expected);
    rep.actual_complexity = complexity_score(actual);

    rep.tool = prf1(match_tools(record.expected_tool_calls, trace.tool_call_names()));

    try {
        const auto sims = label_similarity_matrix(expected, actual, provider);
        const auto nodes = match_nodes(expected, actual, sims, cfg.theta, cfg.matching);
        rep.node_pairs = nodes.pairs;
        rep.node = prf1(nodes);
        rep.edge = prf1(match_edges(expected, actual, nodes));
        rep.path_length_similarity = path_length_similarity(expected, actual, nodes, cfg.alpha);
        const auto ged = graph_edit_distance(expected, actual, sims, cfg.theta, cfg.ged_exact_limit);
        rep.ged = ged.cost;
        rep.ged_exact = ged.exact;
        try {
            rep.node_label_similarity = node_label_similarity(sims);
            rep.ssi = (*rep.node_label_similarity + rep.edge->f1) / 2.0;
        } catch (const Error& e) {
            rep.errors["node_label_similarity"] = e.what();
            rep.errors["ssi"] = e.what();
        }
    } catch (const std::exception& e) {
        rep.errors["graph"] = e.what();
    }

    try {
        rep.answer_score = score_answer(record.gold_response, trace.final_answer, judge);
    } catch (const std::exception& e) {
        rep.errors["answer_score"] = e.what();
    }
    return rep;
}

std::vector<MetricReport> evaluate_batch(std::span<const EvaluationInput> inputs, const EmbeddingProvider& provider,
                                         const EvaluationConfig& cfg, const AnswerJudge& judge) {
    std::vector<MetricReport> out(inputs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(inputs.size()); ++i) {
        out[i] = evaluate_scenario(*inputs[i].record, *inputs[i].trace, provider, cfg, judge);
    }
    return out;
}

std::vector<MetricReport> evaluate_batch_serial(std::span<const EvaluationInput> inputs,
                                                const EmbeddingProvider& provider, const EvaluationConfig& cfg,
                                                const AnswerJudge& judge) {
    std::vector<MetricReport> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(evaluate_scenario(*in.record, *in.trace, provider, cfg, judge));
    return out;
}

nlohmann::json to_json(const MetricReport& r) {
    const auto prf = [](const std::optional<PRF1>& s) -> nlohmann::json {
        if (!s) return nullptr;
        return {{"precision", s->precision}, {"recall", s->recall}, {"f1", s->f1}};
    };
    const auto opt = [](const auto& v) -> nlohmann::json {
        if (!v) return nullptr;
        return *v;
    };
    auto pairs = nlohmann::json::array();
    for (const auto& p : r.node_pairs)
        pairs.push_back({{"expected", p.expected_id}, {"actual", p.actual_id}, {"similarity", p.similarity}});
    return {
        {"scenario", r.scenario},
        {"category", r.category},
        {"node", prf(r.node)},
        {"edge", prf(r.edge)},
        {"tool", prf(r.tool)},
        {"node_label_similarity", opt(r.node_label_similarity)},
        {"ssi", opt(r.ssi)},
        {"path_length_similarity", opt(r.path_length_similarity)},
        {"ged", opt(r.ged)},
        {"ged_exact", r.ged_exact},
        {"expected_complexity", r.expected_complexity},
        {"actual_complexity", r.actual_complexity},
        {"answer_score", opt(r.answer_score)},
        {"theta", r.theta},
        {"alpha", r.alpha},
        {"embedding_model", r.embedding_model},
        {"judge", r.judge},
        {"node_pairs", std::move(pairs)},
        {"errors", r.errors},
    };
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> columns = {
        "scenario",       "category",       "node_precision",        "node_recall",
        "node_f1",        "edge_precision", "edge_recall",           "edge_f1",
        "tool_precision", "tool_recall",    "tool_f1",               "node_label_similarity",
        "ssi",            "path_length_similarity", "ged",           "ged_exact",
        "expected_complexity", "actual_complexity", "answer_score",  "theta",
        "alpha",          "embedding_model",
    };
    return columns;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

std::string csv_row(const MetricReport& r) {
    const auto p = [](const std::optional<PRF1>& s, double PRF1::*field) {
        return s ? format_double((*s).*field) : std::string();
    };
    std::vector<std::string> cells = {
        csv_escape(r.scenario),
        csv_escape(r.category),
        p(r.node, &PRF1::precision),
        p(r.node, &PRF1::recall),
        p(r.node, &PRF1::f1),
        p(r.edge, &PRF1::precision),
        p(r.edge, &PRF1::recall),
        p(r.edge, &PRF1::f1),
        p(r.tool, &PRF1::precision),
        p(r.tool, &PRF1::recall),
        p(r.tool, &PRF1::f1),
        cell(r.node_label_similarity),
        cell(r.ssi),
        cell(r.path_length_similarity),
        cell(r.ged),
        r.ged ? (r.ged_exact ? "true" : "false") : "",
        std::to_string(r.expected_complexity),
        std::to_string(r.actual_complexity),
        cell(r.answer_score),
        format_double(r.theta),
        format_double(r.alpha),
        csv_escape(r.embedding_model),
    };
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    return out;
}

} // namespace agentgraph
