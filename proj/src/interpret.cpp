#include "cpm/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cpm/error.hpp"
#include "cpm/io.hpp"

namespace cpm {
namespace {

std::string render_surface(const std::vector<std::string>& tokens,
                           const std::vector<std::string>& subset) {
  std::string out;
  bool gap = false;
  for (const auto& tok : tokens) {
    if (!std::binary_search(subset.begin(), subset.end(), tok)) {
      gap = !out.empty();
      continue;
    }
    if (!out.empty()) out += gap ? " ... " : " ";
    out += tok;
    gap = false;
  }
  return out;
}

void for_each_subset(const std::vector<std::string>& items, std::size_t size,
                     const std::function<void(const std::vector<std::string>&)>& fn) {
  if (size > items.size()) return;
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::string> subset(size);
  for (;;) {
    for (std::size_t i = 0; i < size; ++i) subset[i] = items[idx[i]];
    fn(subset);
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == items.size() - size + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

TopTerms top_terms(const Eigen::MatrixXd& V, const Vocabulary& vocab, std::size_t k,
                   TermRanking ranking) {
  if (static_cast<std::size_t>(V.rows()) != vocab.size()) {
    throw ShapeError("vertex matrix has " + std::to_string(V.rows()) + " rows, vocabulary has " +
                     std::to_string(vocab.size()) + " terms");
  }
  TopTerms out;
  const std::size_t n = vocab.size();
  if (k > n) {
    out.truncated = true;
    k = n;
  }
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    auto key = [&](std::size_t i) {
      double w = V(static_cast<Eigen::Index>(i), j);
      return ranking == TermRanking::Absolute ? std::abs(w) : w;
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
    std::vector<TermWeight> list;
    list.reserve(k);
    for (std::size_t r = 0; r < k; ++r) {
      list.push_back({order[r], vocab.term(order[r]), V(static_cast<Eigen::Index>(order[r]), j)});
    }
    out.per_vertex.push_back(std::move(list));
  }
  return out;
}

std::vector<Neighbor> nearest_utterances(const Eigen::MatrixXd& V_tilde,
                                         const Eigen::MatrixXd& P_tilde, int vertex,
                                         std::size_t n) {
  if (vertex < 0 || vertex >= V_tilde.cols()) {
    throw LookupError("vertex " + std::to_string(vertex) + " out of range (K=" +
                      std::to_string(V_tilde.cols()) + ")");
  }
  if (V_tilde.rows() != P_tilde.rows()) {
    throw ShapeError("vertices and points use different coordinate dimensions");
  }
  std::vector<Neighbor> all(static_cast<std::size_t>(P_tilde.cols()));
  for (Eigen::Index j = 0; j < P_tilde.cols(); ++j) {
    all[static_cast<std::size_t>(j)] = {j, (P_tilde.col(j) - V_tilde.col(vertex)).norm()};
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; });
  all.resize(std::min(n, all.size()));
  return all;
}

std::vector<Pattern> mine_patterns(const std::vector<std::vector<std::string>>& utterances,
                                   const std::vector<std::string>& terms) {
  const std::set<std::string> wanted(terms.begin(), terms.end());
  struct Tally {
    std::size_t support = 0;
    std::map<std::string, std::size_t> surfaces;
  };
  std::map<std::vector<std::string>, Tally> counts;

  for (const auto& tokens : utterances) {
    std::set<std::string> present;
    for (const auto& t : tokens) {
      if (wanted.count(t)) present.insert(t);
    }
    const std::vector<std::string> items(present.begin(), present.end());
    for (std::size_t size = kMinPatternSize; size <= kMaxPatternSize; ++size) {
      for_each_subset(items, size, [&](const std::vector<std::string>& subset) {
        Tally& t = counts[subset];
        ++t.support;
        ++t.surfaces[render_surface(tokens, subset)];
      });
    }
  }

  std::vector<Pattern> out;
  for (auto& [subset, tally] : counts) {
    if (tally.support < kMinPatternSupport) continue;
    // Most frequent realization; std::map order settles ties lexicographically.
    auto best = tally.surfaces.begin();
    for (auto it = tally.surfaces.begin(); it != tally.surfaces.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    out.push_back({subset, tally.support, best->first});
  }
  std::stable_sort(out.begin(), out.end(), [](const Pattern& a, const Pattern& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.terms.size() != b.terms.size()) return a.terms.size() > b.terms.size();
    return a.terms < b.terms;
  });
  return out;
}

std::vector<Pattern> mine_vertex_patterns(const SimplexModel& model,
                                          const Eigen::MatrixXd& P_tilde,
                                          const std::vector<std::vector<std::string>>& column_tokens,
                                          const Vocabulary& vocab, const PatternQuery& query) {
  if (static_cast<Eigen::Index>(column_tokens.size()) != P_tilde.cols()) {
    throw ShapeError("token lists do not match the number of points");
  }
  if (model.V.size() == 0) throw ShapeError("model has no lifted vertices");
  auto neighbors = nearest_utterances(model.V_tilde, P_tilde, query.vertex, query.neighbors);
  auto terms = top_terms(model.V, vocab, query.terms_per_vertex, query.ranking);

  std::vector<std::string> top;
  for (const auto& tw : terms.per_vertex[static_cast<std::size_t>(query.vertex)]) {
    top.push_back(tw.term);
  }
  std::vector<std::vector<std::string>> near;
  near.reserve(neighbors.size());
  for (const auto& nb : neighbors) near.push_back(column_tokens[static_cast<std::size_t>(nb.column)]);
  return mine_patterns(near, top);
}

std::vector<int> top_vertices(const Eigen::VectorXd& coefficients, std::size_t count) {
  std::vector<int> order(static_cast<std::size_t>(coefficients.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return coefficients(a) > coefficients(b); });
  order.resize(std::min(count, order.size()));
  return order;
}

IntentVertexTable intent_vertex_table(const Eigen::MatrixXd& A,
                                      const std::vector<std::string>& column_intents,
                                      std::size_t top_coeff, std::size_t report_vertices) {
  if (static_cast<Eigen::Index>(column_intents.size()) != A.cols()) {
    throw ShapeError("intent list does not match the coefficient columns");
  }
  const auto K = static_cast<std::size_t>(A.rows());
  std::map<std::string, std::pair<std::size_t, std::vector<std::size_t>>> tally;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    auto& [size, marks] = tally[column_intents[static_cast<std::size_t>(j)]];
    if (marks.empty()) marks.assign(K, 0);
    ++size;
    for (int v : top_vertices(A.col(j), top_coeff)) ++marks[static_cast<std::size_t>(v)];
  }

  IntentVertexTable table;
  table.top_coeff = std::min(top_coeff, K);
  for (const auto& [intent, entry] : tally) {
    const auto& [size, marks] = entry;
    IntentRow row{intent, size, {}};
    for (std::size_t v = 0; v < K; ++v) {
      if (marks[v] > 0) {
        row.vertices.push_back(
            {static_cast<int>(v), static_cast<double>(marks[v]) / static_cast<double>(size)});
      }
    }
    std::stable_sort(row.vertices.begin(), row.vertices.end(),
                     [](const VertexFrequency& a, const VertexFrequency& b) {
                       return a.fraction > b.fraction;
                     });
    if (row.vertices.size() > report_vertices) row.vertices.resize(report_vertices);
    table.rows.push_back(std::move(row));
  }
  return table;
}

IntentVertexTable intent_vertex_table(const Eigen::MatrixXd& A, const Corpus& corpus,
                                      const std::vector<std::size_t>& kept_utterance_ids,
                                      std::size_t top_coeff, std::size_t report_vertices) {
  if (!corpus.labeled()) {
    throw LabelingRequiredError("intent table needs a labeled corpus (--format labeled)");
  }
  std::vector<std::string> intents;
  intents.reserve(kept_utterance_ids.size());
  for (std::size_t id : kept_utterance_ids) intents.push_back(corpus.labels->intents.at(id));
  return intent_vertex_table(A, intents, top_coeff, report_vertices);
}

std::vector<RadarSeries> radar_export(const Eigen::MatrixXd& A,
                                      const std::vector<std::size_t>& kept_utterance_ids,
                                      const std::vector<std::size_t>& utterance_ids) {
  std::map<std::size_t, Eigen::Index> column_of;
  for (std::size_t j = 0; j < kept_utterance_ids.size(); ++j) {
    column_of[kept_utterance_ids[j]] = static_cast<Eigen::Index>(j);
  }
  std::vector<RadarSeries> out;
  for (std::size_t id : utterance_ids) {
    auto it = column_of.find(id);
    if (it == column_of.end()) {
      throw LookupError("utterance " + std::to_string(id) +
                        " is not in the model (unknown or dropped by vocabulary filtering)");
    }
    out.push_back({id, A.col(it->second)});
  }
  return out;
}

std::string radar_json(const std::vector<RadarSeries>& series) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : series) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < s.coefficients.size(); ++k) {
      points.push_back({{"vertex", k}, {"coefficient", s.coefficients(k)}});
    }
    arr.push_back({{"utterance_id", s.utterance_id}, {"series", points}});
  }
  return arr.dump(2) + "\n";
}

std::string radar_csv(const std::vector<RadarSeries>& series) {
  std::ostringstream os;
  os << "utterance_id,vertex,coefficient\n";
  for (const auto& s : series) {
    for (Eigen::Index k = 0; k < s.coefficients.size(); ++k) {
      os << s.utterance_id << ',' << k << ',' << io::format_decimal(s.coefficients(k)) << '\n';
    }
  }
  return os.str();
}

}  // namespace cpm
