#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpm/corpus.hpp"
#include "cpm/mvsa.hpp"

namespace cpm {

enum class TermRanking { Signed, Absolute };

struct TermWeight {
  std::size_t term_id = 0;
  std::string term;
  double weight = 0.0;  // signed value of V(term, vertex), whatever the ranking
};

struct TopTerms {
  std::vector<std::vector<TermWeight>> per_vertex;
  bool truncated = false;  // k exceeded the vocabulary size
};

/// Ranks rows of V (N x K) per column. Ties go to the lower vocabulary index.
TopTerms top_terms(const Eigen::MatrixXd& V, const Vocabulary& vocab, std::size_t k,
                   TermRanking ranking = TermRanking::Signed);

struct Neighbor {
  Eigen::Index column = 0;  // column of P_tilde
  double distance = 0.0;
};

/// Columns of P_tilde ordered by Euclidean distance to V_tilde(:, vertex); ties by column.
std::vector<Neighbor> nearest_utterances(const Eigen::MatrixXd& V_tilde,
                                         const Eigen::MatrixXd& P_tilde, int vertex,
                                         std::size_t n);

struct Pattern {
  std::vector<std::string> terms;  // sorted
  std::size_t support = 0;
  std::string surface;  // in-order rendering, "..." marks skipped tokens
};

inline constexpr std::size_t kMinPatternSize = 2;
inline constexpr std::size_t kMaxPatternSize = 4;
inline constexpr std::size_t kMinPatternSupport = 2;

/// Counts subsets (size 2..4) of each utterance's token set intersected with `terms`.
/// Result is ordered by support, then size (both descending), then term list.
std::vector<Pattern> mine_patterns(const std::vector<std::vector<std::string>>& utterances,
                                   const std::vector<std::string>& terms);

struct PatternQuery {
  int vertex = 0;
  std::size_t neighbors = 50;
  std::size_t terms_per_vertex = 10;
  TermRanking ranking = TermRanking::Signed;
};

/// column_tokens[j] holds the tokens of the utterance behind column j of P_tilde.
std::vector<Pattern> mine_vertex_patterns(const SimplexModel& model,
                                          const Eigen::MatrixXd& P_tilde,
                                          const std::vector<std::vector<std::string>>& column_tokens,
                                          const Vocabulary& vocab, const PatternQuery& query);

struct VertexFrequency {
  int vertex = 0;
  double fraction = 0.0;
};

struct IntentRow {
  std::string intent;
  std::size_t utterances = 0;
  std::vector<VertexFrequency> vertices;  // at most report_vertices, fraction descending
};

struct IntentVertexTable {
  std::vector<IntentRow> rows;  // sorted by intent name
  std::size_t top_coeff = 0;
};

/// A (K x M) columns are decompositions; column_intents[j] labels column j.
IntentVertexTable intent_vertex_table(const Eigen::MatrixXd& A,
                                      const std::vector<std::string>& column_intents,
                                      std::size_t top_coeff = 3, std::size_t report_vertices = 5);

/// Same, reading intents from a labeled corpus. LabelingRequiredError when it has none.
IntentVertexTable intent_vertex_table(const Eigen::MatrixXd& A, const Corpus& corpus,
                                      const std::vector<std::size_t>& kept_utterance_ids,
                                      std::size_t top_coeff = 3, std::size_t report_vertices = 5);

/// Vertex ids with the largest coefficients, ties to the lower id.
std::vector<int> top_vertices(const Eigen::VectorXd& coefficients, std::size_t count);

struct RadarSeries {
  std::size_t utterance_id = 0;
  Eigen::VectorXd coefficients;  // K entries in vertex id order
};

/// LookupError for ids that are unknown or were dropped from the matrix.
std::vector<RadarSeries> radar_export(const Eigen::MatrixXd& A,
                                      const std::vector<std::size_t>& kept_utterance_ids,
                                      const std::vector<std::size_t>& utterance_ids);

std::string radar_json(const std::vector<RadarSeries>& series);
std::string radar_csv(const std::vector<RadarSeries>& series);

}  // namespace cpm
