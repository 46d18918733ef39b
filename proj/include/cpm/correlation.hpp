#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpm/corpus.hpp"

namespace cpm {

/// Row i is term i's affinity to each vertex (row i of V).
struct WordVectorTable {
  Eigen::MatrixXd vectors;      // N x K
  std::vector<bool> zero_rows;  // term has no affinity to any vertex

  std::size_t size() const noexcept { return static_cast<std::size_t>(vectors.rows()); }
};

WordVectorTable word_vectors(const Eigen::MatrixXd& V);

/// Vocabulary id per position; nullopt marks an out-of-vocabulary token.
using TokenMap = std::vector<std::optional<std::size_t>>;

TokenMap map_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab);

/// Cosine similarity of the tokens' word vectors. Positions without a usable vector
/// (out of vocabulary or zero) get 1 on the diagonal and 0 elsewhere.
Eigen::MatrixXd correlation_matrix(const TokenMap& tokens, const WordVectorTable& table);

/// Mc[i][j] = M[i][j] + M[i-1][i] M[i-1][j] + M[i+1][i] M[i+1][j], neighbours outside the
/// utterance dropped.
Eigen::MatrixXd contextual_correlation(const Eigen::MatrixXd& M);

struct Attention {
  Eigen::MatrixXd weights;                // row-stochastic
  std::vector<std::size_t> fallback_rows;  // rows that summed to zero and became uniform
};

/// Negative entries become 0, then each row is divided by its sum.
Attention attention_matrix(const Eigen::MatrixXd& M);

struct UtteranceAttention {
  std::size_t utterance_id = 0;
  std::vector<std::string> tokens;
  TokenMap token_map;
  Eigen::MatrixXd plain;
  Eigen::MatrixXd context;
  Attention attention;
};

/// Full chain for one tokenized utterance; attention comes from the contextual matrix unless
/// `contextual` is false.
UtteranceAttention correlate(std::size_t utterance_id, const std::vector<std::string>& tokens,
                             const Vocabulary& vocab, const WordVectorTable& table,
                             bool contextual = true);

/// One JSON object (no trailing newline): utterance_id, tokens, oov_mask, attention,
/// fallback_rows. Decimals carry 17 significant digits.
std::string attention_json_line(const UtteranceAttention& entry);

}  // namespace cpm
