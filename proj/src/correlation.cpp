#include "cpm/correlation.hpp"

#include <json.hpp>

#include "cpm/error.hpp"
#include "cpm/io.hpp"

namespace cpm {

WordVectorTable word_vectors(const Eigen::MatrixXd& V) {
  WordVectorTable table;
  table.vectors = V;
  table.zero_rows.resize(static_cast<std::size_t>(V.rows()));
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    table.zero_rows[static_cast<std::size_t>(i)] = V.row(i).squaredNorm() == 0.0;
  }
  return table;
}

TokenMap map_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  TokenMap out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(vocab.find(t));
  return out;
}

Eigen::MatrixXd correlation_matrix(const TokenMap& tokens, const WordVectorTable& table) {
  const auto L = static_cast<Eigen::Index>(tokens.size());
  std::vector<const std::size_t*> ids(tokens.size(), nullptr);
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    if (!tokens[p]) continue;
    if (*tokens[p] >= table.size()) {
      throw ShapeError("token id " + std::to_string(*tokens[p]) + " outside the word-vector table");
    }
    if (!table.zero_rows[*tokens[p]]) ids[p] = &*tokens[p];
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(L, L);
  for (Eigen::Index i = 0; i < L; ++i) {
    const std::size_t* a = ids[static_cast<std::size_t>(i)];
    if (!a) continue;
    const auto va = table.vectors.row(static_cast<Eigen::Index>(*a));
    for (Eigen::Index j = i + 1; j < L; ++j) {
      const std::size_t* b = ids[static_cast<std::size_t>(j)];
      if (!b) continue;
      const auto vb = table.vectors.row(static_cast<Eigen::Index>(*b));
      const double cos = *a == *b ? 1.0 : va.dot(vb) / (va.norm() * vb.norm());
      M(i, j) = cos;
      M(j, i) = cos;
    }
  }
  return M;
}

Eigen::MatrixXd contextual_correlation(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw ShapeError("correlation matrix must be square");
  const Eigen::Index L = M.rows();
  Eigen::MatrixXd Mc = M;
  for (Eigen::Index i = 0; i < L; ++i) {
    if (i > 0) Mc.row(i) += M(i - 1, i) * M.row(i - 1);
    if (i + 1 < L) Mc.row(i) += M(i + 1, i) * M.row(i + 1);
  }
  return Mc;
}

Attention attention_matrix(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw ShapeError("attention source must be square");
  const Eigen::Index L = M.rows();
  Attention out;
  out.weights = M.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < L; ++i) {
    const double s = out.weights.row(i).sum();
    if (s > 0.0) {
      out.weights.row(i) /= s;
    } else {
      out.weights.row(i).setConstant(1.0 / static_cast<double>(L));
      out.fallback_rows.push_back(static_cast<std::size_t>(i));
    }
  }
  return out;
}

UtteranceAttention correlate(std::size_t utterance_id, const std::vector<std::string>& tokens,
                             const Vocabulary& vocab, const WordVectorTable& table,
                             bool contextual) {
  UtteranceAttention out;
  out.utterance_id = utterance_id;
  out.tokens = tokens;
  out.token_map = map_tokens(tokens, vocab);
  out.plain = correlation_matrix(out.token_map, table);
  out.context = contextual_correlation(out.plain);
  out.attention = attention_matrix(contextual ? out.context : out.plain);
  return out;
}

std::string attention_json_line(const UtteranceAttention& entry) {
  std::string s = "{\"utterance_id\":" + std::to_string(entry.utterance_id) + ",\"tokens\":[";
  for (std::size_t p = 0; p < entry.tokens.size(); ++p) {
    if (p) s += ',';
    s += nlohmann::json(entry.tokens[p]).dump();
  }
  s += "],\"oov_mask\":[";
  for (std::size_t p = 0; p < entry.token_map.size(); ++p) {
    if (p) s += ',';
    s += entry.token_map[p] ? "false" : "true";
  }
  s += "],\"attention\":[";
  const Eigen::MatrixXd& W = entry.attention.weights;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    if (i) s += ',';
    s += '[';
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      if (j) s += ',';
      s += io::format_decimal(W(i, j));
    }
    s += ']';
  }
  s += "],\"fallback_rows\":[";
  for (std::size_t r = 0; r < entry.attention.fallback_rows.size(); ++r) {
    if (r) s += ',';
    s += std::to_string(entry.attention.fallback_rows[r]);
  }
  s += "]}";
  return s;
}

}  // namespace cpm
