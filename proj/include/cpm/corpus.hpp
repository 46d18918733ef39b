#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace cpm {

enum class CorpusFormat {
  Plain,    // one utterance per line
  Labeled,  // token<TAB>tag lines, blank-line separated, "#intent<TAB>NAME" closes a block
};

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

/// Per-token IOB slot tags and per-utterance intents. Evaluation only; fitting never reads them.
struct Labels {
  std::vector<std::vector<std::string>> slot_tags;
  std::vector<std::string> intents;
};

struct Corpus {
  std::vector<std::vector<std::string>> utterances;  // lowercased tokens
  std::vector<std::string> raw_lines;
  std::optional<Labels> labels;

  std::size_t size() const noexcept { return utterances.size(); }
  bool labeled() const noexcept { return labels.has_value(); }
};

/// Phrase (space-separated, any case) -> placeholder token.
using Lexicon = std::map<std::string, std::string>;

/// Lowercases ASCII letters and splits on whitespace. Other bytes pass through untouched.
std::vector<std::string> tokenize(std::string_view line);

Corpus parse_corpus(std::istream& in, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

Lexicon load_lexicon(const std::filesystem::path& path);

/// Longest-match, left-to-right replacement of lexicon phrases by their placeholders.
/// A replaced phrase keeps the slot tag of its first token.
Corpus delexicalize(const Corpus& corpus, const Lexicon& lexicon);
std::vector<std::string> delexicalize_tokens(const std::vector<std::string>& tokens,
                                             const Lexicon& lexicon);

std::set<std::string> load_stopwords(const std::filesystem::path& path);
Corpus remove_stopwords(const Corpus& corpus, const std::set<std::string>& stopwords);

inline constexpr std::size_t kDefaultMinFrequency = 2;

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::size_t min_frequency);

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::string& term(std::size_t id) const { return terms_.at(id); }
  std::optional<std::size_t> find(const std::string& term) const;
  std::size_t min_frequency() const noexcept { return min_frequency_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t min_frequency_ = kDefaultMinFrequency;
};

/// Terms counted over the whole corpus; those below min_frequency are excluded.
/// Order is first occurrence.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_frequency = kDefaultMinFrequency);

/// Column j is utterance kept_utterance_ids[j], as in-vocabulary term counts divided by the
/// utterance's in-vocabulary token total. Every column sums to one.
struct TermUtteranceMatrix {
  Eigen::MatrixXd X;
  std::vector<std::size_t> kept_utterance_ids;
  std::vector<std::size_t> dropped_utterance_ids;

  Eigen::Index terms() const noexcept { return X.rows(); }
  Eigen::Index utterances() const noexcept { return X.cols(); }
};

TermUtteranceMatrix build_matrix(const Corpus& corpus, const Vocabulary& vocab);

/// CSV: header row of original utterance ids, first column holds terms.
void write_matrix_csv(const std::filesystem::path& path, const TermUtteranceMatrix& matrix,
                      const Vocabulary& vocab);

}  // namespace cpm
