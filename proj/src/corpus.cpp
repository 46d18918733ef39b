#include "cpm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cpm/error.hpp"
#include "cpm/io.hpp"

namespace cpm {
namespace {

bool is_space(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
}

char lower_ascii(char ch) {
  return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower_ascii);
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

Corpus parse_plain(std::istream& in) {
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view text = strip_cr(line);
    corpus.raw_lines.emplace_back(text);
    corpus.utterances.push_back(tokenize(text));
  }
  return corpus;
}

Corpus parse_labeled(std::istream& in) {
  Corpus corpus;
  Labels labels;
  std::vector<std::string> raw_tokens;
  std::vector<std::string> tags;
  std::size_t block_start = 0;
  std::size_t line_no = 0;
  std::string line;

  auto open_block_error = [&](std::size_t at) {
    throw FormatError(at, "labeled block starting at line " + std::to_string(block_start) +
                              " has no #intent line");
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = strip_cr(line);
    if (text.find_first_not_of(" \t") == std::string_view::npos) {
      if (!raw_tokens.empty()) open_block_error(line_no);
      continue;
    }
    if (raw_tokens.empty()) block_start = line_no;

    auto tab = text.find('\t');
    if (text.starts_with("#intent")) {
      if (tab == std::string_view::npos || tab + 1 >= text.size()) {
        throw FormatError(line_no, "expected '#intent<TAB>NAME'");
      }
      if (raw_tokens.empty()) {
        throw FormatError(line_no, "#intent line without tokens");
      }
      corpus.raw_lines.push_back(join(raw_tokens));
      std::vector<std::string> tokens;
      tokens.reserve(raw_tokens.size());
      for (const auto& t : raw_tokens) tokens.push_back(lowercase(t));
      corpus.utterances.push_back(std::move(tokens));
      labels.slot_tags.push_back(std::move(tags));
      labels.intents.emplace_back(text.substr(tab + 1));
      raw_tokens.clear();
      tags.clear();
      continue;
    }
    if (tab == std::string_view::npos || tab == 0 || tab + 1 >= text.size() ||
        text.find('\t', tab + 1) != std::string_view::npos) {
      throw FormatError(line_no, "token/tag count mismatch: expected 'token<TAB>tag'");
    }
    raw_tokens.emplace_back(text.substr(0, tab));
    tags.emplace_back(text.substr(tab + 1));
  }
  if (!raw_tokens.empty()) open_block_error(line_no);
  corpus.labels = std::move(labels);
  return corpus;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "plain") return CorpusFormat::Plain;
  if (name == "labeled") return CorpusFormat::Labeled;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (plain|labeled)");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::Plain ? "plain" : "labeled";
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(lowercase(line.substr(start, i - start)));
  }
  return tokens;
}

Corpus parse_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::Plain ? parse_plain(in) : parse_labeled(in);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open corpus " + path.string());
  }
  return parse_corpus(in, format);
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::istringstream in(io::read_text_file(path));
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = strip_cr(line);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto tab = text.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 >= text.size()) {
      throw FormatError(line_no, path.string() + ": expected 'phrase<TAB>placeholder'");
    }
    auto phrase = join(tokenize(text.substr(0, tab)));
    auto placeholder = tokenize(text.substr(tab + 1));
    if (phrase.empty() || placeholder.size() != 1) {
      throw FormatError(line_no, path.string() + ": placeholder must be a single token");
    }
    lexicon[phrase] = placeholder.front();
  }
  return lexicon;
}

namespace {

/// Lexicon phrases grouped by first token, longest first.
class PhraseMatcher {
 public:
  explicit PhraseMatcher(const Lexicon& lexicon) {
    for (const auto& [phrase, placeholder] : lexicon) {
      auto words = tokenize(phrase);
      if (words.empty()) continue;
      by_head_[words.front()].push_back({std::move(words), lowercase(placeholder)});
    }
    for (auto& [head, entries] : by_head_) {
      std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.words.size() > b.words.size();
      });
    }
  }

  /// Each output token paired with the number of source tokens it replaces.
  std::vector<std::pair<std::string, std::size_t>> scan(
      const std::vector<std::string>& tokens) const {
    std::vector<std::pair<std::string, std::size_t>> out;
    out.reserve(tokens.size());
    std::size_t i = 0;
    while (i < tokens.size()) {
      const Entry* match = nullptr;
      if (auto it = by_head_.find(tokens[i]); it != by_head_.end()) {
        for (const auto& e : it->second) {
          if (i + e.words.size() <= tokens.size() &&
              std::equal(e.words.begin(), e.words.end(),
                         tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            match = &e;
            break;
          }
        }
      }
      if (match) {
        out.emplace_back(match->placeholder, match->words.size());
        i += match->words.size();
      } else {
        out.emplace_back(tokens[i], 1);
        ++i;
      }
    }
    return out;
  }

 private:
  struct Entry {
    std::vector<std::string> words;
    std::string placeholder;
  };
  std::unordered_map<std::string, std::vector<Entry>> by_head_;
};

}  // namespace

std::vector<std::string> delexicalize_tokens(const std::vector<std::string>& tokens,
                                             const Lexicon& lexicon) {
  if (lexicon.empty()) return tokens;
  std::vector<std::string> out;
  for (auto& [tok, n] : PhraseMatcher(lexicon).scan(tokens)) out.push_back(std::move(tok));
  return out;
}

Corpus delexicalize(const Corpus& corpus, const Lexicon& lexicon) {
  if (lexicon.empty()) return corpus;
  PhraseMatcher matcher(lexicon);
  Corpus out = corpus;
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    auto scanned = matcher.scan(corpus.utterances[u]);
    std::vector<std::string> tokens;
    std::vector<std::string> tags;
    std::size_t src = 0;
    for (auto& [tok, consumed] : scanned) {
      tokens.push_back(std::move(tok));
      if (corpus.labeled()) tags.push_back(corpus.labels->slot_tags[u][src]);
      src += consumed;
    }
    out.utterances[u] = std::move(tokens);
    if (corpus.labeled()) out.labels->slot_tags[u] = std::move(tags);
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::set<std::string> words;
  for (auto& t : tokenize(io::read_text_file(path))) words.insert(std::move(t));
  return words;
}

Corpus remove_stopwords(const Corpus& corpus, const std::set<std::string>& stopwords) {
  if (stopwords.empty()) return corpus;
  Corpus out = corpus;
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    std::vector<std::string> tokens;
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < corpus.utterances[u].size(); ++i) {
      if (stopwords.count(corpus.utterances[u][i])) continue;
      tokens.push_back(corpus.utterances[u][i]);
      if (corpus.labeled()) tags.push_back(corpus.labels->slot_tags[u][i]);
    }
    out.utterances[u] = std::move(tokens);
    if (corpus.labeled()) out.labels->slot_tags[u] = std::move(tags);
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::size_t min_frequency)
    : terms_(std::move(terms)), min_frequency_(min_frequency) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw ConfigError("duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_frequency) {
  if (min_frequency < 1) {
    throw ConfigError("min_frequency must be at least 1");
  }
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& utt : corpus.utterances) {
    for (const auto& tok : utt) {
      auto [it, inserted] = counts.emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }
  std::vector<std::string> terms;
  for (auto& t : order) {
    if (counts[t] >= min_frequency) terms.push_back(std::move(t));
  }
  if (terms.empty()) {
    throw ConfigError("vocabulary is empty at min_frequency " + std::to_string(min_frequency));
  }
  return Vocabulary(std::move(terms), min_frequency);
}

TermUtteranceMatrix build_matrix(const Corpus& corpus, const Vocabulary& vocab) {
  if (vocab.empty()) {
    throw ConfigError("cannot build a term-utterance matrix over an empty vocabulary");
  }
  TermUtteranceMatrix out;
  std::vector<Eigen::VectorXd> columns;
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab.size()));
    double total = 0.0;
    for (const auto& tok : corpus.utterances[u]) {
      if (auto id = vocab.find(tok)) {
        counts(static_cast<Eigen::Index>(*id)) += 1.0;
        total += 1.0;
      }
    }
    if (total == 0.0) {
      out.dropped_utterance_ids.push_back(u);
      continue;
    }
    columns.push_back(counts / total);
    out.kept_utterance_ids.push_back(u);
  }
  if (columns.empty()) {
    throw ConfigError("every utterance is empty after vocabulary filtering");
  }
  out.X.resize(static_cast<Eigen::Index>(vocab.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) = columns[j];
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const TermUtteranceMatrix& matrix,
                      const Vocabulary& vocab) {
  std::vector<std::string> cols;
  cols.reserve(matrix.kept_utterance_ids.size());
  for (auto id : matrix.kept_utterance_ids) cols.push_back(std::to_string(id));
  io::write_matrix_csv(path, matrix.X, vocab.terms(), cols, "term");
}

}  // namespace cpm
