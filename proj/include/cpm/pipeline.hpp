#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpm/corpus.hpp"
#include "cpm/interpret.hpp"
#include "cpm/mvsa.hpp"
#include "cpm/projection.hpp"

namespace cpm {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineConfig {
  std::filesystem::path corpus_path;
  CorpusFormat format = CorpusFormat::Plain;
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<std::filesystem::path> stopwords_path;
  std::size_t min_frequency = kDefaultMinFrequency;
  int dim = 2;
  double expansion_factor = 0.0;
  int max_iterations = 300;
  double objective_tolerance = 1e-9;
  double constraint_tolerance = 1e-8;
  std::uint64_t seed = 1;
  int restarts = 8;
  std::filesystem::path out_dir;

  /// ConfigError for missing paths, dim < 1 or invalid solver settings.
  void validate() const;
  MvsaConfig mvsa() const;
  /// key=value lines in a fixed order; hashed into the manifest.
  std::string canonical() const;
};

/// Everything a fit produces, in memory.
struct FittedPipeline {
  Corpus corpus;  // after delexicalization and stopword removal
  Lexicon lexicon;
  std::vector<std::string> stopwords;
  Vocabulary vocab;
  TermUtteranceMatrix tdm;
  ProjectionBasis basis;
  ProjectedPoints points;
  SimplexModel model;
  std::vector<std::string> warnings;

  /// Tokens of the utterance behind each matrix column.
  std::vector<std::vector<std::string>> column_tokens() const;
};

/// Runs every stage without touching the filesystem except to read inputs.
FittedPipeline fit_pipeline(const PipelineConfig& config);

/// fit_pipeline, then writes vocab.json, corpus.json, tdm.csv, U.csv, xbar.csv, uorth.csv,
/// basis.json, Q.csv, Vtilde.csv, V.csv, A.csv and manifest.json into config.out_dir.
FittedPipeline run_fit(const PipelineConfig& config);

/// Reads a directory written by run_fit.
FittedPipeline load_model(const std::filesystem::path& model_dir);

struct InterpretOptions {
  std::size_t top_terms = 10;
  std::size_t neighbors = 10;
  bool patterns = false;
  std::size_t pattern_neighbors = 50;
  std::size_t pattern_terms = 10;
  bool intent_table = false;
  std::size_t intent_top_coeff = 3;
  std::size_t intent_report = 5;
  std::optional<std::vector<std::size_t>> radar;
  TermRanking ranking = TermRanking::Signed;
  std::filesystem::path out_dir;
};

struct InterpretReport {
  TopTerms terms;
  std::vector<std::vector<Neighbor>> nearest;  // per vertex
  std::vector<std::vector<Pattern>> patterns;  // per vertex, empty unless requested
  std::optional<IntentVertexTable> intent_table;
  std::vector<RadarSeries> radar;
  std::vector<std::string> warnings;
};

/// Writes interpret.json and top_terms.csv, plus intent_table.{json,csv} and radar.{json,csv}
/// when requested.
InterpretReport run_interpret(const std::filesystem::path& model_dir,
                              const InterpretOptions& options);

struct CorrelateOptions {
  std::optional<std::filesystem::path> input;  // plain text; defaults to the fitted corpus
  bool contextual = true;
  std::filesystem::path out;
};

/// One JSON line per input utterance, in input order. Returns the number of lines written.
std::size_t run_correlate(const std::filesystem::path& model_dir, const CorrelateOptions& options);

/// Plot data: points.csv and vertices.csv in principal-axis coordinates, coefficients.csv.
void run_export(const std::filesystem::path& model_dir, const std::filesystem::path& out_dir);

}  // namespace cpm
