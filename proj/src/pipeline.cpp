#include "cpm/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpm/correlation.hpp"
#include "cpm/error.hpp"
#include "cpm/io.hpp"

namespace cpm {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Prefixes the stage name while keeping the error class that decides the exit code.
template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

std::vector<std::string> index_labels(std::size_t n, const char* prefix = "") {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = prefix + std::to_string(i);
  return out;
}

std::vector<std::string> id_labels(const std::vector<std::size_t>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(std::to_string(id));
  return out;
}

void write_json(const fs::path& path, const Json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  try {
    return Json::parse(io::read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(1, path.string() + ": " + e.what());
  }
}

Eigen::MatrixXd read_values(const fs::path& path) { return io::read_matrix_csv(path).values; }

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Json config_json(const PipelineConfig& c) {
  Json j;
  j["corpus"] = c.corpus_path.generic_string();
  j["format"] = std::string(to_string(c.format));
  j["lexicon"] = c.lexicon_path ? Json(c.lexicon_path->generic_string()) : Json(nullptr);
  j["stopwords"] = c.stopwords_path ? Json(c.stopwords_path->generic_string()) : Json(nullptr);
  j["min_freq"] = c.min_frequency;
  j["dim"] = c.dim;
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["expand"] = c.expansion_factor;
  j["max_iters"] = c.max_iterations;
  j["tol_obj"] = c.objective_tolerance;
  j["tol_con"] = c.constraint_tolerance;
  return j;
}

const std::vector<std::string> kArtifacts = {
    "vocab.json", "corpus.json", "tdm.csv", "U.csv",  "xbar.csv", "uorth.csv",
    "basis.json", "Q.csv",       "Vtilde.csv", "V.csv", "A.csv", "manifest.json"};

Eigen::MatrixXd principal_coordinates(const Eigen::MatrixXd& points, const ProjectionBasis& b) {
  return b.U.transpose() * (points.colwise() - b.x_bar);
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](const fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string(what) + " path is required");
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  require(corpus_path, "corpus");
  if (lexicon_path) require(*lexicon_path, "lexicon");
  if (stopwords_path) require(*stopwords_path, "stopword file");
  if (min_frequency < 1) throw ConfigError("min-freq must be >= 1");
  if (dim < 1) throw ConfigError("dim must be >= 1, got " + std::to_string(dim));
  mvsa().validate();
}

MvsaConfig PipelineConfig::mvsa() const {
  MvsaConfig m;
  m.K = dim + 1;
  m.expansion_factor = expansion_factor;
  m.max_iterations = max_iterations;
  m.objective_tolerance = objective_tolerance;
  m.constraint_tolerance = constraint_tolerance;
  m.rng_seed = seed;
  m.restarts = restarts;
  return m;
}

std::string PipelineConfig::canonical() const {
  const Json j = config_json(*this);
  std::string out;
  for (const auto& [key, value] : j.items()) {
    out += key + "=" + value.dump() + "\n";
  }
  return out;
}

std::vector<std::vector<std::string>> FittedPipeline::column_tokens() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(tdm.kept_utterance_ids.size());
  for (auto id : tdm.kept_utterance_ids) out.push_back(corpus.utterances.at(id));
  return out;
}

FittedPipeline fit_pipeline(const PipelineConfig& config) {
  stage("config", [&] { config.validate(); });
  FittedPipeline fp;
  stage("corpus", [&] {
    fp.corpus = load_corpus(config.corpus_path, config.format);
    if (config.lexicon_path) {
      fp.lexicon = load_lexicon(*config.lexicon_path);
      fp.corpus = delexicalize(fp.corpus, fp.lexicon);
    }
    if (config.stopwords_path) {
      auto words = load_stopwords(*config.stopwords_path);
      fp.stopwords.assign(words.begin(), words.end());
      fp.corpus = remove_stopwords(fp.corpus, words);
    }
    fp.vocab = build_vocabulary(fp.corpus, config.min_frequency);
    fp.tdm = build_matrix(fp.corpus, fp.vocab);
  });
  if (!fp.tdm.dropped_utterance_ids.empty()) {
    fp.warnings.push_back(std::to_string(fp.tdm.dropped_utterance_ids.size()) +
                          " utterance(s) had no in-vocabulary tokens and were dropped");
  }
  stage("projection", [&] {
    fp.basis = fit_projection(fp.tdm.X, config.dim);
    fp.points = project_points(fp.tdm.X, fp.basis);
  });
  if (fp.basis.orth_fallback) {
    fp.warnings.push_back("column mean lies in the principal subspace; u_orth taken from the "
                          "next singular vector");
  }
  stage("mvsa", [&] { fp.model = solve_mvsa(fp.points, fp.basis, config.mvsa()); });
  if (!fp.model.converged) {
    fp.warnings.push_back("MVSA stopped at the iteration limit before converging");
  }
  return fp;
}

FittedPipeline run_fit(const PipelineConfig& config) {
  FittedPipeline fp = fit_pipeline(config);
  stage("write", [&] {
    const fs::path& dir = config.out_dir;
    if (dir.empty()) throw ConfigError("output directory is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    Json vocab;
    vocab["min_frequency"] = fp.vocab.min_frequency();
    vocab["terms"] = fp.vocab.terms();
    write_json(dir / "vocab.json", vocab);

    Json corpus;
    corpus["format"] = std::string(to_string(config.format));
    corpus["utterances"] = fp.corpus.utterances;
    corpus["raw_lines"] = fp.corpus.raw_lines;
    if (fp.corpus.labeled()) {
      corpus["slot_tags"] = fp.corpus.labels->slot_tags;
      corpus["intents"] = fp.corpus.labels->intents;
    }
    corpus["kept_utterance_ids"] = fp.tdm.kept_utterance_ids;
    corpus["dropped_utterance_ids"] = fp.tdm.dropped_utterance_ids;
    corpus["lexicon"] = Json(fp.lexicon);
    corpus["stopwords"] = fp.stopwords;
    write_json(dir / "corpus.json", corpus);

    write_matrix_csv(dir / "tdm.csv", fp.tdm, fp.vocab);

    const auto& b = fp.basis;
    const auto terms = fp.vocab.terms();
    io::write_matrix_csv(dir / "U.csv", b.U, terms, index_labels(b.U.cols(), "u"), "term");
    io::write_matrix_csv(dir / "xbar.csv", b.x_bar, terms, {"xbar"}, "term");
    io::write_matrix_csv(dir / "uorth.csv", b.u_orth, terms, {"uorth"}, "term");
    Json basis;
    basis["N"] = b.N();
    basis["M"] = fp.tdm.utterances();
    basis["R"] = b.R;
    basis["K"] = b.K();
    basis["singular_values"] = to_std(b.singular_values);
    basis["orth_fallback"] = b.orth_fallback;
    write_json(dir / "basis.json", basis);

    const auto& m = fp.model;
    const auto K = static_cast<std::size_t>(m.K());
    const auto vertices = index_labels(K, "v");
    io::write_matrix_csv(dir / "Q.csv", m.Q, vertices, index_labels(K, "c"), "row");
    io::write_matrix_csv(dir / "Vtilde.csv", m.V_tilde, index_labels(K, "c"), vertices, "coord");
    io::write_matrix_csv(dir / "V.csv", m.V, terms, vertices, "term");
    io::write_matrix_csv(dir / "A.csv", m.A, vertices, id_labels(fp.tdm.kept_utterance_ids),
                         "vertex");

    Json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = config_json(config);
    manifest["config_hash"] = io::hex64(io::fnv1a64(config.canonical()));
    manifest["dimensions"] = {{"N", b.N()}, {"M", fp.tdm.utterances()}, {"R", b.R}, {"K", b.K()}};
    manifest["corpus"] = {{"utterances", fp.corpus.size()},
                          {"kept", fp.tdm.kept_utterance_ids.size()},
                          {"dropped", fp.tdm.dropped_utterance_ids.size()}};
    Json solver;
    solver["converged"] = m.converged;
    solver["stop_reason"] = m.stop_reason;
    solver["iterations"] = m.iterations;
    solver["repair_doublings"] = m.repair_doublings;
    solver["starts"] = m.starts;
    solver["vca_indices"] = m.vca_indices;
    solver["retained"] = m.split.retained.size();
    solver["discarded"] = m.split.discarded.size();
    solver["objective_trace"] = m.objective_trace;
    solver["min_coefficient_retained"] = m.min_coefficient_retained;
    solver["min_coefficient_discarded"] = m.min_coefficient_discarded;
    solver["reconstruction_error"] = m.reconstruction_error;
    manifest["solver"] = solver;
    manifest["warnings"] = fp.warnings;
    manifest["artifacts"] = kArtifacts;
    write_json(dir / "manifest.json", manifest);
  });
  return fp;
}

FittedPipeline load_model(const fs::path& model_dir) {
  return stage("load", [&] {
    if (!fs::is_directory(model_dir)) {
      throw IoError("model directory not found: " + model_dir.string());
    }
    for (const auto& name : kArtifacts) {
      if (!fs::exists(model_dir / name)) {
        throw IoError("model directory lacks " + name + ": " + model_dir.string());
      }
    }
    FittedPipeline fp;
    try {
      Json vocab = read_json(model_dir / "vocab.json");
      fp.vocab = Vocabulary(vocab.at("terms").get<std::vector<std::string>>(),
                            vocab.at("min_frequency").get<std::size_t>());

      Json corpus = read_json(model_dir / "corpus.json");
      fp.corpus.utterances = corpus.at("utterances").get<std::vector<std::vector<std::string>>>();
      fp.corpus.raw_lines = corpus.at("raw_lines").get<std::vector<std::string>>();
      if (corpus.contains("intents")) {
        Labels labels;
        labels.slot_tags = corpus.at("slot_tags").get<std::vector<std::vector<std::string>>>();
        labels.intents = corpus.at("intents").get<std::vector<std::string>>();
        fp.corpus.labels = std::move(labels);
      }
      fp.tdm.kept_utterance_ids = corpus.at("kept_utterance_ids").get<std::vector<std::size_t>>();
      fp.tdm.dropped_utterance_ids =
          corpus.at("dropped_utterance_ids").get<std::vector<std::size_t>>();
      fp.lexicon = corpus.at("lexicon").get<Lexicon>();
      fp.stopwords = corpus.at("stopwords").get<std::vector<std::string>>();

      Json basis = read_json(model_dir / "basis.json");
      fp.basis.R = basis.at("R").get<int>();
      fp.basis.orth_fallback = basis.at("orth_fallback").get<bool>();
      auto sv = basis.at("singular_values").get<std::vector<double>>();
      fp.basis.singular_values =
          Eigen::Map<Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));

      Json manifest = read_json(model_dir / "manifest.json");
      const Json& solver = manifest.at("solver");
      fp.model.converged = solver.at("converged").get<bool>();
      fp.model.stop_reason = solver.at("stop_reason").get<std::string>();
      fp.model.iterations = solver.at("iterations").get<int>();
      fp.model.repair_doublings = solver.at("repair_doublings").get<int>();
      fp.model.starts = solver.at("starts").get<int>();
      fp.model.objective_trace = solver.at("objective_trace").get<std::vector<double>>();
      fp.warnings = manifest.at("warnings").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(1, model_dir.string() + ": malformed model metadata: " + e.what());
    }

    fp.tdm.X = read_values(model_dir / "tdm.csv");
    fp.basis.U = read_values(model_dir / "U.csv");
    fp.basis.x_bar = read_values(model_dir / "xbar.csv").col(0);
    fp.basis.u_orth = read_values(model_dir / "uorth.csv").col(0);
    fp.basis.U_tilde.resize(fp.basis.U.rows(), fp.basis.U.cols() + 1);
    fp.basis.U_tilde << fp.basis.U, fp.basis.u_orth;
    fp.model.Q = read_values(model_dir / "Q.csv");
    fp.model.V_tilde = read_values(model_dir / "Vtilde.csv");
    fp.model.V = read_values(model_dir / "V.csv");
    fp.model.A = read_values(model_dir / "A.csv");

    if (static_cast<std::size_t>(fp.tdm.X.rows()) != fp.vocab.size() ||
        static_cast<std::size_t>(fp.tdm.X.cols()) != fp.tdm.kept_utterance_ids.size() ||
        fp.basis.U.cols() != fp.basis.R || fp.model.Q.rows() != fp.basis.K() ||
        fp.model.A.cols() != fp.tdm.X.cols()) {
      throw ShapeError("model files in " + model_dir.string() + " have inconsistent shapes");
    }
    fp.points = project_points(fp.tdm.X, fp.basis);
    return fp;
  });
}

InterpretReport run_interpret(const fs::path& model_dir, const InterpretOptions& options) {
  const FittedPipeline fp = load_model(model_dir);
  InterpretReport report;
  const int K = fp.model.K();
  const auto& ids = fp.tdm.kept_utterance_ids;

  stage("interpret", [&] {
    report.terms = top_terms(fp.model.V, fp.vocab, options.top_terms, options.ranking);
    if (report.terms.truncated) {
      report.warnings.push_back("--top-terms " + std::to_string(options.top_terms) +
                                " exceeds the vocabulary size; truncated to " +
                                std::to_string(fp.vocab.size()));
    }
    if (options.neighbors > ids.size()) {
      report.warnings.push_back("--neighbors " + std::to_string(options.neighbors) +
                                " exceeds the utterance count; truncated to " +
                                std::to_string(ids.size()));
    }
    const auto tokens = fp.column_tokens();
    for (int v = 0; v < K; ++v) {
      report.nearest.push_back(
          nearest_utterances(fp.model.V_tilde, fp.points.P_tilde, v, options.neighbors));
      if (options.patterns) {
        PatternQuery q{v, options.pattern_neighbors, options.pattern_terms, options.ranking};
        report.patterns.push_back(
            mine_vertex_patterns(fp.model, fp.points.P_tilde, tokens, fp.vocab, q));
      }
    }
    if (options.intent_table) {
      report.intent_table = intent_vertex_table(fp.model.A, fp.corpus, ids,
                                                options.intent_top_coeff, options.intent_report);
    }
    if (options.radar) report.radar = radar_export(fp.model.A, ids, *options.radar);
  });

  stage("write", [&] {
    const fs::path dir = options.out_dir.empty() ? model_dir / "interpret" : options.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    Json vertices = Json::array();
    std::ostringstream csv;
    csv << "vertex,rank,term,weight\n";
    for (int v = 0; v < K; ++v) {
      const auto vi = static_cast<std::size_t>(v);
      Json entry;
      entry["vertex"] = v;
      Json terms = Json::array();
      for (std::size_t r = 0; r < report.terms.per_vertex[vi].size(); ++r) {
        const auto& tw = report.terms.per_vertex[vi][r];
        terms.push_back({{"term", tw.term}, {"weight", tw.weight}});
        csv << v << ',' << r << ',' << io::csv_field(tw.term) << ','
            << io::format_decimal(tw.weight) << '\n';
      }
      entry["top_terms"] = terms;
      Json near = Json::array();
      for (const auto& nb : report.nearest[vi]) {
        const auto id = ids[static_cast<std::size_t>(nb.column)];
        near.push_back(
            {{"utterance_id", id}, {"distance", nb.distance}, {"text", fp.corpus.raw_lines[id]}});
      }
      entry["nearest_utterances"] = near;
      if (options.patterns) {
        Json pats = Json::array();
        for (const auto& p : report.patterns[vi]) {
          pats.push_back({{"terms", p.terms}, {"support", p.support}, {"surface", p.surface}});
        }
        entry["patterns"] = pats;
      }
      vertices.push_back(entry);
    }
    Json doc;
    doc["K"] = K;
    doc["ranking"] = options.ranking == TermRanking::Signed ? "signed" : "absolute";
    doc["vertices"] = vertices;
    doc["warnings"] = report.warnings;
    write_json(dir / "interpret.json", doc);
    io::write_text_file(dir / "top_terms.csv", csv.str());

    if (report.intent_table) {
      Json rows = Json::array();
      std::ostringstream tcsv;
      tcsv << "intent,utterances,vertex,fraction\n";
      for (const auto& row : report.intent_table->rows) {
        Json vs = Json::array();
        for (const auto& vf : row.vertices) {
          vs.push_back({{"vertex", vf.vertex}, {"fraction", vf.fraction}});
          tcsv << io::csv_field(row.intent) << ',' << row.utterances << ',' << vf.vertex << ','
               << io::format_decimal(vf.fraction) << '\n';
        }
        rows.push_back({{"intent", row.intent}, {"utterances", row.utterances}, {"vertices", vs}});
      }
      write_json(dir / "intent_table.json",
                 {{"top_coeff", report.intent_table->top_coeff}, {"intents", rows}});
      io::write_text_file(dir / "intent_table.csv", tcsv.str());
    }
    if (options.radar) {
      io::write_text_file(dir / "radar.json", radar_json(report.radar));
      io::write_text_file(dir / "radar.csv", radar_csv(report.radar));
    }
  });
  return report;
}

std::size_t run_correlate(const fs::path& model_dir, const CorrelateOptions& options) {
  const FittedPipeline fp = load_model(model_dir);
  return stage("correlate", [&] {
    if (options.out.empty()) throw ConfigError("--out is required");
    std::vector<std::vector<std::string>> utterances;
    if (options.input) {
      Corpus input = load_corpus(*options.input, CorpusFormat::Plain);
      input = delexicalize(input, fp.lexicon);
      input = remove_stopwords(input, {fp.stopwords.begin(), fp.stopwords.end()});
      utterances = std::move(input.utterances);
    } else {
      utterances = fp.corpus.utterances;
    }

    const WordVectorTable table = word_vectors(fp.model.V);
    std::string out;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      out += attention_json_line(correlate(i, utterances[i], fp.vocab, table, options.contextual));
      out += '\n';
    }
    if (options.out.has_parent_path()) fs::create_directories(options.out.parent_path());
    io::write_text_file(options.out, out);
    return utterances.size();
  });
}

void run_export(const fs::path& model_dir, const fs::path& out_dir) {
  const FittedPipeline fp = load_model(model_dir);
  stage("export", [&] {
    const fs::path dir = out_dir.empty() ? model_dir / "plot" : out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const auto R = static_cast<std::size_t>(fp.basis.R);
    const auto K = static_cast<std::size_t>(fp.model.K());
    const auto axes = index_labels(R, "pc");
    const auto ids = id_labels(fp.tdm.kept_utterance_ids);
    io::write_matrix_csv(dir / "points.csv",
                         principal_coordinates(fp.points.P, fp.basis).transpose(), ids, axes,
                         "utterance_id");
    io::write_matrix_csv(dir / "vertices.csv",
                         principal_coordinates(fp.model.V, fp.basis).transpose(),
                         index_labels(K, "v"), axes, "vertex");
    io::write_matrix_csv(dir / "coefficients.csv", fp.model.A.transpose(), ids,
                         index_labels(K, "v"), "utterance_id");
  });
}

}  // namespace cpm
