// Command-line front end: fit, interpret, correlate, export.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpm/error.hpp"
#include "cpm/pipeline.hpp"

namespace {

std::vector<std::size_t> parse_ids(const std::string& text) {
  std::vector<std::size_t> ids;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.front() == '-') {
      throw cpm::ConfigError("--radar expects comma-separated utterance ids, got '" + item + "'");
    }
    ids.push_back(static_cast<std::size_t>(v));
  }
  return ids;
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex polytopic model toolkit"};
  app.set_version_flag("--version", cpm::kVersion);
  app.set_config("--config", "", "key=value file; flags given on the command line win");
  app.require_subcommand(1);

  cpm::PipelineConfig fit_cfg;
  std::string format = "plain";
  std::string lexicon, stopwords;
  auto* fit = app.add_subcommand("fit", "Fit a simplex model to a corpus");
  fit->add_option("--corpus", fit_cfg.corpus_path, "Corpus file")->required()->envname("CPM_CORPUS");
  fit->add_option("--format", format, "plain or labeled")
      ->check(CLI::IsMember({"plain", "labeled"}))
      ->envname("CPM_FORMAT");
  fit->add_option("--lexicon", lexicon, "phrase<TAB>placeholder file")->envname("CPM_LEXICON");
  fit->add_option("--stopwords", stopwords, "one stopword per line")->envname("CPM_STOPWORDS");
  fit->add_option("--min-freq", fit_cfg.min_frequency, "vocabulary frequency threshold")
      ->envname("CPM_MIN_FREQ");
  fit->add_option("--dim", fit_cfg.dim, "subspace dimension R (K = R + 1 vertices)")
      ->envname("CPM_DIM");
  fit->add_option("--seed", fit_cfg.seed, "VCA seed")->envname("CPM_SEED");
  fit->add_option("--restarts", fit_cfg.restarts, "VCA starts tried, best simplex kept")
      ->envname("CPM_RESTARTS");
  fit->add_option("--expand", fit_cfg.expansion_factor, "start simplex inflation, 0 = off")
      ->envname("CPM_EXPAND");
  fit->add_option("--max-iters", fit_cfg.max_iterations)->envname("CPM_MAX_ITERS");
  fit->add_option("--tol-obj", fit_cfg.objective_tolerance)->envname("CPM_TOL_OBJ");
  fit->add_option("--tol-con", fit_cfg.constraint_tolerance)->envname("CPM_TOL_CON");
  fit->add_option("--out", fit_cfg.out_dir, "model directory")->required()->envname("CPM_OUT");

  std::filesystem::path model_dir;
  cpm::InterpretOptions iopt;
  std::string radar;
  bool abs_weights = false;
  auto* interp = app.add_subcommand("interpret", "Vertex terms, neighbours, patterns, tables");
  interp->add_option("--model", model_dir, "model directory")->required()->envname("CPM_MODEL");
  interp->add_option("--top-terms", iopt.top_terms)->envname("CPM_TOP_TERMS");
  interp->add_option("--neighbors", iopt.neighbors)->envname("CPM_NEIGHBORS");
  interp->add_flag("--patterns", iopt.patterns, "mine term combinations per vertex");
  interp->add_option("--pattern-neighbors", iopt.pattern_neighbors);
  interp->add_option("--pattern-terms", iopt.pattern_terms);
  interp->add_flag("--intent-table", iopt.intent_table, "needs a labeled corpus");
  interp->add_option("--radar", radar, "comma-separated utterance ids");
  interp->add_flag("--abs-weights", abs_weights, "rank top terms by absolute weight");
  interp->add_option("--out", iopt.out_dir, "report directory (default MODEL/interpret)");

  cpm::CorrelateOptions copt;
  std::string input;
  bool plain = false;
  auto* corr = app.add_subcommand("correlate", "Word correlation and attention matrices");
  corr->add_option("--model", model_dir, "model directory")->required()->envname("CPM_MODEL");
  corr->add_option("--input", input, "plain-text utterances (default: the fitted corpus)");
  auto* plain_flag = corr->add_flag("--plain", plain, "attention from the plain cosine matrix");
  corr->add_flag("--contextual", "attention from the contextual matrix (default)")
      ->excludes(plain_flag);
  corr->add_option("--out", copt.out, "JSON-lines file")->required();

  std::filesystem::path export_dir;
  auto* exp = app.add_subcommand("export", "Plot data for points, vertices and coefficients");
  exp->add_option("--model", model_dir, "model directory")->required()->envname("CPM_MODEL");
  exp->add_option("--out", export_dir, "plot directory (default MODEL/plot)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cpm::exit_code(cpm::ErrorKind::Config);
  }

  try {
    if (*fit) {
      fit_cfg.format = cpm::parse_corpus_format(format);
      if (!lexicon.empty()) fit_cfg.lexicon_path = lexicon;
      if (!stopwords.empty()) fit_cfg.stopwords_path = stopwords;
      auto fp = cpm::run_fit(fit_cfg);
      warn(fp.warnings);
      std::cout << "fit: N=" << fp.vocab.size() << " M=" << fp.tdm.utterances()
                << " K=" << fp.model.K() << " iterations=" << fp.model.iterations
                << " stop=" << fp.model.stop_reason << " -> " << fit_cfg.out_dir.string()
                << '\n';
    } else if (*interp) {
      if (!radar.empty()) iopt.radar = parse_ids(radar);
      iopt.ranking = abs_weights ? cpm::TermRanking::Absolute : cpm::TermRanking::Signed;
      auto report = cpm::run_interpret(model_dir, iopt);
      warn(report.warnings);
      std::cout << "interpret: " << report.terms.per_vertex.size() << " vertices -> "
                << (iopt.out_dir.empty() ? model_dir / "interpret" : iopt.out_dir).string()
                << '\n';
    } else if (*corr) {
      if (!input.empty()) copt.input = input;
      copt.contextual = !plain;
      auto n = cpm::run_correlate(model_dir, copt);
      std::cout << "correlate: " << n << " utterances -> " << copt.out.string() << '\n';
    } else if (*exp) {
      cpm::run_export(model_dir, export_dir);
      std::cout << "export: -> " << (export_dir.empty() ? model_dir / "plot" : export_dir).string()
                << '\n';
    }
  } catch (const cpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cpm::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cpm::exit_code(cpm::ErrorKind::Data);
  }
  return 0;
}
