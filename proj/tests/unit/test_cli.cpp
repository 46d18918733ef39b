#include <doctest.h>

#include "support.hpp"

using testing::run_cli;
using testing::TempDir;

namespace {

std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::string mini_fit_args(const std::filesystem::path& out, const std::string& dim = "2") {
  return "fit --corpus " + quote(testing::kDataDir / "mini_corpus.txt") + " --lexicon " +
         quote(testing::kDataDir / "lexicon.tsv") + " --dim " + dim + " --out " + quote(out);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  TempDir dir("cli_usage");
  CHECK(run_cli("", dir / "log") == 2);
  CHECK(run_cli("fit", dir / "log") == 2);
  CHECK(run_cli("fit --corpus x --out y --format weird", dir / "log") == 2);
  CHECK(run_cli("fit --corpus /nonexistent --out " + quote(dir / "m"), dir / "log") == 2);
  CHECK(run_cli("fit --corpus " + quote(testing::kDataDir / "mini_corpus.txt") + " --dim 0 --out " +
                    quote(dir / "m"),
                dir / "log") == 2);
  CHECK(run_cli("--version", dir / "log") == 0);
  CHECK(run_cli("--help", dir / "log") == 0);
}

TEST_CASE("data and numerical failures") {
  TempDir dir("cli_fail");
  testing::write_file(dir / "bad.tsv", "a\tO\nb\n#intent\tx\n");
  CHECK(run_cli("fit --format labeled --corpus " + quote(dir / "bad.tsv") + " --out " +
                    quote(dir / "m"),
                dir / "log") == 3);
  CHECK(testing::read_file(dir / "log").find("line 2") != std::string::npos);

  testing::write_file(dir / "low.txt", "a b\nb c\na b\nb c\n");
  CHECK(run_cli("fit --corpus " + quote(dir / "low.txt") + " --dim 2 --out " + quote(dir / "m"),
                dir / "log") == 4);
  CHECK(testing::read_file(dir / "log").find("attainable rank is 1") != std::string::npos);

  CHECK(run_cli("interpret --model " + quote(dir / "missing"), dir / "log") == 3);
}

TEST_CASE("fit, interpret, correlate and export end to end") {
  TempDir dir("cli_e2e");
  REQUIRE(run_cli(mini_fit_args(dir / "m"), dir / "log") == 0);
  CHECK(run_cli("interpret --model " + quote(dir / "m") + " --top-terms 5 --radar 0,1", dir / "log") ==
        0);
  CHECK(std::filesystem::exists(dir / "m" / "interpret" / "radar.csv"));
  CHECK(run_cli("interpret --model " + quote(dir / "m") + " --intent-table", dir / "log") == 3);
  CHECK(run_cli("interpret --model " + quote(dir / "m") + " --radar 0,x", dir / "log") == 2);
  CHECK(run_cli("interpret --model " + quote(dir / "m") + " --radar 100000", dir / "log") == 3);

  testing::write_file(dir / "in.txt", "show me flights\nwhat is ua\nfrom boston to denver\n");
  CHECK(run_cli("correlate --model " + quote(dir / "m") + " --input " + quote(dir / "in.txt") +
                    " --out " + quote(dir / "ctx.jsonl"),
                dir / "log") == 0);
  CHECK(run_cli("correlate --model " + quote(dir / "m") + " --input " + quote(dir / "in.txt") +
                    " --plain --out " + quote(dir / "plain.jsonl"),
                dir / "log") == 0);
  const std::string ctx = testing::read_file(dir / "ctx.jsonl");
  CHECK(std::count(ctx.begin(), ctx.end(), '\n') == 3);
  CHECK(ctx != testing::read_file(dir / "plain.jsonl"));
  CHECK(run_cli("correlate --model " + quote(dir / "m") + " --plain --contextual --out " +
                    quote(dir / "x.jsonl"),
                dir / "log") == 2);

  CHECK(run_cli("export --model " + quote(dir / "m"), dir / "log") == 0);
  CHECK(std::filesystem::exists(dir / "m" / "plot" / "vertices.csv"));
}

TEST_CASE("repeated fits are byte-identical") {
  TempDir dir("cli_det");
  REQUIRE(run_cli(mini_fit_args(dir / "a"), dir / "log") == 0);
  REQUIRE(run_cli(mini_fit_args(dir / "b"), dir / "log") == 0);
  for (const char* name : {"Q.csv", "V.csv", "A.csv", "tdm.csv", "manifest.json", "vocab.json"}) {
    CHECK_MESSAGE(testing::read_file(dir / "a" / name) == testing::read_file(dir / "b" / name), name);
  }
}

TEST_CASE("config file sections and environment variables") {
  TempDir dir("cli_cfg");
  testing::write_file(dir / "run.ini", "[fit]\ndim = 3\nseed = 7\n");
  REQUIRE(run_cli("--config " + quote(dir / "run.ini") + " " + mini_fit_args(dir / "m", "2"),
                  dir / "log") == 0);
  auto manifest = testing::read_file(dir / "m" / "manifest.json");
  CHECK(manifest.find("\"dim\": 2") != std::string::npos);   // command line wins
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);  // from the file

  const std::string env = "CPM_DIM=3 ";
  const std::string cmd = env + "'" + testing::kBinary.string() + "' fit --corpus " +
                          quote(testing::kDataDir / "mini_corpus.txt") + " --out " +
                          quote(dir / "e") + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(testing::read_file(dir / "e" / "manifest.json").find("\"K\": 4") != std::string::npos);
}

}  // TEST_SUITE
