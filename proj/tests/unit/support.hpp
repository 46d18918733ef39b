#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>

#include "cpm/corpus.hpp"
#include "cpm/io.hpp"

namespace testing {

namespace fs = std::filesystem;

inline const fs::path kDataDir = CPM_DATA_DIR;
inline const fs::path kBinary = CPM_BINARY;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("cpm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) { return cpm::io::read_text_file(path); }

inline cpm::Corpus corpus_from(const std::string& text,
                               cpm::CorpusFormat format = cpm::CorpusFormat::Plain) {
  std::istringstream in(text);
  return cpm::parse_corpus(in, format);
}

/// Runs the cpm binary with `args` (already shell-quoted), returns its exit status.
inline int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      "'" + kBinary.string() + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Random column-stochastic matrix with strictly positive entries.
inline Eigen::MatrixXd random_stochastic(std::mt19937_64& rng, int N, int M) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Eigen::MatrixXd X(N, M);
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < N; ++i) X(i, j) = u(rng);
    X.col(j) /= X.col(j).sum();
  }
  return X;
}

}  // namespace testing
