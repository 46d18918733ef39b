#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cpm::io {

/// Shortest-round-trip is not enough for byte-stable exports: this always
/// renders 17 significant digits ("%.17g" semantics), independent of locale.
std::string format_decimal(double value);

/// Parses a decimal written by format_decimal (or any strtod-style number).
double parse_decimal(std::string_view text);

/// RFC 4180 quoting, only when the field needs it.
std::string csv_field(std::string_view field);
std::vector<std::string> split_csv_line(std::string_view line);

struct LabeledMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::string corner;
};

/// First row: corner cell then column labels. Each following row: label then cells.
/// LF line endings.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, std::string_view corner);

/// Convenience overload labelling rows and columns by index.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      std::string_view corner = "");

LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a; used for config fingerprints in manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace cpm::io
