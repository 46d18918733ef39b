#include "cpm/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cpm/error.hpp"

namespace cpm::io {

std::string format_decimal(double value) {
  if (!std::isfinite(value)) {
    throw NumericalError("cannot export non-finite value");
  }
  if (value == 0.0) {
    value = 0.0;  // folds -0 into 0
  }
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) {
    throw NumericalError("decimal formatting failed");
  }
  return std::string(buf.data(), end);
}

double parse_decimal(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') {
    ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw FormatError(0, "not a decimal number: '" + std::string(text) + "'");
  }
  return value;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') {
      out += '"';
    }
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, std::string_view corner) {
  if (row_labels.size() != static_cast<std::size_t>(values.rows()) ||
      col_labels.size() != static_cast<std::size_t>(values.cols())) {
    throw ShapeError("CSV labels do not match matrix shape");
  }
  std::string out = csv_field(corner);
  for (const auto& c : col_labels) {
    out += ',';
    out += csv_field(c);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out += csv_field(row_labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      out += ',';
      out += format_decimal(values(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      std::string_view corner) {
  std::vector<std::string> rows(static_cast<std::size_t>(values.rows()));
  std::vector<std::string> cols(static_cast<std::size_t>(values.cols()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = std::to_string(i);
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = std::to_string(j);
  write_matrix_csv(path, values, rows, cols, corner);
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  LabeledMatrix result;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_csv_line(line);
    if (line_no == 1) {
      result.corner = fields.front();
      result.col_labels.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (line.empty()) continue;
    if (fields.size() != result.col_labels.size() + 1) {
      throw FormatError(line_no, path.string() + ": expected " +
                                     std::to_string(result.col_labels.size() + 1) + " fields");
    }
    result.row_labels.push_back(fields.front());
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        row.push_back(parse_decimal(fields[j]));
      } catch (const FormatError& e) {
        throw FormatError(line_no, path.string() + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) {
    throw FormatError(1, path.string() + ": empty CSV file");
  }
  result.values.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(result.col_labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return result;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failed: " + path.string());
  }
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

}  // namespace cpm::io
