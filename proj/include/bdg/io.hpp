#pragma once

// Plain-text formats: numeric CSV in and out, flat key=value config files.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bdg/matrix_kernel.hpp"

namespace bdg {

enum class HeaderMode { Auto, Present, Absent };

struct NumericTable {
  std::vector<std::string> header;  // empty when the input had none
  MatrixXd values;
};

/// Comma-separated numbers, one row per line. In Auto mode the first row is a
/// header when any of its fields is not a number. Throws ParseError (with
/// 1-based row/col) for empty input, a header without rows, ragged rows, or
/// non-numeric / non-finite cells.
NumericTable read_numeric_csv(std::istream& in, HeaderMode mode = HeaderMode::Auto);
NumericTable read_numeric_csv_file(const std::string& path, HeaderMode mode = HeaderMode::Auto);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

void write_matrix_csv(std::ostream& out, const MatrixXd& m, const std::vector<std::string>& header = {});
void write_matrix_csv_file(const std::string& path, const MatrixXd& m, const std::vector<std::string>& header = {});

using KeyValues = std::map<std::string, std::string>;

/// `key=value` per line; blank lines and lines starting with '#' are skipped.
/// Throws ParseError for lines without '=' or with an empty key.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values_file(const std::string& path);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Whole file as bytes. Throws ConfigError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace bdg
