#include "bdg/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "bdg/errors.hpp"

namespace bdg {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  // Underflow to a subnormal is fine; overflow is not.
  if (end != begin + s.size() || (errno == ERANGE && std::isinf(v))) return std::nullopt;
  return v;
}

}  // namespace

NumericTable read_numeric_csv(std::istream& in, HeaderMode mode) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    rows.emplace_back(lineno, split(line));
  }
  if (rows.empty()) throw ParseError("empty input: no header and no rows");

  NumericTable table;
  std::size_t first = 0;
  bool header = mode == HeaderMode::Present;
  if (mode == HeaderMode::Auto)
    for (const auto& f : rows[0].second)
      if (!to_number(f)) header = true;
  if (header) {
    table.header = rows[0].second;
    first = 1;
  }
  if (rows.size() == first) throw ParseError("no data rows after the header", rows[0].first);

  const std::size_t cols = rows[first].second.size();
  if (header && table.header.size() != cols)
    throw ParseError("header has " + std::to_string(table.header.size()) + " fields but rows have " +
                         std::to_string(cols),
                     rows[0].first);
  table.values.resize(static_cast<Index>(rows.size() - first), static_cast<Index>(cols));
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& [row, fields] = rows[r];
    if (fields.size() != cols)
      throw ParseError("expected " + std::to_string(cols) + " fields, got " + std::to_string(fields.size()), row);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = to_number(fields[c]);
      if (!v) throw ParseError("not a number: '" + fields[c] + "'", row, c + 1);
      if (!std::isfinite(*v)) throw ParseError("non-finite value: '" + fields[c] + "'", row, c + 1);
      table.values(static_cast<Index>(r - first), static_cast<Index>(c)) = *v;
    }
  }
  return table;
}

NumericTable read_numeric_csv_file(const std::string& path, HeaderMode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_numeric_csv(in, mode);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& out, const MatrixXd& m, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_matrix_csv_file(const std::string& path, const MatrixXd& m, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_matrix_csv(out, m, header);
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", row);
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", row);
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_key_values(in);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bdg
