#include "socdgl/tsv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace socdgl {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() &&
           (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw io_error("non-numeric value '" + token + "' in " + context);
  if (!std::isfinite(v))
    throw io_error("non-finite feature value '" + token + "' in " + context);
  return v;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // normalize -0
  char buf[40];
  // Shortest representation that round-trips a double.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write file: " + tmp.string());
    out << content;
    if (!out) throw io_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw io_error("rename failed for " + path.string() + ": " + ec.message());
}

void write_id_matrix(const fs::path& path, const std::vector<std::string>& ids,
                     const Matrix& m) {
  if (static_cast<int>(ids.size()) != m.rows() || m.rows() != m.cols())
    throw io_error("id/matrix size mismatch writing " + path.string());
  std::ostringstream out;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (j) out << '\t';
    out << ids[j];
  }
  out << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

void write_matrix(const fs::path& path, const Matrix& m) {
  std::ostringstream out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

Matrix read_matrix(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) return Matrix(0, 0);
  const int rows = static_cast<int>(lines.size());
  const int cols = static_cast<int>(split_tabs(lines[0]).size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto cells = split_tabs(lines[i]);
    if (static_cast<int>(cells.size()) != cols)
      throw io_error("ragged row " + std::to_string(i + 1) + " in " + path.string());
    for (int j = 0; j < cols; ++j)
      m(i, j) = parse_double(cells[j], path.string());
  }
  return m;
}

IdMatrix read_id_matrix(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw io_error("empty matrix file: " + path.string());
  IdMatrix out;
  out.ids = split_tabs(lines[0]);
  const int n = static_cast<int>(out.ids.size());
  if (static_cast<int>(lines.size()) - 1 != n)
    throw io_error("matrix file " + path.string() + " has " +
                   std::to_string(lines.size() - 1) + " rows, expected " +
                   std::to_string(n));
  out.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const auto cells = split_tabs(lines[i + 1]);
    if (static_cast<int>(cells.size()) != n)
      throw io_error("row " + std::to_string(i + 2) + " of " + path.string() +
                     " has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(n));
    for (int j = 0; j < n; ++j)
      out.values(i, j) = parse_double(cells[j], path.string());
  }
  return out;
}

}  // namespace socdgl
