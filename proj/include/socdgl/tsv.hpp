#pragma once

#include "socdgl/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace socdgl {

// Reads a whole text file into lines. Trailing '\r', spaces and tabs are
// trimmed from every line; trailing fully-empty lines are dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<std::string> split_tabs(const std::string& line);

// Strict finite-double parse; throws io_error on junk or non-finite values.
double parse_double(const std::string& token, const std::string& context);

// Canonical float formatting used by every writer (shortest round-trip form,
// so reruns are byte-identical).
std::string format_double(double v);

// Writes content to path via a temp file in the same directory plus rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Square matrix with an identifier header line; rows follow header order.
void write_id_matrix(const std::filesystem::path& path,
                     const std::vector<std::string>& ids, const Matrix& m);

struct IdMatrix {
  std::vector<std::string> ids;
  Matrix values;
};
IdMatrix read_id_matrix(const std::filesystem::path& path);

// Headerless numeric matrix, one tab-separated row per line; shape is
// inferred on read and every row must have the same width.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace socdgl
