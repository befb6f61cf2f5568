#ifndef FLAGDECOMP_IO_HPP
#define FLAGDECOMP_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flagdecomp/hierarchy.hpp"
#include "flagdecomp/linalg.hpp"

namespace flagdecomp::io {

/// Shortest round-trip decimal form; ±infinity as "inf"/"-inf".
std::string format_number(double value);
double parse_number(const std::string& text);

/// Plain CSV: one row per line, comma separated, no header. Ragged rows, empty input and
/// non-finite entries are ParseErrors.
MatrixXd parse_matrix_csv(std::istream& in, const std::string& source = "<stream>");
MatrixXd read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const MatrixXd& m);
void write_matrix_csv(const std::filesystem::path& path, const MatrixXd& m);

/// Single-column CSV of integers.
std::vector<int> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels);

/// {"levels": [[0], [0, 1, 2]]} with 0-based indices.
ColumnHierarchy parse_hierarchy_json(const std::string& text);
ColumnHierarchy read_hierarchy_json(const std::filesystem::path& path);
std::string hierarchy_to_json(const ColumnHierarchy& h);
void write_hierarchy_json(const std::filesystem::path& path, const ColumnHierarchy& h);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace flagdecomp::io

#endif
