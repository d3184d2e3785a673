#pragma once

#include "gvolt/graph.hpp"
#include "gvolt/manifold.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gvolt::io {

/// Shortest text that round-trips a double ("%.17g").
std::string format_double(double x);

/// Writes to `path.tmp` then renames over `path`; creates parent dirs.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Rows of numbers, comma separated. Blank lines and lines starting with '#'
/// are skipped. Errors name the file and the 1-based line.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path);
/// Same, but every row must have the same width.
RowMatrix read_matrix_csv(const std::filesystem::path& path);

std::string matrix_to_csv(const RowMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const RowMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Two-column `node_index,value` file.
std::string voltage_to_csv(const std::vector<double>& values);
void write_voltage_csv(const std::filesystem::path& path, const std::vector<double>& values);
std::vector<double> read_voltage_csv(const std::filesystem::path& path);

/// `i,j,weight` with i < j, one line per undirected edge.
void write_edge_csv(const std::filesystem::path& path, const GroundedGraph& graph);
std::vector<Edge> read_edge_csv(const std::filesystem::path& path);

/// Two-column gnuplot data (`x y` separated by a space).
void write_curve(const std::filesystem::path& path, const std::vector<double>& x,
                 const std::vector<std::optional<double>>& y);

/// One node index per line.
std::vector<std::size_t> read_index_file(const std::filesystem::path& path);

}  // namespace gvolt::io
