#include "gvolt/io.hpp"

#include "gvolt/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gvolt::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw ValidationError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw ValidationError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view field, const fs::path& path, std::size_t line, std::size_t col) {
    field = trim(field);
    double x = 0.0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, x);
    if (field.empty() || ec != std::errc() || ptr != end)
        throw ValidationError(path.string() + ":" + std::to_string(line) + ": column " + std::to_string(col) +
                              ": not a number: '" + std::string(field) + "'");
    return x;
}

}  // namespace

std::vector<std::vector<double>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto s = trim(raw);
        if (s.empty() || s.front() == '#') continue;
        std::vector<double> row;
        std::size_t col = 1;
        for (;;) {
            auto comma = s.find(',');
            row.push_back(parse_field(s.substr(0, comma), path, line, col++));
            if (comma == std::string_view::npos) break;
            s.remove_prefix(comma + 1);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

RowMatrix read_matrix_csv(const fs::path& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw ValidationError(path.string() + ": no data rows");
    const auto width = rows.front().size();
    RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width)
            throw ValidationError(path.string() + ": data row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " columns, expected " + std::to_string(width));
        for (std::size_t k = 0; k < width; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return m;
}

std::string matrix_to_csv(const RowMatrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (k) out += ',';
            out += format_double(m(i, k));
        }
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const fs::path& path, const RowMatrix& m) { write_text_atomic(path, matrix_to_csv(m)); }

void write_matrix_csv(const fs::path& path, const Matrix& m) { write_text_atomic(path, matrix_to_csv(RowMatrix(m))); }

std::string voltage_to_csv(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += std::to_string(i) + ',' + format_double(values[i]) + '\n';
    return out;
}

void write_voltage_csv(const fs::path& path, const std::vector<double>& values) {
    write_text_atomic(path, voltage_to_csv(values));
}

std::vector<double> read_voltage_csv(const fs::path& path) {
    auto rows = read_csv(path);
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2 || rows[i][0] != static_cast<double>(i))
            throw ValidationError(path.string() + ": data row " + std::to_string(i + 1) +
                                  ": expected 'node_index,value' with index " + std::to_string(i));
        values[i] = rows[i][1];
    }
    return values;
}

void write_edge_csv(const fs::path& path, const GroundedGraph& graph) {
    std::string out;
    for (const auto& e : graph.edges())
        out += std::to_string(e.i) + ',' + std::to_string(e.j) + ',' + format_double(e.weight) + '\n';
    write_text_atomic(path, out);
}

std::vector<Edge> read_edge_csv(const fs::path& path) {
    auto rows = read_csv(path);
    std::vector<Edge> edges;
    edges.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto is_index = [](double x) { return x >= 0.0 && x < 4294967296.0 && x == std::floor(x); };
        if (row.size() != 3 || !is_index(row[0]) || !is_index(row[1]))
            throw ValidationError(path.string() + ": data row " + std::to_string(r + 1) +
                                  ": expected 'i,j,weight' with non-negative integer indices");
        edges.push_back({static_cast<std::uint32_t>(row[0]), static_cast<std::uint32_t>(row[1]), row[2]});
    }
    return edges;
}

void write_curve(const fs::path& path, const std::vector<double>& x, const std::vector<std::optional<double>>& y) {
    if (x.size() != y.size()) throw ValidationError("curve: x and y lengths differ");
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!y[i]) continue;
        out += format_double(x[i]) + ' ' + format_double(*y[i]) + '\n';
    }
    write_text_atomic(path, out);
}

std::vector<std::size_t> read_index_file(const fs::path& path) {
    auto rows = read_csv(path);
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 1 || rows[r][0] < 0 || rows[r][0] != static_cast<double>(static_cast<std::size_t>(rows[r][0])))
            throw ValidationError(path.string() + ": data row " + std::to_string(r + 1) + ": expected one node index");
        idx.push_back(static_cast<std::size_t>(rows[r][0]));
    }
    return idx;
}

}  // namespace gvolt::io
