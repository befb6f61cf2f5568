#include "flagdecomp/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace flagdecomp::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidArgument("cannot write '" + path.string() + "'");
    }
    return out;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

double parse_number(const std::string& text) {
    const std::string_view s = trim(text);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("not a number: '" + text + "'");
    }
    return value;
}

MatrixXd parse_matrix_csv(std::istream& in, const std::string& source) {
    std::vector<double> values;
    Index cols = -1;
    Index rows = 0;
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        Index count = 0;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view field = trim(rest.substr(0, comma));
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": bad number '" +
                                 std::string(field) + "'");
            }
            if (!std::isfinite(value)) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": non-finite value");
            }
            values.push_back(value);
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cols >= 0 && count != cols) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(cols) + " fields, found " + std::to_string(count));
        }
        cols = count;
        ++rows;
    }
    if (rows == 0) {
        throw ParseError(source + ": no data");
    }
    MatrixXd out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            out(i, j) = values[static_cast<std::size_t>(i * cols + j)];
        }
    }
    return out;
}

MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_matrix_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const MatrixXd& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_number(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const MatrixXd& m) {
    auto out = open_output(path);
    write_matrix_csv(out, m);
}

std::vector<int> read_labels_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view field = trim(line);
        if (field.empty()) continue;
        int value = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            throw ParseError(path.string() + ": bad label '" + std::string(field) + "'");
        }
        labels.push_back(value);
    }
    return labels;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels) {
    auto out = open_output(path);
    for (const int l : labels) out << l << '\n';
}

ColumnHierarchy parse_hierarchy_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("hierarchy JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("levels") || !doc["levels"].is_array()) {
        throw ParseError("hierarchy JSON: expected {\"levels\": [[...], ...]}");
    }
    std::vector<std::vector<Index>> levels;
    for (const auto& level : doc["levels"]) {
        if (!level.is_array()) throw ParseError("hierarchy JSON: each level must be an array");
        std::vector<Index> idx;
        for (const auto& v : level) {
            if (!v.is_number_integer()) {
                throw ParseError("hierarchy JSON: indices must be integers");
            }
            idx.push_back(v.get<Index>());
        }
        for (std::size_t i = 1; i < idx.size(); ++i) {
            if (idx[i] <= idx[i - 1]) {
                throw ParseError("hierarchy JSON: level indices must be sorted and unique");
            }
        }
        levels.push_back(std::move(idx));
    }
    try {
        return ColumnHierarchy(std::move(levels));
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("hierarchy JSON: ") + e.what());
    }
}

ColumnHierarchy read_hierarchy_json(const std::filesystem::path& path) {
    return parse_hierarchy_json(read_text(path));
}

std::string hierarchy_to_json(const ColumnHierarchy& h) {
    nlohmann::json doc;
    doc["levels"] = h.levels();
    return doc.dump();
}

void write_hierarchy_json(const std::filesystem::path& path, const ColumnHierarchy& h) {
    write_text(path, hierarchy_to_json(h) + "\n");
}

std::string read_text(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
}

}  // namespace flagdecomp::io
