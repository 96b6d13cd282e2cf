#include "bridge/harness/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bridge::harness {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError(CsvError::Kind::kUnreadable, "cannot open " + path);
    Table table;
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (table.header.empty()) {
            for (auto& c : cells) table.header.push_back(unquote(c));
            continue;
        }
        if (cells.size() != table.header.size()) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected " << table.header.size() << " cells, found "
                << cells.size();
            throw CsvError(CsvError::Kind::kRaggedRow, msg.str());
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_double(cells[c], row[c])) {
                std::ostringstream msg;
                msg << path << ":" << line_no << ": column '" << table.header[c]
                    << "' is not numeric: '" << cells[c] << "'";
                throw CsvError(CsvError::Kind::kNonNumeric, msg.str());
            }
        }
        rows.push_back(std::move(row));
    }
    if (table.header.empty() || rows.empty()) {
        throw CsvError(CsvError::Kind::kEmpty, path + " has no data rows");
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

LoadedData load_csv(const std::string& path, const CsvOptions& options) {
    const Table table = read_table(path);
    const auto it = std::find(table.header.begin(), table.header.end(), options.response);
    if (it == table.header.end()) {
        throw CsvError(CsvError::Kind::kMissingResponse,
                       path + " has no response column '" + options.response + "'");
    }
    const auto response_col = static_cast<Eigen::Index>(it - table.header.begin());
    const Eigen::Index n = table.values.rows();
    const Eigen::Index p = table.values.cols() - 1;
    detail::require(p >= 1, path + " has no predictor columns");

    LoadedData out;
    out.response_name = options.response;
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index c = 0, k = 0; c < table.values.cols(); ++c) {
        if (c == response_col) continue;
        X.col(k++) = table.values.col(c);
        out.predictor_names.push_back(table.header[static_cast<std::size_t>(c)]);
    }
    Eigen::VectorXd y = table.values.col(response_col);
    out.data = options.standardize
                   ? model::standardize(y, X, options.standardize_options)
                   : model::make_data(std::move(y), std::move(X));
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values) {
    detail::require(static_cast<Eigen::Index>(header.size()) == values.cols(),
                    "header width does not match the table");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out << (c ? "," : "") << format_double(values(r, c));
        }
        out << '\n';
    }
    if (!out) throw InputError("failed writing " + path);
}

}  // namespace bridge::harness
