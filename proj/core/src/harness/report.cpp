#include "bridge/harness/report.hpp"

#include "bridge/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace bridge::harness {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
}

/// JSON has no infinities; they travel as strings.
nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double number_from(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return std::nan("");
}

nlohmann::json numbers(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

std::vector<double> numbers_from(const nlohmann::json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(number_from(x));
    return v;
}

}  // namespace

std::vector<double> SseTable::column(std::size_t method) const {
    std::vector<double> out;
    for (const auto& row : rows) out.push_back(row.at(method));
    return out;
}

std::vector<double> SseTable::means() const {
    std::vector<double> out;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto c = column(m);
        double s = 0.0;
        for (double x : c) s += x;
        out.push_back(c.empty() ? std::nan("") : s / static_cast<double>(c.size()));
    }
    return out;
}

std::vector<double> SseTable::medians() const {
    std::vector<double> out;
    for (std::size_t m = 0; m < methods.size(); ++m) out.push_back(median_of(column(m)));
    return out;
}

double DensityGrid::integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        s += 0.5 * (grid[i] - grid[i - 1]) * (density[i] + density[i - 1]);
    return s;
}

double DensityGrid::mean() const {
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        s += 0.5 * (grid[i] - grid[i - 1]) * (grid[i] * density[i] + grid[i - 1] * density[i - 1]);
    return s / integral();
}

void ExperimentReport::validate() const {
    for (const auto& [name, table] : tables) {
        for (const auto& row : table.rows) {
            if (row.size() != table.methods.size())
                throw NumericalError("table '" + name + "' has a row of the wrong width");
            for (double v : row)
                if (!(v >= 0.0)) throw NumericalError("table '" + name + "' has a negative or NaN SSE");
        }
    }
    for (const auto& d : densities) {
        if (d.grid.size() != d.density.size())
            throw NumericalError("density grid '" + d.name + "' has mismatched lengths");
        for (double v : d.density)
            if (!(v >= 0.0)) throw NumericalError("density grid '" + d.name + "' has a negative value");
    }
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["tables"] = nlohmann::json::object();
    for (const auto& [name, t] : tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows) rows.push_back(numbers(r));
        j["tables"][name] = {{"methods", t.methods}, {"rows", rows},
                             {"mean", numbers(t.means())}, {"median", numbers(t.medians())}};
    }
    j["coefficients"] = nlohmann::json::array();
    for (const auto& c : coefficients) {
        j["coefficients"].push_back({{"name", c.name}, {"mean", number(c.mean)}, {"sd", number(c.sd)},
                                     {"q025", number(c.q025)}, {"q50", number(c.q50)},
                                     {"q975", number(c.q975)}});
    }
    j["densities"] = nlohmann::json::array();
    for (const auto& d : densities) {
        j["densities"].push_back({{"name", d.name}, {"grid", numbers(d.grid)},
                                  {"density", numbers(d.density)}});
    }
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : diagnostics) {
        j["diagnostics"].push_back({{"name", d.name}, {"acf", numbers(d.acf)}, {"ess", number(d.ess)}});
    }
    j["scalars"] = nlohmann::json::object();
    for (const auto& [k, v] : scalars) j["scalars"][k] = number(v);
    j["notes"] = notes;
    return j.dump(2) + "\n";
}

ExperimentReport ExperimentReport::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
    ExperimentReport r;
    try {
        r.kind = j.at("kind").get<std::string>();
        for (const auto& [name, t] : j.at("tables").items()) {
            SseTable table;
            table.methods = t.at("methods").get<std::vector<std::string>>();
            for (const auto& row : t.at("rows")) table.rows.push_back(numbers_from(row));
            r.tables[name] = std::move(table);
        }
        for (const auto& c : j.at("coefficients")) {
            r.coefficients.push_back({c.at("name").get<std::string>(), number_from(c.at("mean")),
                                      number_from(c.at("sd")), number_from(c.at("q025")),
                                      number_from(c.at("q50")), number_from(c.at("q975"))});
        }
        for (const auto& d : j.at("densities")) {
            r.densities.push_back({d.at("name").get<std::string>(), numbers_from(d.at("grid")),
                                   numbers_from(d.at("density"))});
        }
        for (const auto& d : j.at("diagnostics")) {
            r.diagnostics.push_back({d.at("name").get<std::string>(), numbers_from(d.at("acf")),
                                     number_from(d.at("ess"))});
        }
        for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = number_from(v);
        r.notes = j.at("notes").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report does not match the schema: ") + e.what());
    }
    return r;
}

void ExperimentReport::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << to_json();
}

}  // namespace bridge::harness
