#pragma once

#include <map>
#include <string>
#include <vector>

namespace bridge::harness {

/// Rows are replicates (or splits), columns are methods.
struct SseTable {
    std::vector<std::string> methods;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(std::size_t method) const;
    std::vector<double> means() const;
    std::vector<double> medians() const;
};

struct CoefficientSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q50 = 0.0;
    double q975 = 0.0;
};

struct DensityGrid {
    std::string name;
    std::vector<double> grid;
    std::vector<double> density;

    /// Trapezoid integral of the density over the grid.
    double integral() const;
    /// Trapezoid mean, normalized by integral().
    double mean() const;
};

struct ParameterDiagnostics {
    std::string name;
    std::vector<double> acf;  ///< lags 0..max_lag
    double ess = 0.0;
};

/// Machine-readable experiment output, serialized as JSON.
///
/// Invariants: every SSE entry >= 0, every density value >= 0.
struct ExperimentReport {
    std::string kind;
    std::map<std::string, SseTable> tables;
    std::vector<CoefficientSummary> coefficients;
    std::vector<DensityGrid> densities;
    std::vector<ParameterDiagnostics> diagnostics;
    std::map<std::string, double> scalars;
    std::map<std::string, std::string> notes;

    /// Throws NumericalError on a violated invariant.
    void validate() const;
    std::string to_json() const;
    static ExperimentReport from_json(const std::string& text);
    void write(const std::string& path) const;
};

}  // namespace bridge::harness
