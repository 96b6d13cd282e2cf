#pragma once

#include "bridge/errors.hpp"
#include "bridge/model.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bridge::harness {

/// Malformed input table. `kind` distinguishes the failure.
class CsvError : public InputError {
public:
    enum class Kind { kUnreadable, kEmpty, kRaggedRow, kNonNumeric, kMissingResponse };

    CsvError(Kind kind, const std::string& message) : InputError(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Header plus numeric body of a comma-separated file.
struct Table {
    std::vector<std::string> header;
    Eigen::MatrixXd values;  ///< rows x header.size()
};

/// Parses a headered numeric CSV. Blank lines are skipped; surrounding
/// whitespace and double quotes around header names are stripped.
Table read_table(const std::string& path);

struct CsvOptions {
    std::string response = "y";  ///< name of the response column
    bool standardize = true;
    model::StandardizeOptions standardize_options;
};

struct LoadedData {
    model::RegressionData data;
    std::string response_name;
    std::vector<std::string> predictor_names;
};

/// Splits the table into response and predictors, then standardizes per options.
LoadedData load_csv(const std::string& path, const CsvOptions& options = {});

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Writes a headered table with format_double cells.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values);

}  // namespace bridge::harness
