#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsir/core_model.hpp"
#include "lsir/fit.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace lsir {

inline constexpr const char* kVersion = "0.1.0";

/// Thrown for malformed input data (maps to CLI exit code 2).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;
    Mat values;
};

/// Reads a numeric CSV with a header row. Accepts ',' or ';' separators.
/// Rejects missing/non-numeric cells, reporting the 1-based data row.
CsvTable read_csv(const std::string& path);

struct ColumnSpec {
    std::string y;
    std::vector<std::string> x; // first entry is the anchored X1
    std::vector<std::string> z;
    std::vector<std::string> negate; // columns to flip in sign before use
    bool standardize = false;
};

struct Standardization {
    std::vector<std::string> columns; // x then z, in model order
    Vec mean;
    Vec scale;
};

/// Builds the Dataset from a table per the column roles; fills `stdz` when
/// spec.standardize is set.
Dataset make_dataset(const CsvTable& table, const ColumnSpec& spec,
                     std::optional<Standardization>* stdz);

/// Full fit report, round-trippable; numbers serialize with 17 significant
/// digits via dump_17g.
nlohmann::ordered_json build_result_document(const Dataset& data, const FitConfig& cfg,
                                             const FitResult& fit, const ColumnSpec& cols,
                                             const std::optional<Standardization>& stdz,
                                             double ci_level);

/// Deterministic JSON serialization with %.17g floating-point formatting.
std::string dump_17g(const nlohmann::ordered_json& j, int indent = 2);

/// Reconstructs the fitted bundle from a result document.
Theta theta_from_document(const nlohmann::ordered_json& doc);

/// Predictions for new covariate rows under a result document (applies the
/// stored negation/standardization, then the hinge model).
Vec predict_from_document(const nlohmann::ordered_json& doc, const CsvTable& table);

} // namespace lsir
