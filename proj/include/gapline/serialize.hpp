#pragma once

// CSV and JSON renderings of the report types.
//
// CSV: comma separated, one header row, LF line endings. JSON: one object per
// report. Counts are written as exact integers; every real is printed with 15
// significant digits so repeated runs diff cleanly.

#include <string>
#include <vector>

#include <json.hpp>

#include "gapline/asymptotic.hpp"
#include "gapline/bonferroni.hpp"
#include "gapline/census.hpp"
#include "gapline/singular.hpp"

namespace gapline {

inline constexpr int kOutputSchemaVersion = 1;

std::string format_real(double value);

// Real rounded to 15 significant digits, for embedding in JSON.
nlohmann::ordered_json json_real(double value);

std::string census_csv(const GapCensus& census);
nlohmann::ordered_json census_json(const GapCensus& census);

std::string prediction_csv(const std::vector<PredictionReport>& reports);
nlohmann::ordered_json prediction_json(const PredictionReport& report);

std::string sandwich_csv(const SandwichReport& report);
nlohmann::ordered_json sandwich_json(const SandwichReport& report);

struct AverageRow {
    unsigned k = 0;
    uint64_t d = 0;
    double average = 0.0;  // A_k(d)
    double main_term = 0.0;
    double error = 0.0;  // E_k(d)
    double ratio = 0.0;  // A_k(d) / main_term
};

AverageRow make_average_row(unsigned k, uint64_t d, const SeriesAverageOptions& opts = {});
std::string average_csv(const std::vector<AverageRow>& rows);
nlohmann::ordered_json average_json(const std::vector<AverageRow>& rows);

nlohmann::ordered_json singular_json(const SingularValue& value);

}  // namespace gapline
