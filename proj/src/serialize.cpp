#include "gapline/serialize.hpp"

#include <cstdlib>

#include <fmt/format.h>

namespace gapline {

std::string format_real(double value) { return fmt::format("{:.15g}", value); }

nlohmann::ordered_json json_real(double value) { return std::strtod(format_real(value).c_str(), nullptr); }

std::string census_csv(const GapCensus& census) {
    std::string out = "d,count\n";
    for (const auto& [gap, count] : census.counts) out += fmt::format("{},{}\n", gap, count);
    return out;
}

nlohmann::ordered_json census_json(const GapCensus& census) {
    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    for (const auto& [gap, count] : census.counts) counts.push_back({{"d", gap}, {"count", count}});
    return {{"x", census.x}, {"prime_total", census.prime_total}, {"counts", counts}};
}

std::string prediction_csv(const std::vector<PredictionReport>& reports) {
    std::string out = "x,d,lambda_bar,observed,poisson_main,refined,ratio_poisson,ratio_refined\n";
    for (const auto& r : reports)
        out += fmt::format("{},{},{},{},{},{},{},{}\n", r.x, r.d, format_real(r.lambda_bar), r.observed,
                           format_real(r.poisson_main), format_real(r.refined), format_real(r.ratio_poisson),
                           format_real(r.ratio_refined));
    return out;
}

nlohmann::ordered_json prediction_json(const PredictionReport& r) {
    return {{"x", r.x},
            {"d", r.d},
            {"lambda_bar", json_real(r.lambda_bar)},
            {"observed", r.observed},
            {"poisson_main", json_real(r.poisson_main)},
            {"refined", json_real(r.refined)},
            {"ratio_poisson", json_real(r.ratio_poisson)},
            {"ratio_refined", json_real(r.ratio_refined)}};
}

std::string sandwich_csv(const SandwichReport& report) {
    std::string out = "N,Q_N\n";
    for (size_t i = 0; i < report.q_values.size(); ++i) out += fmt::format("{},{}\n", i + 2, report.q_values[i]);
    return out;
}

nlohmann::ordered_json sandwich_json(const SandwichReport& report) {
    nlohmann::ordered_json q = nlohmann::ordered_json::array();
    for (size_t i = 0; i < report.q_values.size(); ++i) q.push_back({{"N", i + 2}, {"Q_N", report.q_values[i]}});
    return {{"x", report.x},
            {"d", report.d},
            {"r_max", report.r_max},
            {"n_exact", report.n_exact},
            {"terminated_at", report.terminated_at},
            {"residual_2", json_real(report.residual_2)},
            {"holds", report.holds},
            {"q_values", q}};
}

AverageRow make_average_row(unsigned k, uint64_t d, const SeriesAverageOptions& opts) {
    AverageRow row;
    row.k = k;
    row.d = d;
    row.average = series_average(k, d, opts);
    row.main_term = average_main_term(k, d);
    row.error = row.average - row.main_term;
    row.ratio = row.average / row.main_term;
    return row;
}

std::string average_csv(const std::vector<AverageRow>& rows) {
    std::string out = "k,d,A_k,main_term,E_k,ratio\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{},{}\n", r.k, r.d, format_real(r.average), format_real(r.main_term),
                           format_real(r.error), format_real(r.ratio));
    return out;
}

nlohmann::ordered_json average_json(const std::vector<AverageRow>& rows) {
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        table.push_back({{"k", r.k},
                         {"d", r.d},
                         {"A_k", json_real(r.average)},
                         {"main_term", json_real(r.main_term)},
                         {"E_k", json_real(r.error)},
                         {"ratio", json_real(r.ratio)}});
    return {{"rows", table}};
}

nlohmann::ordered_json singular_json(const SingularValue& value) {
    return {{"value", json_real(value.value)},
            {"truncation_prime", value.truncation_prime},
            {"tail_bound", json_real(value.tail_bound)},
            {"admissible", value.admissible}};
}

}  // namespace gapline
