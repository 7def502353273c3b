#pragma once

// Main terms of the prime-pattern asymptotics.
//
// The logarithmic integrals are evaluated after substituting t = e^u:
//
//   li_k(x)  = int_{log 2}^{log x} e^u / u^k du
//   I(x, d)  = int_{log 2}^{log x} e^{u - d/u} / u^2 du
//
// Both integrands are smooth and slowly varying in u, which suits adaptive
// Gauss-Kronrod bisection.

#include <cstdint>
#include <functional>

namespace gapline {

struct QuadratureConfig {
    double rel_tol = 1e-12;
    int max_subdivisions = 4096;

    void validate() const;
};

// Adaptive G7/K15 over [a, b]. Throws ToleranceNotMet when the estimated
// error stays above rel_tol * |result| after max_subdivisions splits.
double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg);

double li_k(double x, int k, const QuadratureConfig& cfg = {});

struct MainTerm {
    double main = 0.0;   // x / (log x)^k
    double bound = 0.0;  // k x / (log x)^{k+1}
};

MainTerm main_term_expansion(double x, int k);

double integral_I(double x, double d, const QuadratureConfig& cfg = {});

// e^{-d/log x} S(d) x / (log x)^2. Throws for odd d.
double poisson_prediction(uint64_t x, uint64_t d);

// S(d) I(x, d). Throws for odd d.
double refined_prediction(uint64_t x, uint64_t d, const QuadratureConfig& cfg = {});

// e^{-lambda} lambda^r / r! * N
double gallagher_prediction(uint64_t r, double lambda, uint64_t n);

struct EstimateCheck {
    double ratio = 0.0;        // I(x, d) (log x)^2 e^{d/log x} / x
    double error_model = 0.0;  // (d / log x) log log x / log x
};

// d is real so sweeps can pin d = lambda log x exactly.
EstimateCheck i_estimate_check(double x, double d, const QuadratureConfig& cfg = {});

struct PredictionReport {
    uint64_t x = 0;
    uint64_t d = 0;
    double lambda_bar = 0.0;  // d / log x
    uint64_t observed = 0;    // N(x, d)
    double poisson_main = 0.0;
    double refined = 0.0;
    double ratio_poisson = 0.0;  // observed / poisson_main
    double ratio_refined = 0.0;  // observed / refined
};

PredictionReport make_prediction_report(uint64_t x, uint64_t d, uint64_t observed,
                                        const QuadratureConfig& cfg = {});

// Constants for the error envelopes checked by the test suites, fixed from a
// calibration sweep over x in [1e4, 1e8] (see tools/calibrate.cpp):
//   |li_2(x) - x/(log x)^2| <= kLiExpansionConstant * 2x/(log x)^3
//   |i_estimate_check ratio - 1| <= kEstimateConstant * error_model
inline constexpr double kLiExpansionConstant = 3.0;
inline constexpr double kEstimateConstant = 5.0;

}  // namespace gapline
