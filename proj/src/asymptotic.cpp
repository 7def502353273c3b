#include "gapline/asymptotic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "gapline/errors.hpp"
#include "gapline/singular.hpp"

namespace gapline {

namespace {

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) with the embedded
// 7-point Gauss rule at the odd indices.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double centre = f(mid);
    double kronrod = centre * kKronrodWeights[7];
    double gauss = centre * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double pair = f(mid - dx) + f(mid + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    return Panel{a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

void check_x(double x, double minimum, const char* op) {
    if (!(x >= minimum) || !std::isfinite(x))
        throw std::invalid_argument(fmt::format("{} needs x >= {}, got {}", op, minimum, x));
}

void check_even_d(uint64_t d, const char* op) {
    if (d < 2 || d % 2)
        throw std::invalid_argument(fmt::format("{}: prediction needs even d >= 2 (S(d) = 0 for odd d), got {}", op, d));
}

}  // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("quadrature rel_tol must lie in (0, 1)");
    if (max_subdivisions < 8) throw std::invalid_argument("quadrature max_subdivisions must be >= 8");
}

double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg) {
    cfg.validate();
    if (a == b) return 0.0;
    std::priority_queue<Panel> panels;
    panels.push(kronrod(f, a, b));
    double value = panels.top().value;
    double error = panels.top().error;
    for (int splits = 0;; ++splits) {
        if (error <= cfg.rel_tol * std::fabs(value) || error == 0.0) break;
        if (splits >= cfg.max_subdivisions)
            throw ToleranceNotMet(fmt::format("quadrature on [{}, {}] stopped at relative error {:g} after {} splits",
                                              a, b, error / std::fabs(value), splits),
                                  error / std::fabs(value));
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = kronrod(f, worst.a, mid);
        const Panel right = kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // Re-add from scratch so the running updates leave no drift.
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    double total = 0.0;
    for (const Panel& p : all) total += p.value;
    return total;
}

double li_k(double x, int k, const QuadratureConfig& cfg) {
    check_x(x, 2.0, "li_k");
    if (k < 1) throw std::invalid_argument("li_k needs k >= 1");
    if (x == 2.0) return 0.0;
    return integrate([k](double u) { return std::exp(u) / std::pow(u, k); }, std::log(2.0), std::log(x), cfg);
}

MainTerm main_term_expansion(double x, int k) {
    if (!(x > std::exp(1.0))) throw std::invalid_argument("main_term_expansion needs x > e");
    if (k < 1) throw std::invalid_argument("main_term_expansion needs k >= 1");
    const double log_x = std::log(x);
    const double main = x / std::pow(log_x, k);
    return MainTerm{main, k * main / log_x};
}

double integral_I(double x, double d, const QuadratureConfig& cfg) {
    check_x(x, 2.0, "integral_I");
    if (!(d >= 0.0)) throw std::invalid_argument("integral_I needs d >= 0");
    if (x == 2.0) return 0.0;
    return integrate([d](double u) { return std::exp(u - d / u) / (u * u); }, std::log(2.0), std::log(x), cfg);
}

double poisson_prediction(uint64_t x, uint64_t d) {
    check_even_d(d, "poisson_prediction");
    if (x < 3) throw std::invalid_argument("poisson_prediction needs x >= 3");
    const double log_x = std::log(static_cast<double>(x));
    return std::exp(-static_cast<double>(d) / log_x) * pair_singular(d).value * static_cast<double>(x) /
           (log_x * log_x);
}

double refined_prediction(uint64_t x, uint64_t d, const QuadratureConfig& cfg) {
    check_even_d(d, "refined_prediction");
    if (x < 3) throw std::invalid_argument("refined_prediction needs x >= 3");
    return pair_singular(d).value * integral_I(static_cast<double>(x), static_cast<double>(d), cfg);
}

double gallagher_prediction(uint64_t r, double lambda, uint64_t n) {
    if (!(lambda > 0.0)) throw std::invalid_argument("gallagher_prediction needs lambda > 0");
    if (n < 1) throw std::invalid_argument("gallagher_prediction needs N >= 1");
    const double rr = static_cast<double>(r);
    return std::exp(-lambda + rr * std::log(lambda) - std::lgamma(rr + 1.0)) * static_cast<double>(n);
}

EstimateCheck i_estimate_check(double x, double d, const QuadratureConfig& cfg) {
    check_x(x, 16.0, "i_estimate_check");
    if (!(d >= 0.0)) throw std::invalid_argument("i_estimate_check needs d >= 0");
    const double log_x = std::log(x);
    const double d_bar = d / log_x;
    EstimateCheck out;
    out.ratio = integral_I(x, d, cfg) * log_x * log_x * std::exp(d_bar) / x;
    out.error_model = d_bar * std::log(log_x) / log_x;
    return out;
}

PredictionReport make_prediction_report(uint64_t x, uint64_t d, uint64_t observed, const QuadratureConfig& cfg) {
    PredictionReport report;
    report.x = x;
    report.d = d;
    report.observed = observed;
    report.poisson_main = poisson_prediction(x, d);
    report.refined = refined_prediction(x, d, cfg);
    report.lambda_bar = static_cast<double>(d) / std::log(static_cast<double>(x));
    report.ratio_poisson = static_cast<double>(observed) / report.poisson_main;
    report.ratio_refined = static_cast<double>(observed) / report.refined;
    return report;
}

}  // namespace gapline
