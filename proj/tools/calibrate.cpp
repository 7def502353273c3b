// Sweep that fixed the envelope constants in asymptotic.hpp.
//
// For each x in 10^4..10^8 (half-decade steps) prints
//   |li_2(x) - x/(log x)^2| / (2x/(log x)^3)
//   |ratio - 1| / error_model   for i_estimate_check at d = log x and d = 18
// Exits nonzero if a recorded constant no longer bounds the sweep.

#include <cmath>
#include <cstdio>

#include "gapline/asymptotic.hpp"

int main() {
    using namespace gapline;
    double worst_li = 0.0;
    double worst_estimate = 0.0;
    std::printf("%-12s %-12s %-14s %-14s\n", "x", "li2_ratio", "est_lambda1", "est_d18");
    for (double e = 4.0; e <= 8.0 + 1e-9; e += 0.5) {
        const double x = std::pow(10.0, e);
        const MainTerm term = main_term_expansion(x, 2);
        const double li_ratio = std::fabs(li_k(x, 2) - term.main) / term.bound;
        const EstimateCheck lambda_one = i_estimate_check(x, std::log(x));
        const EstimateCheck fixed = i_estimate_check(x, 18.0);
        const double est1 = std::fabs(lambda_one.ratio - 1.0) / lambda_one.error_model;
        const double est18 = std::fabs(fixed.ratio - 1.0) / fixed.error_model;
        worst_li = std::fmax(worst_li, li_ratio);
        worst_estimate = std::fmax(worst_estimate, std::fmax(est1, est18));
        std::printf("%-12.4g %-12.4f %-14.4f %-14.4f\n", x, li_ratio, est1, est18);
    }
    std::printf("max li2 ratio %.4f (constant %.1f), max estimate ratio %.4f (constant %.1f)\n", worst_li,
                kLiExpansionConstant, worst_estimate, kEstimateConstant);
    return worst_li <= kLiExpansionConstant && worst_estimate <= kEstimateConstant ? 0 : 1;
}
