#pragma once

// Truncated inclusion-exclusion for consecutive prime gaps.
//
//   Q_N(x, d) = pi_2(x, d) + sum_{k=3}^{N} (-1)^k sum_{1<=d_1<...<d_{k-2}<d} pi_k(x, d_1, ..., d_{k-2}, d)
//
// A pair (p - d, p) with m primes strictly between contributes C(m, k-2) to
// the inner sum at level k, so one pass that records m for every prime pair
// yields every Q_N exactly:
//
//   Q_N = sum_m H[m] sum_{j=0}^{N-2} (-1)^j C(m, j)
//
// and the pairs with m = 0 are exactly the consecutive ones.

#include <cstdint>
#include <vector>

#include "gapline/asymptotic.hpp"
#include "gapline/primes.hpp"

namespace gapline {

struct BonferroniOptions {
    uint64_t max_d = 64;
    SieveOptions sieve;
    QuadratureConfig quadrature;
    double rel_tol = 1e-9;  // singular series terms in residuals()
};

// between[m] = number of primes p <= x with p - d prime and exactly m primes
// strictly inside (p - d, p).
struct PairHistogram {
    uint64_t x = 0;
    uint64_t d = 0;
    std::vector<uint64_t> between;

    uint64_t pairs() const;
};

PairHistogram pair_histogram(uint64_t x, uint64_t d, const BonferroniOptions& opts = {});

// Q_N from a histogram. Throws std::overflow_error if Q_N leaves int64.
int64_t q_from_histogram(const PairHistogram& hist, uint64_t n);

int64_t q_truncation(uint64_t x, uint64_t d, uint64_t n, const BonferroniOptions& opts = {});

struct SandwichReport {
    uint64_t x = 0;
    uint64_t d = 0;
    uint64_t r_max = 0;
    std::vector<int64_t> q_values;  // q_values[i] = Q_{i+2}
    uint64_t n_exact = 0;           // N(x, d) from the gap census
    uint64_t terminated_at = 0;     // least N with Q_N = Q_{N+1} = N(x, d)
    double residual_2 = 0.0;        // pi_2(x, d) - S(d) li_2(x)
    bool holds = false;             // Q_{2R+1} <= N(x, d) <= Q_{2R} for R = 1..r_max

    int64_t q(uint64_t n) const { return q_values.at(n - 2); }
};

SandwichReport sandwich_check(uint64_t x, uint64_t d, uint64_t r_max, const BonferroniOptions& opts = {});

// Q_{d+1}(x, d) == N(x, d), with N(x, d) taken from an independent gap census.
bool exact_identity(uint64_t x, uint64_t d, const BonferroniOptions& opts = {});

struct ResidualRow {
    unsigned k = 0;
    uint64_t empirical = 0;  // pi_2, or the sum of pi_k over all inner tuples
    double main_term = 0.0;  // S(d) li_2(x), or A_k(d) li_k(x)
    double residual = 0.0;
};

std::vector<ResidualRow> residuals(uint64_t x, uint64_t d, unsigned k_max, const BonferroniOptions& opts = {});

}  // namespace gapline
