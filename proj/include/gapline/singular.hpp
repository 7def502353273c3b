#pragma once

// Hardy-Littlewood singular series.
//
//   S(H) = prod_p (1 - 1/p)^{-k} (1 - nu_H(p)/p)
//
// nu_H(p) counts the residue classes mod p hit by H. For p above the
// diameter of H every element lands in its own class, so nu_H(p) = k and the
// log of the factor is
//
//   g_k(p) = sum_{j>=2} (k - k^j) / (j p^j).
//
// The product is evaluated exactly up to a truncation prime P. The tail
// sum_{p>P} g_k(p) is taken term by term through the prime zeta function for
// j = 2..kTailTerms, and the rest is bounded using
// sum_{p>P} p^-j <= P^{1-j}/(j-1).

#include <cstdint>
#include <span>
#include <vector>

namespace gapline {

inline constexpr double kDefaultRelTol = 1e-9;
inline constexpr uint64_t kTruncationCap = 10'000'000;

// A set of k >= 1 distinct integers, shifted so the smallest is 0.
class OffsetTuple {
public:
    // Sorts and shifts; throws std::invalid_argument on duplicates or empty input.
    static OffsetTuple normalized(std::vector<int64_t> offsets);

    // Offsets must already be strictly increasing and start at 0.
    explicit OffsetTuple(std::vector<uint64_t> offsets);

    std::span<const uint64_t> offsets() const { return offsets_; }
    size_t k() const { return offsets_.size(); }
    uint64_t diameter() const { return offsets_.back(); }

    // {diameter - h : h in H}, the mirror image.
    OffsetTuple reflected() const;

    friend bool operator==(const OffsetTuple&, const OffsetTuple&) = default;

private:
    std::vector<uint64_t> offsets_;
};

struct SingularValue {
    double value = 0.0;
    uint64_t truncation_prime = 0;  // largest prime taken exactly
    double tail_bound = 0.0;        // relative error bound from the omitted tail
    bool admissible = false;
};

// nu_H(p). Throws std::invalid_argument when p is not prime.
uint64_t residue_occupancy(const OffsetTuple& tuple, uint64_t p);

// Throws ToleranceNotMet when rel_tol needs a truncation beyond kTruncationCap.
SingularValue singular_series(const OffsetTuple& tuple, double rel_tol = kDefaultRelTol);

// C_2 = prod_{p>2} (1 - 1/(p-1)^2).
SingularValue twin_constant(double rel_tol = kDefaultRelTol);

// The bare finite product over 2 < p <= max_prime, no tail correction.
double twin_constant_partial(uint64_t max_prime);

// S(d) = 2 C_2 prod_{p | d, p > 2} (p-1)/(p-2) for even d, 0 for odd d.
SingularValue pair_singular(uint64_t d);

// P(s) = sum_p p^-s for integer s >= 2.
long double prime_zeta(int s);

struct SeriesAverageOptions {
    double rel_tol = kDefaultRelTol;
    // Upper limit on C(d-1, k-2), the number of tuples summed.
    uint64_t max_terms = 200'000'000;
    unsigned threads = 0;
};

// A_k(d): sum of S({0, d_1, ..., d_{k-2}, d}) over 1 <= d_1 < ... < d_{k-2} < d.
double series_average(unsigned k, uint64_t d, const SeriesAverageOptions& opts = {});

// S(d) d^{k-2} / (k-2)!
double average_main_term(unsigned k, uint64_t d);

// E_k(d) = A_k(d) - S(d) d^{k-2} / (k-2)!
double average_error(unsigned k, uint64_t d, const SeriesAverageOptions& opts = {});

// Exact C(n, r). Sets *overflow (when given) if the value exceeds 64 bits.
uint64_t binomial(uint64_t n, uint64_t r, bool* overflow = nullptr);

}  // namespace gapline
