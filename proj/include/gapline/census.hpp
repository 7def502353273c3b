#pragma once

// Exact empirical counts over the primes up to x.
//
// Every pair or tuple is attributed to its LARGEST element p, and counted
// when p <= x. Offsets are subtracted from p: a pair with gap d is (p - d, p).

#include <cstdint>
#include <map>
#include <vector>

#include "gapline/primes.hpp"

namespace gapline {

struct GapCensus {
    uint64_t x = 0;
    uint64_t prime_total = 0;  // pi(x)
    std::map<uint64_t, uint64_t> counts;  // gap -> number of consecutive pairs

    uint64_t count(uint64_t d) const {
        const auto it = counts.find(d);
        return it == counts.end() ? 0 : it->second;
    }
};

// Outer gap d with strictly increasing inner offsets in (0, d); the tuple is
// {0, inner..., d}, matched by primes p with p - d and every p - inner[j] prime.
struct TupleSpec {
    uint64_t d = 0;
    std::vector<uint64_t> inner;

    void validate() const;
};

GapCensus gap_census(uint64_t x, const SieveOptions& opts = {});

uint64_t pair_count(uint64_t x, uint64_t d, const SieveOptions& opts = {});

uint64_t tuple_count(uint64_t x, const TupleSpec& spec, const SieveOptions& opts = {});

// counts[r] = #{1 <= n <= N : (n, n + h] holds exactly r primes}.
// The vector is trimmed after its last nonzero entry.
std::vector<uint64_t> interval_census(uint64_t n_max, uint64_t h, const SieveOptions& opts = {});

// Ascending argmax set of gap_census(x).counts.
std::vector<uint64_t> jumping_champions(const GapCensus& census);
std::vector<uint64_t> jumping_champions(uint64_t x, const SieveOptions& opts = {});

}  // namespace gapline
