#pragma once

// Brute-force reference implementations used only by the tests. None of
// these touch the segmented sieve or the chunked drivers.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t f = 2; f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

inline std::vector<uint64_t> primes_upto(uint64_t x) {
    std::vector<uint64_t> out;
    for (uint64_t n = 2; n <= x; ++n)
        if (is_prime(n)) out.push_back(n);
    return out;
}

inline std::map<uint64_t, uint64_t> gap_counts(uint64_t x) {
    const auto primes = primes_upto(x);
    std::map<uint64_t, uint64_t> counts;
    for (size_t i = 1; i < primes.size(); ++i) ++counts[primes[i] - primes[i - 1]];
    return counts;
}

inline uint64_t tuple_count(uint64_t x, uint64_t d, const std::vector<uint64_t>& inner) {
    uint64_t hits = 0;
    for (uint64_t p = d + 2; p <= x; ++p) {
        if (!is_prime(p) || !is_prime(p - d)) continue;
        bool all = true;
        for (const uint64_t off : inner) all = all && is_prime(p - off);
        hits += all;
    }
    return hits;
}

// P_r(h, N) by recounting every interval from scratch.
inline std::vector<uint64_t> interval_counts(uint64_t n_max, uint64_t h) {
    std::vector<uint64_t> counts;
    for (uint64_t n = 1; n <= n_max; ++n) {
        uint64_t r = 0;
        for (uint64_t m = n + 1; m <= n + h; ++m) r += is_prime(m);
        if (r >= counts.size()) counts.resize(r + 1, 0);
        ++counts[r];
    }
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
    return counts;
}

// Every subset of {1, ..., d-1} of the given size, lexicographic.
inline std::vector<std::vector<uint64_t>> inner_tuples(uint64_t d, uint64_t size) {
    std::vector<std::vector<uint64_t>> out;
    std::vector<uint64_t> current;
    auto rec = [&](auto&& self, uint64_t start) -> void {
        if (current.size() == size) {
            out.push_back(current);
            return;
        }
        for (uint64_t v = start; v < d; ++v) {
            current.push_back(v);
            self(self, v + 1);
            current.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

// Euler product for S(H) over all primes <= limit, plain doubles, no tail.
inline double singular_product(const std::vector<uint64_t>& h, uint64_t limit) {
    double product = 1.0;
    const double k = static_cast<double>(h.size());
    for (uint64_t p = 2; p <= limit; ++p) {
        if (!is_prime(p)) continue;
        std::vector<bool> hit(p, false);
        uint64_t nu = 0;
        for (const uint64_t v : h)
            if (!hit[v % p]) {
                hit[v % p] = true;
                ++nu;
            }
        const double pd = static_cast<double>(p);
        product *= std::pow(1.0 - 1.0 / pd, -k) * (1.0 - static_cast<double>(nu) / pd);
    }
    return product;
}

}  // namespace oracle
