#pragma once

// Exact primality data for integer ranges.
//
// A SieveSegment stores one bit per odd integer in [lo, hi); 2 is answered
// from the range bounds alone and every other even integer is composite.
//
//   bit i  ->  first_odd + 2*i      (first_odd = lo | 1)
//
// Ranges are sieved in independent segments against the odd base primes
// <= sqrt(hi). Segment results are always reassembled in range order, so the
// output never depends on how many worker threads were used.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gapline {

// Largest integer accepted anywhere in the library (2^63 - 1).
inline constexpr uint64_t kMaxValue = (uint64_t{1} << 63) - 1;
inline constexpr uint64_t kMinSegmentSize = 64;
// 2^22 integers per segment -> 256 KiB of odd-only flags, sized for L2.
inline constexpr uint64_t kDefaultSegmentSize = uint64_t{1} << 22;

uint64_t isqrt(uint64_t n);

// Odd primes <= limit, by a plain sieve. Used as sieving primes.
std::vector<uint32_t> odd_base_primes(uint64_t limit);

// Deterministic trial division; the reference oracle for small n.
bool is_prime_trial(uint64_t n);

class SieveSegment {
public:
    // Flags for [lo, hi) computed from `base`, which must contain every odd
    // prime <= sqrt(hi - 1).
    static SieveSegment sieve(uint64_t lo, uint64_t hi, std::span<const uint32_t> base);

    SieveSegment() = default;

    // Adopts raw packed flags (as read back from a checkpoint file).
    SieveSegment(uint64_t lo, uint64_t hi, std::vector<uint64_t> words);

    uint64_t lo() const { return lo_; }
    uint64_t hi() const { return hi_; }
    bool contains(uint64_t n) const { return n >= lo_ && n < hi_; }

    // Exact primality of n; throws std::out_of_range outside [lo, hi).
    bool flag(uint64_t n) const;

    // Unchecked variant for hot loops. n must lie in [lo, hi).
    bool test(uint64_t n) const {
        if ((n & 1) == 0) return n == 2;
        const uint64_t i = (n - first_odd_) >> 1;
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    // Number of primes in [lo, hi).
    uint64_t count() const;

    std::span<const uint64_t> words() const { return words_; }

    // Calls fn(p) for every prime p in [lo, hi), ascending.
    template <class Fn>
    void for_each_prime(Fn&& fn) const {
        if (lo_ <= 2 && hi_ > 2) fn(uint64_t{2});
        for (size_t w = 0; w < words_.size(); ++w) {
            uint64_t bits = words_[w];
            while (bits) {
                const uint64_t i = (uint64_t{w} << 6) + static_cast<uint64_t>(__builtin_ctzll(bits));
                fn(first_odd_ + 2 * i);
                bits &= bits - 1;
            }
        }
    }

    friend bool operator==(const SieveSegment&, const SieveSegment&) = default;

private:
    static uint64_t bit_count(uint64_t lo, uint64_t hi);

    uint64_t lo_ = 2;
    uint64_t hi_ = 2;
    uint64_t first_odd_ = 3;
    std::vector<uint64_t> words_;
};

// Read-only view of primality on [anchor - width, anchor], backed by a
// segment. Integers below 2 are known composite and need no backing; any
// other query outside the window throws.
class PrimeWindow {
public:
    PrimeWindow(const SieveSegment& segment, uint64_t anchor, uint64_t width);

    uint64_t anchor() const { return anchor_; }
    uint64_t width() const { return width_; }
    bool covers(uint64_t n) const { return n <= anchor_ && n >= floor_; }
    bool test(uint64_t n) const;

private:
    const SieveSegment* segment_;
    uint64_t anchor_;
    uint64_t width_;
    uint64_t floor_;
};

bool is_prime(uint64_t n, const PrimeWindow& window);

struct SieveOptions {
    uint64_t segment_size = kDefaultSegmentSize;
    unsigned threads = 0;  // 0: use std::thread::hardware_concurrency()
    // When set, segments are read from / written to checkpoint files here.
    std::optional<std::filesystem::path> cache_dir;
};

// Segments tiling [lo, hi) in order, each at most segment_size wide.
std::vector<SieveSegment> sieve_range(uint64_t lo, uint64_t hi, const SieveOptions& opts = {});

// pi(x), the number of primes <= x.
uint64_t prime_count(uint64_t x, const SieveOptions& opts = {});

// Checkpoint format (little-endian):
//   "GAPSIEVE" | u32 version | u64 lo | u64 hi | u64 word count | u64 words...
void save_segment(const std::filesystem::path& path, const SieveSegment& segment);
SieveSegment load_segment(const std::filesystem::path& path);

unsigned resolve_threads(unsigned requested);

// Runs task(0..count-1) on up to `threads` workers. Every index runs
// exactly once; callers store results by index.
void run_indexed(size_t count, unsigned threads, const std::function<void(size_t)>& task);

namespace detail {
SieveSegment obtain_segment(uint64_t lo, uint64_t hi, std::span<const uint32_t> base,
                            const SieveOptions& opts);
void validate_range(uint64_t lo, uint64_t hi, const SieveOptions& opts);
}  // namespace detail

// Splits [lo, hi) into segment_size chunks and calls
//   fn(segment, chunk_lo, chunk_hi)
// where `segment` covers [max(2, chunk_lo - lookback), chunk_hi). Results
// come back in chunk order regardless of scheduling.
template <class Result, class Fn>
std::vector<Result> map_chunks(uint64_t lo, uint64_t hi, uint64_t lookback, const SieveOptions& opts,
                               Fn&& fn) {
    detail::validate_range(lo, hi, opts);
    const uint64_t step = opts.segment_size;
    const size_t chunks = static_cast<size_t>((hi - lo + step - 1) / step);
    const auto base = odd_base_primes(isqrt(hi - 1));
    std::vector<Result> results(chunks);
    run_indexed(chunks, opts.threads, [&](size_t i) {
        const uint64_t c_lo = lo + i * step;
        const uint64_t c_hi = std::min(hi, c_lo + step);
        const uint64_t s_lo = c_lo > lookback + 2 ? c_lo - lookback : 2;
        const SieveSegment seg = detail::obtain_segment(s_lo, c_hi, base, opts);
        results[i] = fn(seg, c_lo, c_hi);
    });
    return results;
}

}  // namespace gapline
