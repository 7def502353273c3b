#include "gapline/census.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace gapline {

namespace {

void check_x(uint64_t x, uint64_t minimum, const char* op) {
    if (x < minimum) throw std::invalid_argument(fmt::format("{} needs x >= {}, got {}", op, minimum, x));
    if (x > kMaxValue) throw std::invalid_argument(fmt::format("{}: x exceeds 2^63 - 1", op));
}

struct ChunkGaps {
    uint64_t primes = 0;
    uint64_t first = 0;
    uint64_t last = 0;
    std::vector<uint64_t> by_gap;  // index = gap

    void add(uint64_t gap) {
        if (gap >= by_gap.size()) by_gap.resize(gap + 1, 0);
        ++by_gap[gap];
    }
};

}  // namespace

void TupleSpec::validate() const {
    if (d == 0) throw std::invalid_argument("tuple outer gap d must be positive");
    uint64_t prev = 0;
    for (const uint64_t off : inner) {
        if (off <= prev) throw std::invalid_argument("tuple inner offsets must be positive and strictly increasing");
        prev = off;
    }
    if (!inner.empty() && inner.back() >= d)
        throw std::invalid_argument(fmt::format("tuple inner offset {} not below d = {}", inner.back(), d));
}

GapCensus gap_census(uint64_t x, const SieveOptions& opts) {
    check_x(x, 3, "gap_census");
    auto chunks = map_chunks<ChunkGaps>(2, x + 1, 0, opts, [](const SieveSegment& seg, uint64_t, uint64_t) {
        ChunkGaps out;
        seg.for_each_prime([&](uint64_t p) {
            if (out.primes++ == 0)
                out.first = p;
            else
                out.add(p - out.last);
            out.last = p;
        });
        return out;
    });

    GapCensus census;
    census.x = x;
    std::vector<uint64_t> totals;
    uint64_t previous = 0;
    for (ChunkGaps& chunk : chunks) {
        if (chunk.primes == 0) continue;
        if (previous) chunk.add(chunk.first - previous);
        previous = chunk.last;
        census.prime_total += chunk.primes;
        if (chunk.by_gap.size() > totals.size()) totals.resize(chunk.by_gap.size(), 0);
        for (size_t g = 0; g < chunk.by_gap.size(); ++g) totals[g] += chunk.by_gap[g];
    }
    for (size_t g = 0; g < totals.size(); ++g)
        if (totals[g]) census.counts.emplace(g, totals[g]);
    return census;
}

uint64_t pair_count(uint64_t x, uint64_t d, const SieveOptions& opts) {
    return tuple_count(x, TupleSpec{d, {}}, opts);
}

uint64_t tuple_count(uint64_t x, const TupleSpec& spec, const SieveOptions& opts) {
    check_x(x, 2, "tuple_count");
    spec.validate();
    const uint64_t d = spec.d;
    if (x < d + 2) return 0;
    const auto partial = map_chunks<uint64_t>(d + 2, x + 1, d, opts, [&](const SieveSegment& seg, uint64_t c_lo, uint64_t) {
        uint64_t hits = 0;
        seg.for_each_prime([&](uint64_t p) {
            if (p < c_lo) return;  // lookback region
            const PrimeWindow window(seg, p, d);
            if (!window.test(p - d)) return;
            for (const uint64_t off : spec.inner)
                if (!window.test(p - off)) return;
            ++hits;
        });
        return hits;
    });
    uint64_t total = 0;
    for (const uint64_t h : partial) total += h;
    return total;
}

std::vector<uint64_t> interval_census(uint64_t n_max, uint64_t h, const SieveOptions& opts) {
    if (n_max < 1 || h < 1) throw std::invalid_argument("interval_census needs N >= 1 and h >= 1");
    if (n_max > kMaxValue - h) throw std::invalid_argument("interval_census: N + h exceeds 2^63 - 1");
    // Index by the interval's top end t = n + h; (n, n + h] = [t - h + 1, t].
    auto partial = map_chunks<std::vector<uint64_t>>(
        h + 1, n_max + h + 1, h, opts, [h](const SieveSegment& seg, uint64_t c_lo, uint64_t c_hi) {
            const auto prime_at = [&](uint64_t n) { return n >= 2 && seg.test(n); };
            std::vector<uint64_t> hist;
            uint64_t inside = 0;
            for (uint64_t n = c_lo - h + 1; n <= c_lo; ++n) inside += prime_at(n);
            for (uint64_t t = c_lo;; ++t) {
                if (inside >= hist.size()) hist.resize(inside + 1, 0);
                ++hist[inside];
                if (t + 1 >= c_hi) break;
                inside += prime_at(t + 1);
                inside -= prime_at(t + 1 - h);
            }
            return hist;
        });
    std::vector<uint64_t> counts;
    for (const auto& hist : partial) {
        if (hist.size() > counts.size()) counts.resize(hist.size(), 0);
        for (size_t r = 0; r < hist.size(); ++r) counts[r] += hist[r];
    }
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
    return counts;
}

std::vector<uint64_t> jumping_champions(const GapCensus& census) {
    uint64_t best = 0;
    for (const auto& [gap, n] : census.counts) best = std::max(best, n);
    std::vector<uint64_t> champions;
    for (const auto& [gap, n] : census.counts)
        if (n == best && best > 0) champions.push_back(gap);
    return champions;
}

std::vector<uint64_t> jumping_champions(uint64_t x, const SieveOptions& opts) {
    check_x(x, 5, "jumping_champions");
    return jumping_champions(gap_census(x, opts));
}

}  // namespace gapline
