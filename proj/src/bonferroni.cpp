#include "gapline/bonferroni.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "gapline/census.hpp"
#include "gapline/errors.hpp"
#include "gapline/singular.hpp"

namespace gapline {

namespace {

void check_args(uint64_t x, uint64_t d, const BonferroniOptions& opts) {
    if (x < 2) throw std::invalid_argument(fmt::format("x must be >= 2, got {}", x));
    if (x > kMaxValue) throw std::invalid_argument("x exceeds 2^63 - 1");
    if (d < 2 || d % 2) throw std::invalid_argument(fmt::format("d must be even and >= 2, got {}", d));
    if (d > opts.max_d)
        throw CapExceeded(fmt::format("d = {} exceeds the inclusion-exclusion cap of {}; raise max_d (tuple "
                                      "families grow like C(d-1, k-2))",
                                      d, opts.max_d));
}

}  // namespace

uint64_t PairHistogram::pairs() const {
    uint64_t total = 0;
    for (const uint64_t n : between) total += n;
    return total;
}

PairHistogram pair_histogram(uint64_t x, uint64_t d, const BonferroniOptions& opts) {
    check_args(x, d, opts);
    PairHistogram hist{x, d, std::vector<uint64_t>(d, 0)};
    if (x < d + 2) return hist;
    const auto partial = map_chunks<std::vector<uint64_t>>(
        d + 2, x + 1, d, opts.sieve, [d](const SieveSegment& seg, uint64_t c_lo, uint64_t) {
            std::vector<uint64_t> local(d, 0);
            seg.for_each_prime([&](uint64_t p) {
                if (p < c_lo) return;
                const PrimeWindow window(seg, p, d);
                if (!is_prime(p - d, window)) return;
                uint64_t inside = 0;
                for (uint64_t n = p - d + 1; n < p; ++n) inside += is_prime(n, window);
                ++local[inside];
            });
            return local;
        });
    for (const auto& local : partial)
        for (uint64_t m = 0; m < d; ++m) hist.between[m] += local[m];
    return hist;
}

int64_t q_from_histogram(const PairHistogram& hist, uint64_t n) {
    if (n < 2) throw std::invalid_argument("truncation order N must be >= 2");
    __int128 total = 0;
    for (uint64_t m = 0; m < hist.between.size(); ++m) {
        if (!hist.between[m]) continue;
        // sum_{j=0}^{J} (-1)^j C(m, j), J = min(N - 2, m)
        const uint64_t top = std::min<uint64_t>(n - 2, m);
        __int128 weight = 0;
        for (uint64_t j = 0; j <= top; ++j) {
            const __int128 c = binomial(m, j);
            weight += (j % 2 ? -c : c);
        }
        total += weight * static_cast<__int128>(hist.between[m]);
    }
    if (total > std::numeric_limits<int64_t>::max() || total < std::numeric_limits<int64_t>::min())
        throw std::overflow_error(fmt::format("Q_{} does not fit in 64 bits", n));
    return static_cast<int64_t>(total);
}

int64_t q_truncation(uint64_t x, uint64_t d, uint64_t n, const BonferroniOptions& opts) {
    if (n < 2) throw std::invalid_argument("truncation order N must be >= 2");
    return q_from_histogram(pair_histogram(x, d, opts), n);
}

SandwichReport sandwich_check(uint64_t x, uint64_t d, uint64_t r_max, const BonferroniOptions& opts) {
    if (r_max < 1) throw std::invalid_argument("R_max must be >= 1");
    check_args(x, d, opts);
    if (x < 3) throw std::invalid_argument("sandwich_check needs x >= 3");
    const PairHistogram hist = pair_histogram(x, d, opts);

    SandwichReport report;
    report.x = x;
    report.d = d;
    report.r_max = r_max;
    report.n_exact = gap_census(x, opts.sieve).count(d);
    const uint64_t top = std::max<uint64_t>(2 * r_max + 1, d + 2);
    for (uint64_t n = 2; n <= top; ++n) report.q_values.push_back(q_from_histogram(hist, n));

    const auto exact = static_cast<int64_t>(report.n_exact);
    for (uint64_t n = 2; n < top; ++n) {
        if (report.q(n) == exact && report.q(n + 1) == exact) {
            report.terminated_at = n;
            break;
        }
    }
    report.holds = true;
    for (uint64_t r = 1; r <= r_max; ++r)
        if (!(report.q(2 * r + 1) <= exact && exact <= report.q(2 * r))) report.holds = false;

    const double main = pair_singular(d).value * li_k(static_cast<double>(x), 2, opts.quadrature);
    report.residual_2 = static_cast<double>(hist.pairs()) - main;
    return report;
}

bool exact_identity(uint64_t x, uint64_t d, const BonferroniOptions& opts) {
    check_args(x, d, opts);
    if (x < 3) throw std::invalid_argument("exact_identity needs x >= 3");
    const int64_t q = q_truncation(x, d, d + 1, opts);
    return q == static_cast<int64_t>(gap_census(x, opts.sieve).count(d));
}

std::vector<ResidualRow> residuals(uint64_t x, uint64_t d, unsigned k_max, const BonferroniOptions& opts) {
    if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
    check_args(x, d, opts);
    const PairHistogram hist = pair_histogram(x, d, opts);
    const double xd = static_cast<double>(x);

    std::vector<ResidualRow> rows;
    ResidualRow pairs_row;
    pairs_row.k = 2;
    pairs_row.empirical = hist.pairs();
    pairs_row.main_term = pair_singular(d).value * li_k(xd, 2, opts.quadrature);
    pairs_row.residual = static_cast<double>(pairs_row.empirical) - pairs_row.main_term;
    rows.push_back(pairs_row);

    SeriesAverageOptions avg;
    avg.rel_tol = opts.rel_tol;
    avg.threads = opts.sieve.threads;
    for (unsigned k = 3; k <= k_max; ++k) {
        ResidualRow row;
        row.k = k;
        for (uint64_t m = 0; m < hist.between.size(); ++m) row.empirical += hist.between[m] * binomial(m, k - 2);
        row.main_term = series_average(k, d, avg) * li_k(xd, static_cast<int>(k), opts.quadrature);
        row.residual = static_cast<double>(row.empirical) - row.main_term;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gapline
