#include "gapline/singular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <fmt/format.h>

#include "gapline/errors.hpp"
#include "gapline/primes.hpp"

namespace gapline {

namespace {

// Explicit tail terms j = 2..kTailTerms.
constexpr int kTailTerms = 4;
// Absolute accuracy assumed for each long double prime_zeta(j) - partial sum.
constexpr long double kZetaTailError = 1e-17L;

std::shared_ptr<const std::vector<uint32_t>> primes_through(uint64_t limit) {
    static std::mutex mutex;
    static std::shared_ptr<const std::vector<uint32_t>> table;
    static uint64_t table_limit = 0;
    std::lock_guard lock(mutex);
    if (!table || table_limit < limit) {
        const uint64_t target = std::max({limit, uint64_t{1} << 16, 2 * table_limit});
        auto fresh = std::make_shared<std::vector<uint32_t>>();
        fresh->push_back(2);
        const auto odd = odd_base_primes(target);
        fresh->insert(fresh->end(), odd.begin(), odd.end());
        table = std::move(fresh);
        table_limit = target;
    }
    return table;
}

// log of (1 - 1/p)^{-k} (1 - nu/p)
long double log_factor(uint64_t k, uint64_t nu, uint64_t p) {
    const long double inv = 1.0L / static_cast<long double>(p);
    return -static_cast<long double>(k) * std::log1p(-inv) + std::log1p(-static_cast<long double>(nu) * inv);
}

// Coefficient of p^-j in g_k(p).
long double tail_coefficient(uint64_t k, int j) {
    const long double kk = static_cast<long double>(k);
    return (kk - std::pow(kk, j)) / j;
}

// Bound on |sum_{p>P} sum_{j>kTailTerms} (k - k^j)/(j p^j)|.
long double remainder_bound(uint64_t k, uint64_t cut) {
    if (k <= 1) return 0.0L;
    const long double ratio = static_cast<long double>(k) / static_cast<long double>(cut);
    constexpr int j0 = kTailTerms + 1;
    return static_cast<long double>(cut) * std::pow(ratio, j0) / (j0 * (j0 - 1) * (1.0L - ratio));
}

long double rounding_allowance(uint64_t k) {
    long double total = 0.0L;
    for (int j = 2; j <= kTailTerms; ++j) total += std::fabs(tail_coefficient(k, j));
    return total * kZetaTailError;
}

// sum_{p > cut} g_k(p) through the explicit prime zeta terms.
long double tail_beyond(uint64_t k, uint64_t cut, const std::vector<uint32_t>& primes) {
    if (k <= 1) return 0.0L;
    std::array<long double, kTailTerms + 1> partial{};
    const auto end = std::upper_bound(primes.begin(), primes.end(), cut);
    // Smallest terms first.
    for (auto it = end; it != primes.begin();) {
        const long double inv = 1.0L / static_cast<long double>(*--it);
        long double power = inv;
        for (int j = 2; j <= kTailTerms; ++j) {
            power *= inv;
            partial[j] += power;
        }
    }
    long double total = 0.0L;
    for (int j = 2; j <= kTailTerms; ++j) total += tail_coefficient(k, j) * (prime_zeta(j) - partial[j]);
    return total;
}

// Log of prod_{exact_through < p} g_k(p), certified to rel_tol.
struct Tail {
    long double log_sum = 0.0L;
    double bound = 0.0;
    uint64_t last_prime = 0;
};

Tail shared_tail(uint64_t k, uint64_t exact_through, double rel_tol) {
    uint64_t cut = std::max<uint64_t>({exact_through, 8 * k, 1024});
    double bound = 0.0;
    for (;;) {
        bound = static_cast<double>(std::expm1(remainder_bound(k, cut) + rounding_allowance(k)));
        if (bound <= rel_tol) break;
        if (cut >= kTruncationCap)
            throw ToleranceNotMet(fmt::format("singular series for k = {} cannot reach relative tolerance {:g} "
                                              "below truncation cap {} (best bound {:g})",
                                              k, rel_tol, kTruncationCap, bound),
                                  bound);
        cut = std::min(2 * cut, kTruncationCap);
    }
    const auto primes = primes_through(cut);
    Tail tail;
    tail.bound = bound;
    for (const uint32_t p : *primes) {
        if (p > cut) break;
        tail.last_prime = p;
        if (p > exact_through) tail.log_sum += log_factor(k, k, p);
    }
    tail.log_sum += tail_beyond(k, cut, *primes);
    return tail;
}

uint64_t distinct_residues(std::span<const uint64_t> offsets, uint64_t p, std::vector<uint64_t>& scratch) {
    scratch.clear();
    for (const uint64_t h : offsets) scratch.push_back(h % p);
    std::sort(scratch.begin(), scratch.end());
    return static_cast<uint64_t>(std::unique(scratch.begin(), scratch.end()) - scratch.begin());
}

int mobius(int n) {
    int result = 1;
    for (int f = 2; f * f <= n; ++f) {
        if (n % f) continue;
        n /= f;
        if (n % f == 0) return 0;
        result = -result;
    }
    return n > 1 ? -result : result;
}

// zeta(m) - 1 for integer m >= 2: direct sum to N - 1, Euler-Maclaurin tail.
long double zeta_minus_one(int m) {
    constexpr int n_cut = 64;
    long double head = 0.0L;
    for (int n = n_cut - 1; n >= 2; --n) head += std::pow(static_cast<long double>(n), -m);
    const long double big_n = n_cut;
    long double tail = std::pow(big_n, 1 - m) / (m - 1) + std::pow(big_n, -m) / 2;
    constexpr std::array<long double, 6> bernoulli = {1.0L / 6, -1.0L / 30, 1.0L / 42,
                                                      -1.0L / 30, 5.0L / 66, -691.0L / 2730};
    long double rising = m;  // m (m+1) ... (m + 2i - 2)
    long double factorial = 2;  // (2i)!
    for (size_t i = 0; i < bernoulli.size(); ++i) {
        const int order = 2 * static_cast<int>(i) + 1;  // derivative order 2i - 1 with i from 1
        tail += bernoulli[i] / factorial * rising * std::pow(big_n, -m - order);
        rising *= static_cast<long double>(m + order) * (m + order + 1);
        factorial *= static_cast<long double>(2 * i + 3) * (2 * i + 4);
    }
    return head + tail;
}

}  // namespace

OffsetTuple OffsetTuple::normalized(std::vector<int64_t> offsets) {
    if (offsets.empty()) throw std::invalid_argument("offset tuple must be non-empty");
    std::sort(offsets.begin(), offsets.end());
    if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
        throw std::invalid_argument("offset tuple entries must be distinct");
    std::vector<uint64_t> shifted;
    shifted.reserve(offsets.size());
    for (const int64_t h : offsets) shifted.push_back(static_cast<uint64_t>(h - offsets.front()));
    return OffsetTuple(std::move(shifted));
}

OffsetTuple::OffsetTuple(std::vector<uint64_t> offsets) : offsets_(std::move(offsets)) {
    if (offsets_.empty() || offsets_.front() != 0)
        throw std::invalid_argument("offset tuple must start at 0");
    for (size_t i = 1; i < offsets_.size(); ++i)
        if (offsets_[i] <= offsets_[i - 1]) throw std::invalid_argument("offset tuple must be strictly increasing");
}

OffsetTuple OffsetTuple::reflected() const {
    std::vector<uint64_t> mirror;
    mirror.reserve(offsets_.size());
    for (auto it = offsets_.rbegin(); it != offsets_.rend(); ++it) mirror.push_back(diameter() - *it);
    return OffsetTuple(std::move(mirror));
}

uint64_t residue_occupancy(const OffsetTuple& tuple, uint64_t p) {
    if (!is_prime_trial(p)) throw std::invalid_argument(fmt::format("residue_occupancy: {} is not prime", p));
    std::vector<uint64_t> scratch;
    return distinct_residues(tuple.offsets(), p, scratch);
}

long double prime_zeta(int s) {
    if (s < 2) throw std::invalid_argument("prime_zeta needs s >= 2");
    // P(s) = sum_n mu(n)/n log zeta(n s)
    long double total = 0.0L;
    for (int n = 1; n * s < 80; ++n) {
        const int mu = mobius(n);
        if (mu) total += static_cast<long double>(mu) / n * std::log1p(zeta_minus_one(n * s));
    }
    return total;
}

SingularValue singular_series(const OffsetTuple& tuple, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
    const uint64_t k = tuple.k();
    const uint64_t exact_through = std::max<uint64_t>(tuple.diameter(), k);
    const auto primes = primes_through(exact_through);
    std::vector<uint64_t> scratch;

    SingularValue out;
    long double log_sum = 0.0L;
    for (const uint32_t p : *primes) {
        if (p > exact_through) break;
        const uint64_t nu = distinct_residues(tuple.offsets(), p, scratch);
        if (nu == p) {
            out.truncation_prime = p;
            return out;  // inadmissible: exactly zero
        }
        log_sum += log_factor(k, nu, p);
    }
    const Tail tail = shared_tail(k, exact_through, rel_tol);
    out.value = static_cast<double>(std::exp(log_sum + tail.log_sum));
    out.truncation_prime = tail.last_prime;
    out.tail_bound = tail.bound;
    out.admissible = true;
    return out;
}

SingularValue twin_constant(double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
    // Factors 1 - 1/(p-1)^2 coincide with g_2(p) for p > 2; only the tail
    // machinery is shared with singular_series.
    const Tail plan = shared_tail(2, 2, rel_tol);
    const auto primes = primes_through(plan.last_prime);
    long double log_sum = 0.0L;
    for (const uint32_t p : *primes) {
        if (p > plan.last_prime) break;
        if (p == 2) continue;
        const long double q = static_cast<long double>(p - 1);
        log_sum += std::log1p(-1.0L / (q * q));
    }
    log_sum += tail_beyond(2, plan.last_prime, *primes);
    return SingularValue{static_cast<double>(std::exp(log_sum)), plan.last_prime, plan.bound, true};
}

double twin_constant_partial(uint64_t max_prime) {
    const auto primes = primes_through(max_prime);
    double product = 1.0;
    for (const uint32_t p : *primes) {
        if (p > max_prime) break;
        if (p == 2) continue;
        const double q = static_cast<double>(p - 1);
        product *= 1.0 - 1.0 / (q * q);
    }
    return product;
}

SingularValue pair_singular(uint64_t d) {
    if (d == 0) throw std::invalid_argument("pair_singular needs d >= 1");
    static const SingularValue c2 = twin_constant(1e-13);
    if (d % 2) return SingularValue{0.0, 2, 0.0, false};
    double value = 2.0 * c2.value;
    uint64_t rest = d;
    while (rest % 2 == 0) rest /= 2;
    for (uint64_t f = 3; f <= rest / f; f += 2) {
        if (rest % f) continue;
        while (rest % f == 0) rest /= f;
        value *= static_cast<double>(f - 1) / static_cast<double>(f - 2);
    }
    if (rest > 1) value *= static_cast<double>(rest - 1) / static_cast<double>(rest - 2);
    return SingularValue{value, c2.truncation_prime, c2.tail_bound, true};
}

uint64_t binomial(uint64_t n, uint64_t r, bool* overflow) {
    if (overflow) *overflow = false;
    if (r > n) return 0;
    r = std::min(r, n - r);
    unsigned __int128 value = 1;
    for (uint64_t i = 0; i < r; ++i) {
        value = value * (n - i) / (i + 1);
        if (value > UINT64_MAX) {
            if (overflow) *overflow = true;
            return UINT64_MAX;
        }
    }
    return static_cast<uint64_t>(value);
}

double series_average(unsigned k, uint64_t d, const SeriesAverageOptions& opts) {
    if (k < 3) throw std::invalid_argument("series_average needs k >= 3");
    if (d < 2 || d % 2) throw std::invalid_argument(fmt::format("series_average needs even d >= 2, got {}", d));
    if (!(opts.rel_tol > 0.0 && opts.rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
    const uint64_t choose = k - 2;
    const uint64_t pool = d - 1;  // inner offsets come from 1..d-1
    bool overflow = false;
    const uint64_t terms = binomial(pool, choose, &overflow);
    if (overflow || terms > opts.max_terms)
        throw CapExceeded(fmt::format("A_{}({}) sums C({}, {}) tuples, above the cap of {}; "
                                      "use a smaller d or k, or raise the cap",
                                      k, d, pool, choose, opts.max_terms));
    if (terms == 0) return 0.0;

    const uint64_t exact_through = std::max<uint64_t>(d, k);
    const Tail tail = shared_tail(k, exact_through, opts.rel_tol);
    const auto primes_ptr = primes_through(exact_through);
    std::vector<uint64_t> primes;
    for (const uint32_t p : *primes_ptr) {
        if (p > exact_through) break;
        primes.push_back(p);
    }
    // log_table[i][nu] for nu = 1..k; nu == p marks a zero factor.
    std::vector<std::vector<long double>> log_table(primes.size());
    for (size_t i = 0; i < primes.size(); ++i) {
        const uint64_t p = primes[i];
        log_table[i].assign(k + 1, 0.0L);
        for (uint64_t nu = 1; nu <= std::min<uint64_t>(k, p); ++nu)
            if (nu < p) log_table[i][nu] = log_factor(k, nu, p);
    }

    // One partial sum per first inner offset, each in lexicographic order.
    const uint64_t first_max = pool - choose + 1;
    std::vector<long double> partial(first_max, 0.0L);
    run_indexed(first_max, opts.threads, [&](size_t index) {
        const uint64_t first = index + 1;
        std::vector<uint64_t> tuple(k);
        tuple.front() = 0;
        tuple.back() = d;
        // tuple[1] = first, tuple[2..k-2] = combination of remaining from (first, d-1]
        std::vector<uint64_t> rest(choose - 1);
        for (size_t j = 0; j < rest.size(); ++j) rest[j] = first + 1 + j;
        std::vector<uint64_t> scratch;
        long double sum = 0.0L;
        for (;;) {
            if (!rest.empty() && rest.back() > pool) break;
            tuple[1] = first;
            std::copy(rest.begin(), rest.end(), tuple.begin() + 2);
            long double log_sum = tail.log_sum;
            bool admissible = true;
            for (size_t i = 0; i < primes.size(); ++i) {
                const uint64_t nu = distinct_residues(tuple, primes[i], scratch);
                if (nu == primes[i]) {
                    admissible = false;
                    break;
                }
                log_sum += log_table[i][nu];
            }
            if (admissible) sum += std::exp(log_sum);
            if (rest.empty()) break;
            // next combination of rest within (first, pool]
            size_t pos = rest.size();
            while (pos > 0 && rest[pos - 1] == pool - (rest.size() - pos)) --pos;
            if (pos == 0) break;
            ++rest[pos - 1];
            for (size_t j = pos; j < rest.size(); ++j) rest[j] = rest[j - 1] + 1;
        }
        partial[index] = sum;
    });

    // Pairwise reduction in a fixed order.
    while (partial.size() > 1) {
        std::vector<long double> next((partial.size() + 1) / 2);
        for (size_t i = 0; i < next.size(); ++i)
            next[i] = partial[2 * i] + (2 * i + 1 < partial.size() ? partial[2 * i + 1] : 0.0L);
        partial.swap(next);
    }
    return static_cast<double>(partial.front());
}

double average_main_term(unsigned k, uint64_t d) {
    if (k < 3) throw std::invalid_argument("average_main_term needs k >= 3");
    const double sd = pair_singular(d).value;
    return sd * std::exp((k - 2) * std::log(static_cast<double>(d)) - std::lgamma(static_cast<double>(k - 1)));
}

double average_error(unsigned k, uint64_t d, const SeriesAverageOptions& opts) {
    return series_average(k, d, opts) - average_main_term(k, d);
}

}  // namespace gapline
