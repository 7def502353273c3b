// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gapline/asymptotic.hpp"
#include "gapline/bonferroni.hpp"
#include "gapline/census.hpp"
#include "gapline/primes.hpp"
#include "gapline/singular.hpp"
#include "oracles.hpp"

using namespace gapline;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;
    void require(bool ok, std::string note) {
        pass = pass && ok;
        notes.push_back((ok ? "" : "FAILED ") + std::move(note));
    }
};

// 1. Sieve flags against trial division up to 1e6, and pi(1e6).
Verdict sieve_ground_truth() {
    Verdict v;
    const auto start = Clock::now();
    const uint64_t limit = 1'000'000;
    const auto segments = sieve_range(2, limit + 1);
    uint64_t mismatches = 0;
    for (const auto& seg : segments)
        for (uint64_t n = seg.lo(); n < seg.hi(); ++n) mismatches += seg.flag(n) != oracle::is_prime(n);
    const uint64_t count = prime_count(limit);
    const uint64_t oracle_count = oracle::primes_upto(limit).size();
    const double elapsed = seconds_since(start);
    v.require(mismatches == 0, fmt::format("{} flag mismatches in [2, 1e6]", mismatches));
    v.require(count == 78498 && count == oracle_count,
              fmt::format("pi(1e6) = {} (trial division {})", count, oracle_count));
    v.require(elapsed < 5.0, fmt::format("{:.2f} s", elapsed));
    return v;
}

// 2. Exact Bonferroni inequalities and termination for every even d <= 20.
Verdict bonferroni_suite() {
    Verdict v;
    const auto start = Clock::now();
    const uint64_t x = 1'000'000;
    uint64_t inequalities = 0, violations = 0, identities = 0;
    for (uint64_t d = 2; d <= 20; d += 2) {
        // Past R = d/2 every truncation already equals N(x, d).
        const auto report = sandwich_check(x, d, d / 2 + 1);
        const auto n = static_cast<int64_t>(report.n_exact);
        for (uint64_t r = 1; 2 * r + 1 <= d + 3; ++r) {
            inequalities += 2;
            violations += !(report.q(2 * r + 1) <= n) + !(n <= report.q(2 * r));
        }
        const bool identity = exact_identity(x, d);
        identities += identity;
        if (!report.holds || !identity) v.require(false, fmt::format("d = {}", d));
    }
    const double elapsed = seconds_since(start);
    v.require(violations == 0, fmt::format("{} of {} inequalities violated", violations, inequalities));
    v.require(identities == 10, fmt::format("exact identity for {}/10 gaps", identities));
    v.require(elapsed < 120.0, fmt::format("{:.2f} s", elapsed));
    return v;
}

// 3. Twin pairs at 1e8 against S(2) li_2(x).
Verdict twin_prediction() {
    Verdict v;
    const auto start = Clock::now();
    const uint64_t x = 100'000'000;
    const auto census = gap_census(x);
    const double elapsed = seconds_since(start);
    const double main = pair_singular(2).value * li_k(static_cast<double>(x), 2);
    const double err = std::abs(static_cast<double>(census.count(2)) - main) / main;
    v.require(err < 0.02, fmt::format("pi_2 = {}, main = {:.1f}, relative error {:.3e}", census.count(2), main, err));
    v.require(elapsed < 120.0, fmt::format("census {:.2f} s", elapsed));
    return v;
}

// 4. Gap 18 at 1e8 against both predictions, with a trend from 1e6 at the
// same lambda.
Verdict theorem_check() {
    Verdict v;
    const double lambda = 18.0 / std::log(1e8);
    auto ratios = [&](uint64_t x) {
        auto d = static_cast<uint64_t>(std::llround(lambda * std::log(static_cast<double>(x)) / 2) * 2);
        const auto report = make_prediction_report(x, d, gap_census(x).count(d));
        return std::pair{report, d};
    };
    const auto [small, d_small] = ratios(1'000'000);
    const auto [large, d_large] = ratios(100'000'000);
    v.require(large.ratio_refined >= 0.90 && large.ratio_refined <= 1.10,
              fmt::format("N/refined = {:.4f} at 1e8", large.ratio_refined));
    v.require(large.ratio_poisson >= 0.80 && large.ratio_poisson <= 1.20,
              fmt::format("N/poisson = {:.4f} at 1e8", large.ratio_poisson));
    v.require(std::abs(large.ratio_refined - 1) < std::abs(small.ratio_refined - 1),
              fmt::format("refined trend {:.4f} (1e6, d = {}) -> {:.4f}", small.ratio_refined, d_small,
                          large.ratio_refined));
    v.require(std::abs(large.ratio_poisson - 1) < std::abs(small.ratio_poisson - 1),
              fmt::format("poisson trend {:.4f} (1e6, d = {}) -> {:.4f} (d = {})", small.ratio_poisson, d_small,
                          large.ratio_poisson, d_large));
    return v;
}

// 5. Primes in short intervals against the Poisson law.
Verdict gallagher_check() {
    Verdict v;
    const uint64_t n = 10'000'000;
    const auto h = static_cast<uint64_t>(std::llround(std::log(static_cast<double>(n))));
    const double lambda = static_cast<double>(h) / std::log(static_cast<double>(n));
    const auto counts = interval_census(n, h);
    for (uint64_t r = 0; r <= 2; ++r) {
        const double predicted = gallagher_prediction(r, lambda, n);
        const double observed = r < counts.size() ? static_cast<double>(counts[r]) : 0.0;
        const double ratio = observed / predicted;
        v.require(ratio >= 0.90 && ratio <= 1.10, fmt::format("r = {}: ratio {:.4f} (h = {})", r, ratio, h));
    }
    return v;
}

// 6. Singular series consistency.
Verdict singular_consistency() {
    Verdict v;
    const auto c2 = twin_constant();
    const std::string digits = fmt::format("{:.7f}", c2.value).substr(0, 7);
    v.require(digits == "0.66016", fmt::format("C_2 = {:.12f}", c2.value));

    std::mt19937_64 rng(600);
    double worst_pair = 0.0;
    for (int i = 0; i < 500; ++i) {
        const int64_t d = 2 * static_cast<int64_t>(1 + rng() % 5000);
        worst_pair = std::max(worst_pair, rel(pair_singular(d).value,
                                              singular_series(OffsetTuple::normalized({0, d})).value));
    }
    v.require(worst_pair < 1e-8, fmt::format("pair vs product worst {:.2e} over 500 d", worst_pair));

    double worst_shift = 0.0;
    int tuples = 0;
    while (tuples < 100) {
        const size_t k = 3 + tuples % 2;
        std::vector<int64_t> h = {0};
        while (h.size() < k) h.push_back(h.back() + 1 + static_cast<int64_t>(rng() % 30));
        const auto base = singular_series(OffsetTuple::normalized(h));
        if (!base.admissible) continue;
        ++tuples;
        const int64_t shift = static_cast<int64_t>(rng() % 100000) - 50000;
        std::vector<int64_t> moved, mirrored;
        for (const auto e : h) {
            moved.push_back(e + shift);
            mirrored.push_back(shift - e);
        }
        worst_shift = std::max(worst_shift, rel(singular_series(OffsetTuple::normalized(moved)).value, base.value));
        worst_shift =
            std::max(worst_shift, rel(singular_series(OffsetTuple::normalized(mirrored)).value, base.value));
    }
    v.require(worst_shift < 2e-9, fmt::format("translation/reflection worst {:.2e} over 100 tuples", worst_shift));
    return v;
}

// 7. A_3(d) against its main term.
Verdict average_asymptotics() {
    Verdict v;
    const auto start = Clock::now();
    std::vector<double> ratios, errors;
    std::string table;
    for (const uint64_t d : {100, 1000, 10000}) {
        const double average = series_average(3, d);
        const double main = average_main_term(3, d);
        ratios.push_back(average / main);
        errors.push_back(std::abs(average - main) / static_cast<double>(d));
        table += fmt::format("{} d={}: {:.6f}, |E|/d {:.5f}", table.empty() ? "" : ";", d, ratios.back(), errors.back());
    }
    const double elapsed = seconds_since(start);
    const bool increasing = ratios[0] < ratios[1] && ratios[1] < ratios[2];
    bool bounded = true;
    for (const double r : ratios) bounded = bounded && r > 0 && r <= 1.05;
    v.require(increasing && bounded, "ratio" + table);
    v.require(errors[0] > errors[1] && errors[1] > errors[2], "|E_3(d)|/d decreasing");
    v.require(elapsed < 600.0, fmt::format("{:.2f} s", elapsed));
    return v;
}

// 8. Quadrature identities, bracketing, and the estimate trend.
Verdict quadrature() {
    Verdict v;
    double worst = 0.0;
    for (const double x : {1e3, 1e6, 1e9}) worst = std::max(worst, rel(integral_I(x, 0.0), li_k(x, 2)));
    v.require(worst < 1e-10, fmt::format("I(x, 0) vs li_2 worst {:.2e}", worst));

    int points = 0, violations = 0;
    for (int i = 0; i < 10; ++i) {
        const double x = std::pow(10.0, 1.0 + 0.9 * i);
        const double li2 = li_k(x, 2);
        for (int j = 0; j < 10; ++j) {
            const double d = 4.0 * j;
            const double value = integral_I(x, d);
            ++points;
            const bool ok = value >= std::exp(-d / std::log(2.0)) * li2 * (1 - 1e-12) &&
                            value <= std::exp(-d / std::log(x)) * li2 * (1 + 1e-12);
            violations += !ok;
        }
    }
    v.require(violations == 0, fmt::format("bracketing {} of {} points violated", violations, points));

    std::vector<double> gaps;
    std::string trend;
    for (const double x : {1e4, 1e6, 1e8}) {
        const auto check = i_estimate_check(x, std::log(x));
        gaps.push_back(std::abs(check.ratio - 1));
        trend += fmt::format(" {:.5f}", check.ratio);
    }
    v.require(gaps[0] > gaps[1] && gaps[1] > gaps[2], "estimate ratio at lambda = 1:" + trend);
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"sieve ground truth", sieve_ground_truth},
        {"exact Bonferroni suite", bonferroni_suite},
        {"twin-pair prediction", twin_prediction},
        {"gap 18 prediction at 1e8", theorem_check},
        {"Poisson law in short intervals", gallagher_check},
        {"singular series consistency", singular_consistency},
        {"A_3(d) asymptotics", average_asymptotics},
        {"quadrature", quadrature},
    };
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Verdict verdict;
        try {
            verdict = criteria[i].second();
        } catch (const std::exception& e) {
            verdict.require(false, std::string("threw: ") + e.what());
        }
        failures += !verdict.pass;
        std::string detail;
        for (const auto& note : verdict.notes) detail += (detail.empty() ? "" : "; ") + note;
        fmt::print("criterion {}: {} {} ({})\n", i + 1, verdict.pass ? "PASS" : "FAIL", criteria[i].first, detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
