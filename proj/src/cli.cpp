#include "gapline/cli.hpp"

#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "gapline/asymptotic.hpp"
#include "gapline/bonferroni.hpp"
#include "gapline/census.hpp"
#include "gapline/primes.hpp"
#include "gapline/serialize.hpp"
#include "gapline/singular.hpp"

namespace gapline::cli {

using nlohmann::ordered_json;

uint64_t parse_count(std::string_view text) {
    const auto fail = [&] { return std::invalid_argument(fmt::format("'{}' is not a non-negative integer", text)); };
    std::string digits;
    int frac = 0;
    size_t i = 0;
    bool seen_point = false;
    for (; i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'); ++i) {
        if (text[i] == '.') {
            if (seen_point) throw fail();
            seen_point = true;
        } else {
            digits += text[i];
            frac += seen_point;
        }
    }
    if (digits.empty()) throw fail();
    long exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        ++i;
        bool negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
        if (i == text.size()) throw fail();
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])) || exponent > 1000) throw fail();
            exponent = exponent * 10 + (text[i] - '0');
        }
        if (negative) exponent = -exponent;
    }
    long shift = exponent - frac;
    // Drop trailing zeros that a negative shift would divide away.
    while (shift < 0 && digits.size() > 1 && digits.back() == '0') {
        digits.pop_back();
        ++shift;
    }
    if (shift < 0 && !(digits.find_first_not_of('0') == std::string::npos)) throw fail();
    if (shift < 0) shift = 0;
    unsigned __int128 value = 0;
    for (const char c : digits) {
        value = value * 10 + static_cast<unsigned>(c - '0');
        if (value > kMaxValue) throw std::invalid_argument(fmt::format("'{}' exceeds 2^63 - 1", text));
    }
    for (long s = 0; s < shift && value; ++s) {
        value *= 10;
        if (value > kMaxValue) throw std::invalid_argument(fmt::format("'{}' exceeds 2^63 - 1", text));
    }
    return static_cast<uint64_t>(value);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 digest failed");
    std::string hex;
    for (unsigned i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

namespace {

std::vector<uint64_t> parse_list(const std::string& text) {
    std::vector<uint64_t> values;
    std::stringstream stream(text);
    for (std::string item; std::getline(stream, item, ',');)
        if (!item.empty()) values.push_back(parse_count(item));
    return values;
}

std::vector<int64_t> parse_signed_list(const std::string& text) {
    std::vector<int64_t> values;
    std::stringstream stream(text);
    for (std::string item; std::getline(stream, item, ',');) {
        if (item.empty()) continue;
        const bool negative = item.front() == '-';
        const auto magnitude = static_cast<int64_t>(parse_count(negative ? item.substr(1) : item));
        values.push_back(negative ? -magnitude : magnitude);
    }
    return values;
}

std::string join(const std::vector<uint64_t>& values) {
    std::string text;
    for (size_t i = 0; i < values.size(); ++i) text += (i ? ";" : "") + std::to_string(values[i]);
    return text;
}

struct Outcome {
    std::string body;
    ordered_json parameters = ordered_json::object();
    bool invariant_ok = true;
    std::string invariant_message;
};

std::string render(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Prime gap statistics: exact censuses, singular series and inclusion-exclusion checks", "gapline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    std::string manifest_path;
    std::string format;
    unsigned threads = 0;
    std::string segment_size = std::to_string(kDefaultSegmentSize);
    app.add_option("--out", out_path, "Write the report here instead of stdout");
    app.add_option("--manifest", manifest_path, "Run manifest path (default: <out>.manifest.json)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "Worker cap (0 = available parallelism)");
    app.add_option("--segment-size", segment_size, "Integers per sieve segment");

    // Subcommand flags. x-like values are strings so scientific notation works.
    std::string x, d, n, h, inner, offsets, li_orders = "2", avg_orders = "3", r_max = "2", k_max = "3";
    double rel_tol = kDefaultRelTol;
    bool twin = false;

    std::map<std::string, std::function<Outcome(const SieveOptions&, const std::string&)>> handlers;
    auto add = [&](const std::string& name, const std::string& help) { return app.add_subcommand(name, help); };

    auto* census_cmd = add("census", "Consecutive-prime gap census N(x, d) for all d");
    census_cmd->add_option("--x", x, "Upper bound on the larger prime")->required();
    handlers["census"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        const auto census = gap_census(parse_count(x), sieve);
        Outcome o;
        o.parameters = {{"x", census.x}};
        o.body = fmt_ == "json" ? render(census_json(census)) : census_csv(census);
        return o;
    };

    auto* pairs_cmd = add("pairs", "pi_2(x, d): primes p <= x with p - d prime");
    pairs_cmd->add_option("--x", x)->required();
    pairs_cmd->add_option("--d", d)->required();
    handlers["pairs"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        const uint64_t xv = parse_count(x), dv = parse_count(d);
        const uint64_t count = pair_count(xv, dv, sieve);
        Outcome o;
        o.parameters = {{"x", xv}, {"d", dv}};
        o.body = fmt_ == "json" ? render({{"x", xv}, {"d", dv}, {"count", count}})
                                : fmt::format("x,d,count\n{},{},{}\n", xv, dv, count);
        return o;
    };

    auto* tuples_cmd = add("tuples", "pi_k(x, d_1, ..., d_{k-2}, d) for one tuple {0, inner..., d}");
    tuples_cmd->add_option("--x", x)->required();
    tuples_cmd->add_option("--d", d)->required();
    tuples_cmd->add_option("--inner", inner, "Comma-separated inner offsets");
    handlers["tuples"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        const uint64_t xv = parse_count(x);
        const TupleSpec spec{parse_count(d), parse_list(inner)};
        const uint64_t count = tuple_count(xv, spec, sieve);
        Outcome o;
        o.parameters = {{"x", xv}, {"d", spec.d}, {"inner", spec.inner}};
        o.body = fmt_ == "json" ? render({{"x", xv}, {"d", spec.d}, {"inner", spec.inner}, {"count", count}})
                                : fmt::format("x,d,inner,count\n{},{},{},{}\n", xv, spec.d, join(spec.inner), count);
        return o;
    };

    auto* intervals_cmd = add("intervals", "P_r(h, N) with the Poisson prediction at lambda = h / log N");
    intervals_cmd->set_help_flag("--help", "Print this help message and exit");
    intervals_cmd->add_option("--n", n, "Number of interval starts N")->required();
    intervals_cmd->add_option("--h", h, "Interval length (default: round(log N))");
    handlers["intervals"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        const uint64_t nv = parse_count(n);
        const uint64_t hv = h.empty() ? static_cast<uint64_t>(std::llround(std::log(static_cast<double>(nv))))
                                      : parse_count(h);
        const auto counts = interval_census(nv, hv, sieve);
        const double lambda = static_cast<double>(hv) / std::log(static_cast<double>(nv));
        Outcome o;
        o.parameters = {{"n", nv}, {"h", hv}};
        ordered_json rows = ordered_json::array();
        std::string csv = "r,count,predicted,ratio\n";
        for (size_t r = 0; r < counts.size(); ++r) {
            const double predicted = gallagher_prediction(r, lambda, nv);
            const double ratio = static_cast<double>(counts[r]) / predicted;
            csv += fmt::format("{},{},{},{}\n", r, counts[r], format_real(predicted), format_real(ratio));
            rows.push_back({{"r", r}, {"count", counts[r]}, {"predicted", json_real(predicted)},
                            {"ratio", json_real(ratio)}});
        }
        o.body = fmt_ == "json" ? render({{"n", nv}, {"h", hv}, {"lambda", json_real(lambda)}, {"rows", rows}}) : csv;
        return o;
    };

    auto* champions_cmd = add("champions", "Most frequent consecutive-prime gaps up to x");
    champions_cmd->add_option("--x", x)->required();
    handlers["champions"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        const uint64_t xv = parse_count(x);
        if (xv < 5) throw std::invalid_argument("champions needs x >= 5");
        const auto census = gap_census(xv, sieve);
        const auto champions = jumping_champions(census);
        Outcome o;
        o.parameters = {{"x", xv}};
        std::string csv = "x,gap,count\n";
        ordered_json list = ordered_json::array();
        for (const uint64_t g : champions) {
            csv += fmt::format("{},{},{}\n", xv, g, census.count(g));
            list.push_back({{"gap", g}, {"count", census.count(g)}});
        }
        o.body = fmt_ == "json" ? render({{"x", xv}, {"champions", list}}) : csv;
        return o;
    };

    auto* singular_cmd = add("singular", "Singular series S(H), S(d) or the twin prime constant");
    singular_cmd->add_option("--offsets", offsets, "Comma-separated tuple H");
    singular_cmd->add_option("--d", d, "Pair gap d (closed form)");
    singular_cmd->add_flag("--twin", twin, "Twin prime constant C_2");
    singular_cmd->add_option("--rel-tol", rel_tol, "Relative tolerance");
    handlers["singular"] = [&](const SieveOptions&, const std::string& fmt_) {
        Outcome o;
        SingularValue value;
        std::string label;
        if (twin) {
            value = twin_constant(rel_tol);
            label = "C2";
            o.parameters = {{"twin", true}, {"rel_tol", json_real(rel_tol)}};
        } else if (!offsets.empty()) {
            const auto tuple = OffsetTuple::normalized(parse_signed_list(offsets));
            value = singular_series(tuple, rel_tol);
            label = join(std::vector<uint64_t>(tuple.offsets().begin(), tuple.offsets().end()));
            o.parameters = {{"offsets", std::vector<uint64_t>(tuple.offsets().begin(), tuple.offsets().end())},
                            {"rel_tol", json_real(rel_tol)}};
        } else {
            const uint64_t dv = parse_count(d);
            value = pair_singular(dv);
            label = fmt::format("0;{}", dv);
            o.parameters = {{"d", dv}};
        }
        if (fmt_ == "json") {
            auto doc = singular_json(value);
            doc["tuple"] = label;
            o.body = render(doc);
        } else {
            o.body = fmt::format("tuple,value,truncation_prime,tail_bound,admissible\n{},{},{},{},{}\n", label,
                                 format_real(value.value), value.truncation_prime, format_real(value.tail_bound),
                                 value.admissible ? 1 : 0);
        }
        return o;
    };

    auto* avg_cmd = add("avg-series", "A_k(d), its main term S(d) d^{k-2}/(k-2)! and E_k(d)");
    avg_cmd->add_option("--k", avg_orders, "Comma-separated k values (>= 3)")->capture_default_str();
    avg_cmd->add_option("--d", d, "Comma-separated even d values")->required();
    avg_cmd->add_option("--rel-tol", rel_tol);
    handlers["avg-series"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        SeriesAverageOptions opts;
        opts.rel_tol = rel_tol;
        opts.threads = sieve.threads;
        const auto ks = parse_list(avg_orders);
        const auto ds = parse_list(d);
        std::vector<AverageRow> rows;
        for (const uint64_t kv : ks)
            for (const uint64_t dv : ds) rows.push_back(make_average_row(static_cast<unsigned>(kv), dv, opts));
        Outcome o;
        o.parameters = {{"k", ks}, {"d", ds}, {"rel_tol", json_real(rel_tol)}};
        o.body = fmt_ == "json" ? render(average_json(rows)) : average_csv(rows);
        return o;
    };

    auto* li_cmd = add("li", "li_k(x) with its leading term x/(log x)^k and error scale");
    li_cmd->add_option("--x", x, "Comma-separated x values")->required();
    li_cmd->add_option("--k", li_orders, "Comma-separated k values")->capture_default_str();
    handlers["li"] = [&](const SieveOptions&, const std::string& fmt_) {
        const auto xs = parse_list(x);
        const auto ks = parse_list(li_orders);
        std::string csv = "x,k,li_k,main,bound\n";
        ordered_json rows = ordered_json::array();
        for (const uint64_t xv : xs)
            for (const uint64_t kv : ks) {
                const double xd = static_cast<double>(xv);
                const double value = li_k(xd, static_cast<int>(kv));
                const MainTerm term = main_term_expansion(xd, static_cast<int>(kv));
                csv += fmt::format("{},{},{},{},{}\n", xv, kv, format_real(value), format_real(term.main),
                                   format_real(term.bound));
                rows.push_back({{"x", xv}, {"k", kv}, {"li_k", json_real(value)}, {"main", json_real(term.main)},
                                {"bound", json_real(term.bound)}});
            }
        Outcome o;
        o.parameters = {{"x", xs}, {"k", ks}};
        o.body = fmt_ == "json" ? render({{"rows", rows}}) : csv;
        return o;
    };

    auto* predict_cmd = add("predict", "Observed N(x, d) against e^{-d/log x} S(d) x/(log x)^2 and S(d) I(x, d)");
    predict_cmd->add_option("--x", x, "Comma-separated x values")->required();
    predict_cmd->add_option("--d", d, "Comma-separated even gaps")->required();
    handlers["predict"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        const auto xs = parse_list(x);
        const auto ds = parse_list(d);
        for (const uint64_t dv : ds)
            if (dv < 2 || dv % 2) throw std::invalid_argument(fmt::format("predict needs even d >= 2, got {}", dv));
        std::vector<PredictionReport> reports;
        for (const uint64_t xv : xs) {
            const auto census = gap_census(xv, sieve);
            for (const uint64_t dv : ds) reports.push_back(make_prediction_report(xv, dv, census.count(dv)));
        }
        Outcome o;
        o.parameters = {{"x", xs}, {"d", ds}};
        if (fmt_ == "csv") {
            o.body = prediction_csv(reports);
        } else if (reports.size() == 1) {
            o.body = render(prediction_json(reports.front()));
        } else {
            ordered_json list = ordered_json::array();
            for (const auto& r : reports) list.push_back(prediction_json(r));
            o.body = render({{"reports", list}});
        }
        return o;
    };

    auto* sandwich_cmd = add("sandwich", "Q_{2R+1} <= N(x, d) <= Q_{2R} with exact counts");
    sandwich_cmd->add_option("--x", x)->required();
    sandwich_cmd->add_option("--d", d)->required();
    sandwich_cmd->add_option("--rmax", r_max, "Largest R checked")->capture_default_str();
    handlers["sandwich"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        BonferroniOptions opts;
        opts.sieve = sieve;
        const uint64_t xv = parse_count(x), dv = parse_count(d), rv = parse_count(r_max);
        const auto report = sandwich_check(xv, dv, rv, opts);
        Outcome o;
        o.parameters = {{"x", xv}, {"d", dv}, {"rmax", rv}};
        o.body = fmt_ == "csv" ? sandwich_csv(report) : render(sandwich_json(report));
        if (!report.holds) {
            o.invariant_ok = false;
            o.invariant_message = fmt::format("Bonferroni sandwich violated at x = {}, d = {}", xv, dv);
        } else if (report.terminated_at == 0) {
            o.invariant_ok = false;
            o.invariant_message = fmt::format("Q_N never settled on N(x, d) at x = {}, d = {}", xv, dv);
        }
        return o;
    };

    auto* residuals_cmd = add("residuals", "pi_k sums against their singular-series main terms");
    residuals_cmd->add_option("--x", x)->required();
    residuals_cmd->add_option("--d", d)->required();
    residuals_cmd->add_option("--kmax", k_max, "Largest tuple size")->capture_default_str();
    handlers["residuals"] = [&](const SieveOptions& sieve, const std::string& fmt_) {
        BonferroniOptions opts;
        opts.sieve = sieve;
        const uint64_t xv = parse_count(x), dv = parse_count(d), kv = parse_count(k_max);
        const auto rows = residuals(xv, dv, static_cast<unsigned>(kv), opts);
        Outcome o;
        o.parameters = {{"x", xv}, {"d", dv}, {"kmax", kv}};
        std::string csv = "k,empirical,main_term,residual,relative\n";
        ordered_json list = ordered_json::array();
        for (const auto& r : rows) {
            const double relative = r.main_term != 0.0 ? r.residual / r.main_term : 0.0;
            csv += fmt::format("{},{},{},{},{}\n", r.k, r.empirical, format_real(r.main_term),
                               format_real(r.residual), format_real(relative));
            list.push_back({{"k", r.k}, {"empirical", r.empirical}, {"main_term", json_real(r.main_term)},
                            {"residual", json_real(r.residual)}, {"relative", json_real(relative)}});
        }
        o.body = fmt_ == "json" ? render({{"x", xv}, {"d", dv}, {"rows", list}}) : csv;
        return o;
    };

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    const auto started = std::chrono::steady_clock::now();
    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    try {
        SieveOptions sieve;
        sieve.threads = threads;
        sieve.segment_size = parse_count(segment_size);
        if (const char* cache = std::getenv("GAPLINE_CACHE_DIR"); cache && *cache) sieve.cache_dir = cache;
        const bool json_default = command == "predict" || command == "sandwich";
        const std::string fmt_ = format.empty() ? (json_default ? "json" : "csv") : format;

        Outcome outcome = handlers.at(command)(sieve, fmt_);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        ordered_json checksums = ordered_json::object();
        if (out_path.empty()) {
            out << outcome.body;
        } else {
            std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
            if (!file) throw std::runtime_error("cannot write " + out_path);
            file << outcome.body;
            checksums[std::filesystem::path(out_path).filename().string()] = sha256_hex(outcome.body);
        }
        if (manifest_path.empty() && !out_path.empty()) manifest_path = out_path + ".manifest.json";
        if (!manifest_path.empty()) {
            outcome.parameters["format"] = fmt_;
            const ordered_json manifest = {{"schema_version", kOutputSchemaVersion},
                                           {"command", command},
                                           {"parameters", outcome.parameters},
                                           {"tool_version", kToolVersion},
                                           {"wall_time", json_real(wall)},
                                           {"checksums", checksums}};
            std::ofstream file(manifest_path, std::ios::binary | std::ios::trunc);
            if (!file) throw std::runtime_error("cannot write " + manifest_path);
            file << manifest.dump(2) << "\n";
        }
        if (!outcome.invariant_ok) {
            err << "gapline: " << outcome.invariant_message << "\n";
            return kExitInvariant;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "gapline " << command << ": " << e.what() << "\n";
    }
    return kExitError;
}

}  // namespace gapline::cli
