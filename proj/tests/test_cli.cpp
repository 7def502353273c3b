#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gapline/cli.hpp"

using gapline::cli::parse_count;
using gapline::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("parse_count") {
    CHECK(parse_count("100000000") == 100000000);
    CHECK(parse_count("1e8") == 100000000);
    CHECK(parse_count("2.5e6") == 2500000);
    CHECK(parse_count("1E3") == 1000);
    CHECK(parse_count("9223372036854775807") == 9223372036854775807ull);
    CHECK_THROWS_AS(parse_count("9223372036854775808"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("1e19"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("-3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("12x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count(""), std::invalid_argument);
}

TEST_CASE("sha256") {
    CHECK(gapline::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("census output is ascending CSV") {
    const auto r = invoke({"census", "--x", "100"});
    CHECK(r.code == 0);
    CHECK(r.out == "d,count\n1,1\n2,8\n4,7\n6,7\n8,1\n");
}

TEST_CASE("census to a file writes a manifest with a checksum") {
    const auto dir = std::filesystem::temp_directory_path() / "gapline_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "gaps.csv").string();

    REQUIRE(invoke({"census", "--x", "1e6", "--out", csv}).code == 0);
    const std::string first = slurp(csv);
    CHECK(first.rfind("d,count\n", 0) == 0);
    uint64_t previous = 0;
    std::istringstream lines(first.substr(8));
    for (std::string line; std::getline(lines, line);) {
        const uint64_t d = std::stoull(line.substr(0, line.find(',')));
        CHECK(d > previous);
        previous = d;
    }

    const auto manifest = nlohmann::json::parse(slurp(csv + ".manifest.json"));
    CHECK(manifest["schema_version"] == 1);
    CHECK(manifest["command"] == "census");
    CHECK(manifest["checksums"]["gaps.csv"] == gapline::cli::sha256_hex(first));

    REQUIRE(invoke({"census", "--x", "1e6", "--out", csv, "--threads", "3", "--segment-size", "4096"}).code == 0);
    CHECK(slurp(csv) == first);
    std::filesystem::remove_all(dir);
}

TEST_CASE("commands are byte reproducible") {
    const std::vector<std::vector<std::string>> commands = {
        {"pairs", "--x", "1e5", "--d", "6"},
        {"tuples", "--x", "1e5", "--d", "6", "--inner", "2"},
        {"intervals", "--n", "1e4", "--h", "9"},
        {"champions", "--x", "1e5"},
        {"singular", "--offsets", "0,2,6"},
        {"avg-series", "--k", "3,4", "--d", "10,20"},
        {"li", "--x", "1e6", "--k", "1,2"},
        {"predict", "--x", "1e6", "--d", "6"},
        {"residuals", "--x", "1e5", "--d", "6", "--kmax", "3"},
    };
    for (const auto& args : commands) {
        const auto a = invoke(args);
        const auto b = invoke(args);
        CHECK_MESSAGE(a.code == 0, args.front(), ": ", a.err);
        CHECK(a.out == b.out);
        CHECK(!a.out.empty());
    }
}

TEST_CASE("predict reports both ratios") {
    const auto r = invoke({"predict", "--x", "1e6", "--d", "6"});
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(r.out);
    const auto& row = report.is_array() ? report.at(0) : report;
    CHECK(row.contains("ratio_poisson"));
    CHECK(row.contains("ratio_refined"));
    CHECK(row["observed"] == 13549);
}

TEST_CASE("sandwich exits cleanly with a JSON report") {
    const auto r = invoke({"sandwich", "--x", "1e6", "--d", "6", "--rmax", "2"});
    CHECK(r.code == 0);
    const auto report = nlohmann::json::parse(r.out);
    CHECK(report["holds"] == true);
    CHECK(report["n_exact"] == 13549);
}

TEST_CASE("bad input exits with status 1") {
    CHECK(invoke({"census", "--x", "1.5"}).code == 1);
    CHECK(invoke({"pairs", "--x", "100", "--d", "0"}).code == 1);
    CHECK(invoke({"sandwich", "--x", "1e4", "--d", "3"}).code == 1);
    CHECK(invoke({"sandwich", "--x", "1e4", "--d", "100"}).code == 1);
    CHECK(invoke({"predict", "--x", "1e6", "--d", "5"}).code == 1);
    CHECK(invoke({"no-such-command"}).code != 0);
}
