#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lueders/cli.hpp"
#include "lueders/json_io.hpp"

using namespace lueders;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("lueders_cli_test_" + std::to_string(::getpid()) + "_" +
                                             std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& contents) const {
        const fs::path p = path_ / name;
        std::ofstream(p) << contents;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

const char* kCommutingFixture = R"({"family": [
  {"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
  {"dim": 2, "re": [[0, 0], [0, 1]], "im": [[0, 0], [0, 0]]}],
 "effect": {"dim": 2, "re": [[0.2, 0], [0, 0.7]], "im": [[0, 0], [0, 0]]}})";

const char* kSharpFixture = R"({"family": [
  {"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
  {"dim": 2, "re": [[0, 0], [0, 1]], "im": [[0, 0], [0, 0]]}],
 "effect": {"dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}})";

io::json parse(const std::string& s) { return io::json::parse(s); }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("help and missing subcommand") {
        CHECK(run({"--help"}).code == cli::kExitPass);
        CHECK(run({"verify-prop1", "--help"}).code == cli::kExitPass);
        CHECK(run({}).code == cli::kExitUsage);
        CHECK(run({"frobnicate"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--no-such-flag"}).code == cli::kExitUsage);
    }

    TEST_CASE("argument validation") {
        CHECK(run({"verify-prop1", "--trials", "0"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--trials", "-3"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--dim", "0", "--trials", "2"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--dim", "4-2", "--trials", "2"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--regime", "bogus", "--trials", "2"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--lambda", "2", "--trials", "2"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--format", "xml", "--trials", "2"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--tol-zero", "0", "--trials", "2"}).code == cli::kExitUsage);
        CHECK(run({"verify-prop2", "--min-commutator", "-1", "--trials", "2"}).code == cli::kExitUsage);
    }

    TEST_CASE("dimension one commutes trivially") {
        const Result r = run({"verify-prop1", "--dim", "1", "--trials", "10", "--no-timestamp"});
        CHECK(r.code == cli::kExitPass);
        const auto j = parse(r.out);
        CHECK(j["summary"]["consistent"] == 10);
        for (const auto& item : j["reports"]) {
            CHECK(item["report"]["all_commute"] == true);
        }
    }

    TEST_CASE("verify-prop1 and verify-prop2 batches pass") {
        const Result p1 = run({"verify-prop1", "--trials", "60", "--seed", "3", "--no-timestamp"});
        CHECK(p1.code == cli::kExitPass);
        CHECK(p1.err.empty());
        const auto j = parse(p1.out);
        CHECK(j["schema_version"] == 1);
        CHECK(j["command"] == "verify-prop1");
        CHECK_FALSE(j.contains("timestamp"));
        CHECK(j["reports"].size() == 60);

        const Result p2 = run({"verify-prop2", "--trials", "60", "--regime", "generic", "--min-commutator", "1e-3"});
        CHECK(p2.code == cli::kExitPass);
        CHECK(parse(p2.out).contains("timestamp"));
    }

    TEST_CASE("reports do not depend on the thread count") {
        for (const char* cmd : {"verify-prop1", "verify-prop2", "scan"}) {
            const Result a = run({cmd, "--trials", "40", "--seed", "11", "--threads", "1", "--no-timestamp"});
            const Result b = run({cmd, "--trials", "40", "--seed", "11", "--threads", "4", "--no-timestamp"});
            CHECK(a.code == cli::kExitPass);
            CHECK(a.out == b.out);
        }
    }

    TEST_CASE("fixture checks") {
        TempDir dir;
        const std::string comm = dir.file("comm.json", kCommutingFixture);
        const std::string sharp = dir.file("sharp.json", kSharpFixture);

        const Result a = run({"analyze", comm});
        CHECK(a.code == cli::kExitPass);
        const auto ja = parse(a.out);
        CHECK(ja["summary"]["preserved"] == true);
        CHECK(ja["summary"]["all_commute"] == true);

        const Result b = run({"analyze", sharp});
        CHECK(b.code == cli::kExitPass);
        const auto jb = parse(b.out);
        CHECK(jb["summary"]["preserved"] == false);
        CHECK(jb["summary"]["deviation_norm"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(jb["reports"][0].contains("prop2"));

        // B = (I + sx) / 2 against the sharp z measurement
        const std::string half = dir.file("half.json", R"({"family": [
          {"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
          {"dim": 2, "re": [[0, 0], [0, 1]], "im": [[0, 0], [0, 0]]}],
          "effect": {"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}})");
        const Result h = run({"analyze", half});
        CHECK(h.code == cli::kExitPass);
        CHECK(parse(h.out)["summary"]["deviation_norm"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));

        const std::string trivial = dir.file("trivial.json", R"({"family": [
          {"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}],
          "effect": {"dim": 2, "re": [[0.3, 0.2], [0.2, 0.6]], "im": [[0, 0.1], [-0.1, 0]]}})");
        const Result t = run({"analyze", trivial});
        CHECK(t.code == cli::kExitPass);
        CHECK(parse(t.out)["summary"]["preserved"] == true);

        CHECK(run({"verify-prop1", "--fixture", sharp}).code == cli::kExitPass);
        CHECK(run({"verify-prop2", "--fixture", comm}).code == cli::kExitPass);
    }

    TEST_CASE("malformed or invalid fixtures exit 2 and write nothing") {
        TempDir dir;
        const std::string out = dir.path("report.json");
        const std::string broken = dir.file("broken.json", "{\"family\": [");
        CHECK(run({"analyze", broken, "--out", out}).code == cli::kExitUsage);
        CHECK_FALSE(fs::exists(out));

        // effects summing to 2 I
        const std::string incomplete = dir.file("incomplete.json", R"({"family": [
          {"dim": 1, "re": [[1]], "im": [[0]]}, {"dim": 1, "re": [[1]], "im": [[0]]}],
          "effect": {"dim": 1, "re": [[1]], "im": [[0]]}})");
        CHECK(run({"analyze", incomplete, "--out", out}).code == cli::kExitUsage);
        CHECK(run({"analyze", dir.path("missing.json")}).code == cli::kExitUsage);
        CHECK_FALSE(fs::exists(out));
    }

    TEST_CASE("sweep") {
        const Result zero = run({"sweep", "--lambda-grid", "0"});
        CHECK(zero.code == cli::kExitPass);
        CHECK(zero.out.rfind("lambda,measured,predicted,abs_error\n", 0) == 0);
        std::istringstream lines(zero.out);
        std::string header, row, extra;
        std::getline(lines, header);
        std::getline(lines, row);
        CHECK_FALSE(std::getline(lines, extra));
        CHECK(row.rfind("0,", 0) == 0);

        CHECK(run({"sweep", "--lambda-grid", "0.5,1.5"}).code == cli::kExitUsage);
        CHECK(run({"sweep", "--lambda-grid", "1:0:0.1"}).code == cli::kExitUsage);

        const Result json = run({"sweep", "--format", "json", "--no-timestamp"});
        CHECK(json.code == cli::kExitPass);
        const auto j = parse(json.out);
        CHECK(j["reports"].size() == 21);
        CHECK(j["summary"]["max_abs_error"].get<double>() <= 1e-12);
        CHECK(j["reports"][12]["lambda"].get<double>() == 0.6);
    }

    TEST_CASE("lemma") {
        const Result r = run({"lemma", "--trials", "10", "--no-timestamp"});
        CHECK(r.code == cli::kExitPass);
        CHECK(parse(r.out)["summary"]["fixtures"] == 13);

        TempDir dir;
        // [sz, [sz, sx]] = 4 sx, so the hypothesis fails
        const std::string bad = dir.file("bad.json", R"({"name": "bad",
          "x": {"dim": 2, "re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]},
          "a": {"dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}})");
        const std::string out = dir.path("lemma.json");
        const Result v = run({"lemma", "--fixture", bad, "--out", out});
        CHECK(v.code == cli::kExitUsage);
        CHECK(v.err.find("HypothesisViolated") != std::string::npos);
        CHECK_FALSE(fs::exists(out));

        const std::string flip = dir.file("flip.json", R"({"name": "user-nilpotent",
          "x": {"dim": 2, "re": [[0, 1], [0, 0]], "im": [[0, 0], [0, 0]]},
          "a": {"dim": 2, "re": [[0, 0], [1, 0]], "im": [[0, 0], [0, 0]]}})");
        // [x, a] = sz, [x, sz] = -2x: the hypothesis fails here too
        CHECK(run({"lemma", "--fixture", flip}).code == cli::kExitUsage);
    }

    TEST_CASE("config files") {
        TempDir dir;
        const std::string cfg = dir.file("cfg.json", R"({"trials": 5, "dim": [2, 3], "seed": 9, "no_timestamp": true})");
        const Result r = run({"verify-prop1", "--config", cfg, "--trials", "7"});
        REQUIRE(r.code == cli::kExitPass);
        const auto j = parse(r.out);
        CHECK(j["config"]["trials"] == 7);  // command line wins
        CHECK(j["config"]["seed"] == 9);
        CHECK(j["config"]["dim"] == io::json::array({2, 3}));
        CHECK_FALSE(j.contains("timestamp"));

        CHECK(run({"verify-prop1", "--config", dir.file("u.json", R"({"bogus": 1})")}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--config", dir.file("v.json", R"({"trials": "many"})")}).code ==
              cli::kExitUsage);
        CHECK(run({"verify-prop1", "--config", dir.file("w.json", "[1, 2]")}).code == cli::kExitUsage);
        CHECK(run({"verify-prop1", "--config", dir.path("absent.json")}).code == cli::kExitUsage);
    }

    TEST_CASE("--out writes the report instead of stdout") {
        TempDir dir;
        const std::string out = dir.path("scan.csv");
        const Result r = run({"scan", "--trials", "5", "--dim", "3", "--outcomes", "2", "--regime", "generic",
                              "--out", out});
        CHECK(r.code == cli::kExitPass);
        CHECK(r.out.empty());
        std::ifstream f(out);
        std::string header;
        std::getline(f, header);
        CHECK(header == "trial,seed,dim,n_outcomes,regime,commutator_norm,deviation_norm");
    }

    TEST_CASE("helpers") {
        CHECK(cli::parse_index_list("2-4,7,3", "dim") == std::vector<std::size_t>{2, 3, 4, 7});
        CHECK_THROWS_AS(cli::parse_index_list("x", "dim"), cli::UsageError);
        CHECK_THROWS_AS(cli::parse_index_list("", "dim"), cli::UsageError);
        const auto grid = cli::parse_lambda_grid("0:1:0.05");
        REQUIRE(grid.size() == 21);
        CHECK(grid[12] == 0.6);
        CHECK(grid.back() == 1.0);
        CHECK(cli::parse_lambda_grid("0.25, 0.5") == std::vector<double>{0.25, 0.5});
        CHECK(cli::parse_regimes("mixed,generic").size() == 3);
        CHECK(cli::parse_regimes("unsharp-qubit").front() == RegimeKind::UnsharpQubit);
        CHECK(cli::format_double(0.1) == "0.10000000000000001");
    }
}
