#include <doctest.h>

#include <regex>

#include "dtlab/cli.hpp"

using namespace dtlab;
using namespace dtlab::cli;

namespace {

std::string without_clock(const std::string& json) {
  return std::regex_replace(json, std::regex("\"wall_clock_seconds\": [^\\n]*"), "\"wall_clock_seconds\": 0");
}

RunConfig cfg(std::string command, std::map<std::string, std::string> params = {}) {
  return {std::move(command), std::move(params)};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("key-value config files") {
    const auto c = parse_config_text(
        "# fisher check\n"
        "command = \"verify\"\n"
        "[params]\n"
        "suite = fisher   # inline comment\n"
        "t = '1/4'\n");
    CHECK(c.command == "verify");
    CHECK(c.params.at("suite") == "fisher");
    CHECK(c.params.at("t") == "1/4");
    CHECK_THROWS_AS(parse_config_text("just words\n"), std::invalid_argument);
    RunConfig o;
    apply_override(o, "csq=3/4");
    CHECK(o.params.at("csq") == "3/4");
    CHECK_THROWS_AS(apply_override(o, "=3"), std::invalid_argument);
  }

  TEST_CASE("resolution fills defaults and rejects unknown keys") {
    const auto p = resolve(cfg("moments", {{"word", "ZZ*"}}));
    CHECK(p.at("words") == "ZZ*");
    CHECK(p.at("n") == "500");
    CHECK_THROWS_AS(resolve(cfg("moments", {{"bogus", "1"}})), std::invalid_argument);
    CHECK_THROWS_AS(resolve(cfg("explode")), std::invalid_argument);
    CHECK(suite_manifest().front() == "combinatorics");
    CHECK(suite_manifest().back() == "bounds");
  }

  TEST_CASE("verify: Fisher suite reproduces 5/4") {
    const auto r = run_verify(cfg("verify", {{"suite", "fisher"}}));
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].expected == "5/4");
    CHECK(r.records[0].actual == "5/4");
    CHECK(exit_code(r) == kPass);
  }

  TEST_CASE("verify: diagnostics") {
    CHECK_THROWS_AS(run_verify(cfg("verify", {{"suite", "conjugate"}, {"max_len", "0"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_verify(cfg("verify", {{"suite", "nope"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_verify(cfg("verify", {{"suite", "fisher"}, {"t", "1/0"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_verify(cfg("verify", {{"suite", "fisher"}, {"t", "1/3"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_verify(cfg("verify", {{"suite", "combinatorics"}, {"seed", "-1"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_verify(cfg("verify", {{"suite", "combinatorics"}, {"seed", "18446744073709551616"}})),
                    std::invalid_argument);
    CHECK_NOTHROW(run_verify(cfg("verify", {{"suite", "statelemma"}, {"seed", "18446744073709551615"}})));
  }

  TEST_CASE("a report's config echo reproduces it") {
    const auto first = run_verify(cfg("verify", {{"suite", "combinatorics"}, {"sequences", "10"}, {"seed", "77"}}));
    const std::string json = report_json(first);
    const RunConfig again = config_from_report_json(json);
    CHECK(again.command == "verify");
    const auto second = run(again);
    CHECK(without_clock(report_json(second)) == without_clock(json));
    CHECK(report_csv(second) == report_csv(first));
  }

  TEST_CASE("unknown schema major versions are refused") {
    const auto r = run_verify(cfg("verify", {{"suite", "fisher"}}));
    std::string json = report_json(r);
    json.replace(json.find("\"1.0.0\""), 7, "\"2.0.0\"");
    CHECK_THROWS_AS(config_from_report_json(json), std::runtime_error);
  }

  TEST_CASE("moments: determinism and validation") {
    const auto c = cfg("moments", {{"n", "24"}, {"reps", "6"}, {"seed", "5"}, {"words", "ZZ*,Z"}});
    const auto a = run_moments(c), b = run_moments(c);
    CHECK(estimates_csv(a) == estimates_csv(b));
    CHECK(without_clock(report_json(a)) == without_clock(report_json(b)));
    CHECK(estimates_csv(a).rfind("word,mean,stderr,reps,n,seed,exact\n", 0) == 0);
    CHECK(a.exact_values.at(0) == "1/2");
    CHECK_THROWS_AS(run_moments(cfg("moments", {{"reps", "1"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_moments(cfg("moments", {{"n", "4"}})), std::invalid_argument);
    CHECK_THROWS_AS(run_moments(cfg("moments", {{"n", "16"}, {"reps", "2"}, {"words", "ZQ"}})), std::invalid_argument);
  }

  TEST_CASE("moments: exact oracle for a two-point mu") {
    const auto r = run_moments(cfg("moments", {{"mu", "atomic:0@1/2,1@1/2"}, {"c", "1/2"}, {"n", "16"}, {"reps", "2"},
                                                {"words", "ZZ*"}}));
    // tau(DD*) + c^2 tau(TT*) = 1/2 + 1/8
    CHECK(r.exact_values.at(0) == "5/8");
  }

  TEST_CASE("dimension") {
    const auto plain = run_dimension(cfg("dimension"));
    CHECK(plain.passed());
    bool saw = false;
    for (const auto& rec : plain.records)
      if (rec.name.rfind("delta*(Z) without", 0) == 0) {
        saw = true;
        CHECK(rec.actual == ">= 1");
      }
    CHECK(saw);
    const auto flagged = run_dimension(cfg("dimension", {{"analytic_flag", "true"}}));
    CHECK(flagged.records.back().actual == "2");
    CHECK_THROWS_AS(run_dimension(cfg("dimension", {{"grid", "1/4,1/16,1/64"}})), PrecisionError);
    CHECK_THROWS_AS(run_dimension(cfg("dimension", {{"grid", "1/4,1/16,1/8,1/64"}})), PrecisionError);
  }

  TEST_CASE("fisher") {
    const auto r = run_fisher(cfg("fisher"));
    CHECK(r.passed());
    CHECK(r.records.front().actual == "5/4");
  }

  TEST_CASE("spectra at desk scale") {
    const auto r = run_spectra(cfg("spectra", {{"n", "64"},
                                               {"reps", "2"},
                                               {"cutout_n", "64"},
                                               {"cutout_k", "4"},
                                               {"pencils", "5"},
                                               {"pairs", "5"},
                                               {"gammas", "2"},
                                               {"spectrum_n", "16"}}));
    CHECK(r.records.size() == 7);
    const auto csv = report_csv(r);
    CHECK(csv.rfind("name,expected,actual,tolerance,pass,provenance\n", 0) == 0);
  }
}
