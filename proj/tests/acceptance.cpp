// Runs the fourteen acceptance criteria and prints one PASS/FAIL line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <regex>
#include <string>
#include <vector>

#include "dtlab/cli.hpp"
#include "dtlab/dgauss.hpp"
#include "dtlab/ensembles.hpp"

using namespace dtlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0: none
  std::function<Outcome()> run;
};

cli::RunConfig config(std::string command, std::map<std::string, std::string> params) {
  return {std::move(command), std::move(params)};
}

std::size_t failures(const CheckList& records, std::string* first = nullptr) {
  std::size_t bad = 0;
  for (const auto& r : records) {
    if (!r.pass && bad++ == 0 && first) *first = r.name + ": expected " + r.expected + ", got " + r.actual;
  }
  return bad;
}

Outcome from_report(const cli::RunReport& report) {
  std::string first;
  const std::size_t bad = failures(report.records, &first);
  Outcome o;
  o.pass = bad == 0 && !report.records.empty();
  o.detail = std::to_string(report.records.size() - bad) + "/" + std::to_string(report.records.size()) + " records pass";
  if (bad) o.detail += "; first failure " + first;
  return o;
}

const CheckRecord* find(const cli::RunReport& r, const std::string& prefix) {
  for (const auto& rec : r.records)
    if (rec.name.rfind(prefix, 0) == 0) return &rec;
  return nullptr;
}

std::string without_clock(const std::string& json) {
  return std::regex_replace(json, std::regex("\"wall_clock_seconds\": [^\\n]*"), "");
}

Outcome fisher_identity() {
  const std::vector<std::pair<Rational, Rational>> cases = {
      {Rational(1, 4), Rational(3, 4)}, {Rational(1, 9), Rational(8, 9)}, {Rational(1), Rational(3)}};
  Outcome o{true, ""};
  for (const auto& [t, csq] : cases) {
    const Rational got = dgauss::fisher_exact(t, csq);
    const Rational want = t / (csq + t) + 1;
    o.pass = o.pass && got == want;
    o.detail += "(" + to_string(t) + ", " + to_string(csq) + ") -> " + to_string(got) + "  ";
  }
  return o;
}

Outcome dimension() {
  const auto plain = cli::run_dimension(config("dimension", {{"csq", "3/4"}, {"grid", "1/4,1/16,1/64,1/256"}}));
  const auto flagged =
      cli::run_dimension(config("dimension", {{"csq", "3/4"}, {"grid", "1/4,1/16,1/64,1/256"}, {"analytic_flag", "true"}}));
  const auto* bound = find(plain, "delta*(Z : D) lower bound");
  const auto* equality = find(plain, "delta*(Z : D) equality");
  const auto* without = find(plain, "delta*(Z) without");
  const auto* with = find(flagged, "delta*(Z) with");
  Outcome o;
  o.pass = plain.passed() && flagged.passed() && bound && equality && without && with && equality->actual == "true" &&
           without->actual == ">= 1" && with->actual == "2" && std::abs(std::stod(bound->actual) - 1.0) <= 0.01;
  if (bound && equality && without && with) {
    o.detail = "delta*(Z:D) >= " + bound->actual + ", equality " + equality->actual + "; delta*(Z) " + without->actual +
               " without the flag, " + with->actual + " with it";
  }
  return o;
}

Outcome monte_carlo() {
  const auto r = cli::run_moments(config(
      "moments", {{"mu", "delta:0"}, {"c", "1"}, {"n", "500"}, {"reps", "200"}, {"seed", "42"}, {"words", "ZZ*,(ZZ*)^2,Z^2"}}));
  Outcome o = from_report(r);
  o.detail.clear();
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    o.detail += rec.name + "=" + rec.actual.substr(0, 8) + " (exact " + rec.expected + ", tol " +
                format_double(rec.tolerance).substr(0, 7) + ")  ";
  }
  return o;
}

Outcome norm() {
  ensembles::EnsembleSpec spec;
  spec.mu = ensembles::MeasureSpec::from_text("delta:0");
  spec.c = 1.0;
  spec.n = 2000;
  spec.seed = 42;
  const auto est = ensembles::norm_estimate(spec, 1);
  const double target = std::sqrt(std::exp(1.0));
  return {std::abs(est.mean - target) <= 0.05 * target,
          "||T_2000|| = " + format_double(est.mean) + ", sqrt(e) = " + format_double(target)};
}

Outcome cutout() {
  ensembles::EnsembleSpec spec;
  spec.mu = ensembles::MeasureSpec::from_text("delta:0");
  spec.n = 1024;
  spec.seed = 42;
  Outcome o{true, ""};
  for (int k : {4, 16, 64}) {
    const auto rep = ensembles::cutout_residual(spec, k, 2);
    double worst = 0;
    for (double v : rep.block_norms) worst = std::max(worst, v);
    o.pass = o.pass && rep.within_bound && rep.lower_residual == 0.0;
    o.detail += "k=" + std::to_string(k) + ": " + format_double(worst).substr(0, 6) + " <= " +
                format_double(rep.bound).substr(0, 6) + ", lower part " + format_double(rep.lower_residual) + "  ";
  }
  return o;
}

Outcome eigenspaces() {
  return from_report(cli::run_spectra(config("spectra", {{"n", "0"},
                                                          {"cutout_k", ""},
                                                          {"gammas", ""},
                                                          {"pencils", "50"},
                                                          {"pencil_dim", "20"},
                                                          {"pairs", "100"},
                                                          {"pair_dim", "16"},
                                                          {"tol", "1e-10"},
                                                          {"seed", "42"}})));
}

Outcome determinism() {
  Outcome o{true, ""};
  const auto moments = config("moments", {{"n", "64"}, {"reps", "16"}, {"seed", "9"}, {"words", "ZZ*,(ZZ*)^2"}});
  const auto a = cli::run_moments(moments);
  const auto b = cli::run_moments(moments);
  const bool same_csv = cli::estimates_csv(a) == cli::estimates_csv(b);
  const bool same_json = without_clock(cli::report_json(a)) == without_clock(cli::report_json(b));

  setenv(kThreadsVariable, "4", 1);
  const auto threaded = cli::run_moments(moments);
  unsetenv(kThreadsVariable);
  const bool same_threaded = cli::estimates_csv(threaded) == cli::estimates_csv(a);

  const auto verify = cli::run_verify(config("verify", {{"suite", "combinatorics"}, {"seed", "3"}}));
  const auto echoed = cli::run(cli::config_from_report_json(cli::report_json(verify)));
  const bool same_echo = without_clock(cli::report_json(verify)) == without_clock(cli::report_json(echoed)) &&
                         cli::report_csv(verify) == cli::report_csv(echoed);

  o.pass = same_csv && same_json && same_threaded && same_echo;
  o.detail = std::string("repeat CSV ") + (same_csv ? "identical" : "differs") + ", repeat JSON " +
             (same_json ? "identical" : "differs") + ", 4 threads " + (same_threaded ? "identical" : "differs") +
             ", config echo rerun " + (same_echo ? "identical" : "differs");
  return o;
}

Outcome bounds() {
  const auto r = cli::run_verify(config("verify", {{"suite", "bounds"}}));
  Outcome o = from_report(r);
  int chi = 0, stam = 0, limit = 0;
  for (const auto& rec : r.records) {
    chi += rec.name.find("chi*") != std::string::npos;
    stam += rec.name.find("stam(") != std::string::npos;
    limit += rec.name.find("n t/((n/alpha)+t)") != std::string::npos;
  }
  o.pass = o.pass && chi > 0 && stam > 0 && limit >= 3;
  o.detail += " (" + std::to_string(chi) + " entropy, " + std::to_string(stam) + " Stam, " + std::to_string(limit) +
              " limit-display records)";
  return o;
}

}  // namespace

int main() {
  const auto verify = [](std::map<std::string, std::string> p) {
    return [p] { return from_report(cli::run_verify(config("verify", p))); };
  };
  const std::vector<Criterion> criteria = {
      {1, "exact Fisher identity t/(c^2+t)+1", 10, fisher_identity},
      {2, "conjugate relations, words <= 4, insertions of degree <= 2", 60,
       verify({{"suite", "conjugate"}, {"t", "1/4"}, {"csq", "3/4"}, {"max_len", "4"}, {"insertion_degree", "2"}})},
      {3, "circularity of T1 + T2* up to order 8", 60, verify({{"suite", "circularity"}, {"max_len", "8"}})},
      {4, "distribution identity up to length 6", 120,
       verify({{"suite", "distribution"}, {"a", "9/25"}, {"b", "16/25"}, {"max_len", "6"}})},
      {5, "liberation orthogonality, words <= 4", 60,
       verify({{"suite", "liberation"}, {"t", "1/4"}, {"csq", "3/4"}, {"max_len", "4"}})},
      {6, "statelemma kernel, monomials of degree <= 3", 10, verify({{"suite", "statelemma"}, {"monomial_degree", "3"}})},
      {7, "entropy dimension relative to D and the analytic flag", 0, dimension},
      {8, "Monte Carlo moments of DT(delta0, 1), n=500, reps=200", 300, monte_carlo},
      {9, "norm of T_2000 against sqrt(e)", 300, norm},
      {10, "cut-out scaling for k in {4, 16, 64}, n=1024", 0, cutout},
      {11, "eigenspace independence, Kaplansky identity, trace additivity", 0, eigenspaces},
      {12, "moment-cumulant round trip and Catalan counts", 0, verify({{"suite", "combinatorics"}, {"sequences", "100"}})},
      {13, "determinism of reports", 0, determinism},
      {14, "entropy dominance, Stam bound, limit display", 0, bounds},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += " [over the " + format_double(c.budget_seconds) + " s budget]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] criterion %2d  %-62s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
