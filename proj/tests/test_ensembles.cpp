#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "dtlab/ensembles.hpp"

using namespace dtlab;
using namespace dtlab::ensembles;

namespace {

EnsembleSpec small_spec(int n = 40) {
  EnsembleSpec s;
  s.mu = MeasureSpec::from_text("atomic:0@1/2,1@1/2");
  s.c = 1.0;
  s.n = n;
  s.seed = 99;
  return s;
}

}  // namespace

TEST_SUITE("ensembles") {
  TEST_CASE("streams are keyed by seed, replicate and role") {
    Stream a(5, 3, Role::Upper1), b(5, 3, Role::Upper1), c(5, 4, Role::Upper1), d(5, 3, Role::Upper2);
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
    for (int i = 0; i < 1000; ++i) {
      const double u = a.uniform();
      CHECK((u > 0 && u < 1));
    }
  }

  TEST_CASE("complex normals have unit variance per component") {
    Stream s(1, 0, Role::Ginibre);
    double re2 = 0, im2 = 0, cross = 0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
      const auto z = s.complex_normal();
      re2 += z.real() * z.real();
      im2 += z.imag() * z.imag();
      cross += z.real() * z.imag();
    }
    CHECK(re2 / m == doctest::Approx(1.0).epsilon(0.02));
    CHECK(im2 / m == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(cross / m) < 0.02);
  }

  TEST_CASE("strictly upper samples") {
    Stream s(3, 0, Role::Upper1);
    const int n = 300;
    const Matrix t = sample_strict_upper(n, s);
    double mass = 0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i >= j) CHECK(t(i, j) == Complex(0, 0));
        mass += std::norm(t(i, j));
      }
    // E sum |t_ij|^2 = (n-1)/2
    CHECK(mass / ((n - 1) / 2.0) == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("measure specs") {
    CHECK(MeasureSpec::from_text("delta0").atoms.size() == 1);
    CHECK(MeasureSpec::from_text("delta:2-1i").atoms[0].value == Complex(2, -1));
    CHECK_FALSE(MeasureSpec::from_text("delta:1i").is_real());
    CHECK_THROWS_AS(MeasureSpec::from_text("atomic:0@1/2,1@1/3"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec::from_text("uniform"), std::invalid_argument);
    const auto mu = MeasureSpec::from_text("atomic:0@1/4,3@3/4");
    CHECK(MeasureSpec::from_text(mu.to_text()).to_text() == mu.to_text());
    const auto push = MeasureSpec::from_text("pushforward:{0/1:0/1,1/1}");
    CHECK(push.kind == MeasureSpec::Kind::Pushforward);
    Stream s(1, 0, Role::Diagonal);
    const Vector d = sample_diagonal(mu, 4000, s);
    int threes = 0;
    for (int i = 0; i < d.size(); ++i) threes += d(i) == Complex(3, 0) ? 1 : 0;
    CHECK(threes / 4000.0 == doctest::Approx(0.75).epsilon(0.05));
  }

  TEST_CASE("star words") {
    CHECK(parse_star_word("ZZ*") == std::vector<int>{0, 1});
    CHECK(parse_star_word("(ZZ*)^2") == std::vector<int>{0, 1, 0, 1});
    CHECK(parse_star_word("Z Z* Z") == std::vector<int>{0, 1, 0});
    CHECK(parse_star_word("1").empty());
    CHECK(format_star_word({1, 0}) == "Z*Z");
    CHECK_THROWS_AS(parse_star_word("ZY"), std::invalid_argument);
    CHECK_THROWS_AS(parse_star_word("(ZZ*"), std::invalid_argument);
  }

  TEST_CASE("traces of products") {
    Stream s(8, 0, Role::Ginibre);
    const Matrix a = sample_ginibre_circular(12, s), b = sample_ginibre_circular(12, s);
    const Complex direct = (a * b.adjoint() * a).trace() / 12.0;
    const Complex fast = normalized_trace({&a, &b, &a}, {false, true, false});
    CHECK(std::abs(direct - fast) < 1e-12);
    CHECK(std::abs(normalized_word_trace(a, {0, 1}) - (a * a.adjoint()).trace() / 12.0) < 1e-12);
  }

  TEST_CASE("serial and parallel replicate loops are bit-identical") {
    const auto spec = small_spec();
    const std::vector<int> word{0, 1, 0, 1};
    const auto serial = replicate_word_traces(spec, word, 24, Schedule::Serial);
    const auto parallel = replicate_word_traces(spec, word, 24, Schedule::Parallel);
    CHECK(serial == parallel);
    setenv(kThreadsVariable, "3", 1);
    const auto env = replicate_word_traces(spec, word, 24, Schedule::Auto);
    unsetenv(kThreadsVariable);
    CHECK(serial == env);
    const auto a = estimate_star_moment(spec, word, 24, Schedule::Serial);
    const auto b = estimate_star_moment(spec, word, 24, Schedule::Parallel);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }

  TEST_CASE("phase-unbalanced moments of T_n average to zero") {
    EnsembleSpec spec;
    spec.mu = MeasureSpec::from_text("delta0");
    spec.n = 60;
    spec.seed = 4;
    for (const auto& w : {std::vector<int>{0, 0, 1}, std::vector<int>{0, 1, 1, 1}, std::vector<int>{0, 0, 0, 1, 1}}) {
      const auto e = estimate_star_moment(spec, w, 200, Schedule::Serial);
      CHECK(std::abs(e.mean) <= 4 * e.std_error + 1e-12);
    }
  }

  TEST_CASE("estimator preconditions") {
    const auto spec = small_spec();
    CHECK_THROWS_AS(estimate_star_moment(spec, {0, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_star_moment(spec, {}, 4), std::invalid_argument);
    CHECK(norm_estimate(spec, 1).std_error == 0.0);
  }

  TEST_CASE("summary statistics") {
    const auto e = summarize("w", {1.0, 2.0, 3.0, 4.0}, 10, 5);
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    std::ostringstream os;
    write_estimates_csv(os, {e});
    CHECK(os.str().rfind("word,mean,stderr,reps,n,seed\n", 0) == 0);
  }

  TEST_CASE("cut-out blocks") {
    auto spec = small_spec(64);
    spec.mu = MeasureSpec::from_text("delta0");
    const auto rep = cutout_residual(spec, 4, 2, Schedule::Serial);
    CHECK(rep.block_norms.size() == 2);
    CHECK(rep.lower_residual == 0.0);
    CHECK(rep.bound == doctest::Approx(2 * std::sqrt(std::exp(1.0) / 4)));
  }

  TEST_CASE("liberation gradient traces") {
    auto spec = small_spec(48);
    const auto rows = liberation_mc(spec, 0.25, {{}, {0, 1}}, {48}, 3, Schedule::Serial);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean == 0.0);
    CHECK(std::abs(rows[1].mean) < 1.0);
  }

  TEST_CASE("matrix files round trip exactly") {
    Stream s(2, 0, Role::Ginibre);
    const Matrix m = sample_ginibre_circular(7, s).leftCols(5);
    std::stringstream io;
    write_matrix(io, m);
    CHECK(io.str().rfind("dtlab-matrix 7 5 complex128 colmajor\n", 0) == 0);
    CHECK(read_matrix(io) == m);
    std::stringstream bad("dtlab-matrix 2 2 float32 colmajor\n");
    CHECK_THROWS(read_matrix(bad));
  }
}
