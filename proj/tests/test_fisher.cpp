#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dtlab/fisher.hpp"

using namespace dtlab;
using namespace dtlab::fisher;

namespace {

const double kLog2PiE = std::log(2 * M_PI * std::exp(1.0));

PhiProfile profile_of(double (*phi)(double), double t_min, double t_max, int per_decade) {
  PhiProfile p;
  for (const auto& t : log_grid(t_max, static_cast<int>(std::lround(std::log10(t_max / t_min))), per_decade))
    p.add(t, phi(t.get_d()));
  return p;
}

}  // namespace

TEST_SUITE("fisher") {
  TEST_CASE("closed form relative to D") {
    CHECK(phi_dt_relative_D(Rational(1, 4), Rational(3, 4)) == Rational(5, 4));
    CHECK(phi_dt_relative_D(Rational(2, 3), Rational(2, 3)) == Rational(3, 2));
    CHECK(phi_dt_relative_D(Rational(1, 1000000), Rational(1)) - 1 < Rational(1, 100000));
    for (const char* c : {"3/4", "1", "100"}) {
      const auto r = delta_star_relative_D(parse_rational(c));
      CHECK(r.lower_bound == 1.0);
      CHECK(r.equality_claimed);
    }
  }

  TEST_CASE("entropy upper bound") {
    CHECK(chi_star_upper(1, 1.0) == doctest::Approx(0.5 * kLog2PiE));
    CHECK(chi_star_upper(2, 2.0) == doctest::Approx(kLog2PiE));
    CHECK(chi_star_upper(1, 1e-3) < chi_star_upper(1, 1e-2));
    CHECK_THROWS_AS(chi_star_upper(1, 0.0), std::invalid_argument);
  }

  TEST_CASE("entropy from profiles") {
    const auto semi = semicircular_profile(1, Rational(1), 1e-6, 1e4, 16);
    const auto q = chi_star_from_profile(semi, 1);
    CHECK(q.value == doctest::Approx(0.5 * kLog2PiE).epsilon(1e-9));
    // variance v: chi = 1/2 log(2 pi e v)
    const auto half = semicircular_profile(1, Rational(1, 2), 1e-6, 1e4, 16);
    const auto qh = chi_star_from_profile(half, 1);
    CHECK(qh.value == doctest::Approx(0.5 * std::log(2 * M_PI * std::exp(1.0) * 0.5)).epsilon(1e-4));
    CHECK(qh.value <= chi_star_upper(1, 0.5) + 1e-9 + qh.error);
    const auto harmonic = profile_of([](double t) { return 1.0 / t; }, 1e-6, 1e4, 16);
    CHECK(std::isinf(chi_star_from_profile(harmonic, 1).value));
    const auto sparse = semicircular_profile(1, Rational(1), 1e-6, 1e4, 4);
    CHECK_THROWS_AS(chi_star_from_profile(sparse, 1), PrecisionError);
  }

  TEST_CASE("dimension lower bounds") {
    const auto constant = profile_of([](double) { return 3.0; }, 1e-6, 1.0, 8);
    CHECK(delta_star_lower(constant, 2).lower_bound == doctest::Approx(2.0).epsilon(1e-5));
    const auto harmonic = profile_of([](double t) { return 1.0 / t; }, 1e-6, 1.0, 8);
    const auto h = delta_star_lower(harmonic, 2);
    CHECK(h.lower_bound == doctest::Approx(1.0));
    CHECK(h.equality_claimed);
    CHECK(delta_star_nonsa(harmonic).lower_bound == doctest::Approx(1.0));
    CHECK(delta_star_nonsa(constant).lower_bound == doctest::Approx(2.0).epsilon(1e-5));
    const auto short_profile = profile_of([](double) { return 1.0; }, 1e-2, 1.0, 8);
    CHECK_THROWS_AS(delta_star_lower(short_profile, 1), PrecisionError);
    PhiProfile flagged = harmonic;
    flagged.analytic_limit = 0.0;
    const auto r = delta_star_nonsa(flagged);
    CHECK(r.lower_bound == 2.0);
    CHECK(r.equality_claimed);
    CHECK(r.to_json().find("\"lower_bound\"") != std::string::npos);
  }

  TEST_CASE("free Stam inequality") {
    CHECK(stam_bound(2, 2) == 1.0);
    CHECK(stam_bound(kInfinity, 5) == 5.0);
    CHECK(std::isinf(stam_bound(kInfinity, kInfinity)));
    for (double a : {0.1, 1.0, 7.0})
      for (double b : {0.3, 2.0, kInfinity}) CHECK(stam_bound(a, b) <= std::min(a, b));
    CHECK_THROWS_AS(stam_bound(0, 1), std::invalid_argument);
    for (double alpha : {1.0, 10.0, 100.0}) {
      CHECK(stam_limit_display(2, alpha, 1e-10) <= alpha * 1e-10);
      CHECK(stam_limit_display(2, alpha, 1e-4) > stam_limit_display(2, alpha, 1e-6));
      CHECK(stam_limit_display(2, alpha, 0.5) == doctest::Approx(2 * 0.5 / (2 / alpha + 0.5)));
    }
  }

  TEST_CASE("circular element identities") {
    for (const auto& rec : nonsa_fisher_identity_check(6)) CHECK_MESSAGE(rec.pass, rec.name);
    CHECK_THROWS_AS(nonsa_fisher_identity_check(1), std::invalid_argument);
  }

  TEST_CASE("truncated projections of the conjugate variable increase with degree") {
    const Rational t(1, 4), csq(3, 4);
    Rational prev = -1;
    for (int d = 0; d <= 2; ++d) {
      const Rational v = phi_complex_truncated(t, csq, d);
      CHECK(v >= prev);
      CHECK(v <= phi_dt_relative_D(t, csq));
      prev = v;
    }
    CHECK_THROWS_AS(phi_complex_truncated(t, csq, 4), std::invalid_argument);
  }

  TEST_CASE("profile validation and CSV round trip") {
    PhiProfile p;
    p.add(Rational(1), 2.0);
    p.add_exact(Rational(1, 2), Rational(3, 2));
    p.add(Rational(1, 4), kInfinity);
    std::stringstream io;
    p.write_csv(io);
    const PhiProfile back = PhiProfile::read_csv(io);
    REQUIRE(back.samples.size() == 3);
    CHECK(*back.samples[1].exact_phi == Rational(3, 2));
    CHECK(std::isinf(back.samples[2].phi));
    PhiProfile unordered;
    unordered.add(Rational(1, 2), 1.0);
    unordered.add(Rational(1), 1.0);
    CHECK_THROWS_AS(unordered.validate(), std::invalid_argument);
    PhiProfile negative;
    negative.add(Rational(1, 4), -1.0);
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  }

  TEST_CASE("bound suite") {
    for (const auto& rec : bounds_suite()) CHECK_MESSAGE(rec.pass, rec.name);
  }
}
