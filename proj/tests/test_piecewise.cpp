#include <doctest.h>

#include "dtlab/piecewise_poly.hpp"

using namespace dtlab;

TEST_SUITE("piecewise") {
  TEST_CASE("rational parsing") {
    CHECK(parse_rational("6/8") == Rational(3, 4));
    CHECK(parse_rational("-2") == -2);
    CHECK(to_string(Rational(3, 4)) == "3/4");
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/-2"), std::invalid_argument);
    CHECK(*rational_sqrt(Rational(9, 49)) == Rational(3, 7));
    CHECK_FALSE(rational_sqrt(Rational(2)).has_value());
  }

  TEST_CASE("evaluation and integrals") {
    const auto x = PiecewisePoly::identity();
    const auto f = x * x + PiecewisePoly::constant(2);
    CHECK(f(Rational(1, 2)) == Rational(9, 4));
    CHECK(f.integral() == Rational(7, 3));
    CHECK(f.degree() == 2);
    const auto ind = PiecewisePoly::indicator(Rational(1, 4), Rational(3, 4));
    CHECK(ind(Rational(0)) == 0);
    CHECK(ind(Rational(1, 4)) == 1);
    CHECK(ind(Rational(3, 4)) == 0);
    CHECK(ind.integral() == Rational(1, 2));
    CHECK((ind * x).integral() == Rational(1, 4));
    CHECK(ind.eval(0.5) == 1.0);
  }

  TEST_CASE("normal form") {
    const auto a = PiecewisePoly::indicator(0, Rational(1, 2)) + PiecewisePoly::indicator(Rational(1, 2), 1);
    CHECK(a == PiecewisePoly::constant(1));
    Rational c;
    CHECK(a.is_constant(&c));
    CHECK(c == 1);
    CHECK((a - a).is_zero());
    CHECK(PiecewisePoly() == PiecewisePoly::constant(0));
  }

  TEST_CASE("covariance maps") {
    const auto x = PiecewisePoly::identity();
    CHECK(cov_Lstar(PiecewisePoly::constant(1)) == x);
    CHECK(cov_L(PiecewisePoly::constant(1)) == PiecewisePoly::constant(1) - x);
    CHECK(cov_Lstar(x) == Rational(1, 2) * x * x);
    const auto step = PiecewisePoly::indicator(Rational(1, 3), Rational(2, 3));
    const auto s = cov_Lstar(step);
    CHECK(s(Rational(1, 3)) == 0);
    CHECK(s(Rational(1, 2)) == Rational(1, 6));
    CHECK(s(Rational(5, 6)) == Rational(1, 3));
    const auto f = x * x * step + PiecewisePoly::constant(Rational(1, 5));
    CHECK(cov_L(f) + cov_Lstar(f) == PiecewisePoly::constant(f.integral()));
  }

  TEST_CASE("text form round trip") {
    const auto f = PiecewisePoly::indicator(Rational(1, 3), 1) * PiecewisePoly::monomial(2, Rational(-5, 7)) +
                   PiecewisePoly::constant(Rational(1, 2));
    const std::string text = f.to_text();
    CHECK(PiecewisePoly::from_text(text) == f);
    CHECK(PiecewisePoly::from_text(text).to_text() == text);
    CHECK(PiecewisePoly::constant(3).to_text() == "{0/1:3/1}");
    CHECK_THROWS(PiecewisePoly::from_text("{1/2:1/1}"));
  }

  TEST_CASE("construction preconditions") {
    CHECK_THROWS_AS(PiecewisePoly::indicator(Rational(1, 2), Rational(1, 4)), std::invalid_argument);
    CHECK_THROWS_AS(PiecewisePoly({Rational(1, 2)}, {{Rational(1)}}), std::invalid_argument);
  }
}
