#pragma once

// Piecewise polynomials on [0,1] with exact rational coefficients: the
// elements of the diagonal algebra used by the exact engine.

#include <string>
#include <string_view>
#include <vector>

#include "dtlab/rational.hpp"

namespace dtlab {

class PiecewisePoly {
 public:
  /// Coefficients in ascending powers of x (global, not shifted per piece).
  using Coeffs = std::vector<Rational>;

  /// The zero function.
  PiecewisePoly();
  /// starts[0] must be 0, strictly increasing, all < 1; piece i lives on
  /// [starts[i], starts[i+1]), the last one on [starts.back(), 1].
  PiecewisePoly(std::vector<Rational> starts, std::vector<Coeffs> pieces);

  static PiecewisePoly constant(const Rational& c);
  static PiecewisePoly polynomial(Coeffs coeffs);
  static PiecewisePoly monomial(int degree, const Rational& coef = 1);
  static PiecewisePoly identity() { return monomial(1); }
  /// 1 on [a, b), 0 elsewhere (closed at 1 when b == 1).
  static PiecewisePoly indicator(const Rational& a, const Rational& b);

  Rational operator()(const Rational& x) const;
  double eval(double x) const;

  const std::vector<Rational>& starts() const { return starts_; }
  const std::vector<Coeffs>& pieces() const { return pieces_; }
  bool is_zero() const;
  /// True when the function is a single constant piece; c receives it.
  bool is_constant(Rational* c = nullptr) const;
  int degree() const;

  /// Exact integral over [0,1].
  Rational integral() const;

  PiecewisePoly& operator+=(const PiecewisePoly& o);
  PiecewisePoly& operator-=(const PiecewisePoly& o);
  PiecewisePoly& operator*=(const PiecewisePoly& o);
  PiecewisePoly& operator*=(const Rational& s);
  friend PiecewisePoly operator+(PiecewisePoly a, const PiecewisePoly& b) { return a += b; }
  friend PiecewisePoly operator-(PiecewisePoly a, const PiecewisePoly& b) { return a -= b; }
  friend PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b);
  friend PiecewisePoly operator*(PiecewisePoly a, const Rational& s) { return a *= s; }
  friend PiecewisePoly operator*(const Rational& s, PiecewisePoly a) { return a *= s; }
  PiecewisePoly operator-() const;

  friend bool operator==(const PiecewisePoly&, const PiecewisePoly&) = default;
  /// Arbitrary but fixed total order (used for canonical sorting of terms).
  friend bool operator<(const PiecewisePoly& a, const PiecewisePoly& b);

  /// Canonical text: "{s0:c0,c1,...;s1:...}" with every rational as p/q.
  std::string to_text() const;
  static PiecewisePoly from_text(std::string_view text);

 private:
  void normalize();
  template <class Op>
  static PiecewisePoly combine(const PiecewisePoly& a, const PiecewisePoly& b, Op op);

  std::vector<Rational> starts_;
  std::vector<Coeffs> pieces_;
};

/// x -> integral of f over [x, 1].
PiecewisePoly cov_L(const PiecewisePoly& f);
/// x -> integral of f over [0, x].
PiecewisePoly cov_Lstar(const PiecewisePoly& f);

}  // namespace dtlab
