#pragma once

// Free Fisher information, non-microstates entropy and entropy dimension:
// closed forms, profile quadrature and bound checkers.

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dtlab/check.hpp"
#include "dtlab/rational.hpp"

namespace dtlab::fisher {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PhiSample {
  Rational t;
  double phi = 0.0;                  // may be +infinity
  std::optional<Rational> exact_phi;  // set when phi is known exactly
};

/// Samples of t -> Phi*(a + sqrt(t) S : B), strictly decreasing in t.
struct PhiProfile {
  std::vector<PhiSample> samples;
  /// The integrand n/(1+t) - Phi*(t) is known to vanish beyond the last
  /// sample, so no tail is estimated.
  bool analytic_tail = false;
  /// A limsup of t Phi*(t) at 0 supplied from outside the computation.
  std::optional<double> analytic_limit;

  void validate() const;
  void add(const Rational& t, double phi);
  void add_exact(const Rational& t, const Rational& phi);

  void write_csv(std::ostream& os) const;
  static PhiProfile read_csv(std::istream& is);
};

/// 10^{-k/per_decade} for k = 0..decades*per_decade, then scaled by t_max.
std::vector<Rational> log_grid(double t_max, int decades, int per_decade);

struct DimensionReport {
  int n_vars = 0;
  double limsup_estimate = 0.0;
  double lower_bound = 0.0;
  bool equality_claimed = false;
  std::string to_json() const;
};

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

/// t/(csq+t) + 1.
Rational phi_dt_relative_D(const Rational& t, const Rational& csq);

/// delta*(Z : D) from the closed form: 2 - lim (t/(c^2+t)+1) = 1, with the
/// equality flag taken from the numerical recipe on the profile.
DimensionReport delta_star_relative_D(const Rational& csq);

/// (n/2) log(2 pi e C^2 / n).
double chi_star_upper(int n_vars, double csq);

/// 1/2 integral_0^inf [n/(1+t) - Phi*(t)] dt + (n/2) log(2 pi e) by a
/// trapezoid rule in log t (one Richardson step on log-uniform grids).
/// Returns -infinity when t Phi*(t) does not vanish at the small-t end.
Quadrature chi_star_from_profile(const PhiProfile& profile, int n_vars);

/// n - limsup t Phi*(t), the limsup read off the smallest decade.
DimensionReport delta_star_lower(const PhiProfile& profile, int n_vars);

/// (1/phi1 + 1/phi2)^{-1}; infinite arguments contribute 0.
double stam_bound(double phi1, double phi2);

/// t * stam_bound(alpha, n/t) = n t / (n/alpha + t).
double stam_limit_display(int n_vars, double alpha, double t);

/// Cumulant-level certificates that (c*, c) is conjugate to (c, c*) for the
/// circular c = T1 + T2*, that Re c, Im c are free semicirculars of
/// variance 1/2, and the identity 2 Phi*(c, c*) = Phi*(Re c, Im c).
CheckList nonsa_fisher_identity_check(int max_len);

/// 2 ||P xi_t||^2 with P the projection onto *-polynomials in S_t of
/// degree <= degree (<= 3). A lower estimate of Phi*(S_t, S_t* : C).
Rational phi_complex_truncated(const Rational& t, const Rational& csq, int degree);

/// delta*(a : B) >= 2 - limsup t Phi*(a + sqrt(t) Y : B). With an analytic
/// limit on the profile that value replaces the numerical estimate.
DimensionReport delta_star_nonsa(const PhiProfile& profile);

/// Semicircular profile n/(v+t) on a log grid.
PhiProfile semicircular_profile(int n_vars, const Rational& v, double t_min, double t_max, int per_decade);
/// t -> (t/(c^2+t) + 1)/t, the DT profile relative to D before rescaling.
PhiProfile dt_profile(const Rational& csq, double t_min, double t_max, int per_decade);

/// chi* upper-bound dominance, Stam bound <= min and the limit display
/// n t/((n/alpha)+t) -> 0 for alpha in {1, 10, 100}.
CheckList bounds_suite();

}  // namespace dtlab::fisher
