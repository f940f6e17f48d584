#pragma once

// Exact E_D and tau for words in the D-Gaussian family {T1, T1*, T2, T2*}
// with piecewise-polynomial insertions from the diagonal algebra D.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dtlab/check.hpp"
#include "dtlab/ncpart.hpp"
#include "dtlab/piecewise_poly.hpp"

namespace dtlab::dgauss {

inline constexpr int kMaxGenerators = 12;

enum class Family { T1 = 0, T2 = 1 };

struct Generator {
  Family family = Family::T1;
  bool adjoint = false;

  int index() const { return 2 * static_cast<int>(family) + (adjoint ? 1 : 0); }
  std::string name() const;
};

inline constexpr Generator kT1{Family::T1, false};
inline constexpr Generator kT1Star{Family::T1, true};
inline constexpr Generator kT2{Family::T2, false};
inline constexpr Generator kT2Star{Family::T2, true};

/// An affine letter: drift + sum_g coef[g] * g, with g indexed as
/// 2*family + adjoint. Plain generators and diagonal elements are special
/// cases; S_t and xi_t are single letters.
struct Letter {
  PiecewisePoly drift;
  std::array<Rational, 4> coef{};

  static Letter generator(Generator g, const Rational& c = 1);
  static Letter diagonal(PiecewisePoly d);

  Letter adjoint() const;
  bool is_diagonal() const;
  Letter& operator+=(const Letter& o);
  friend Letter operator+(Letter a, const Letter& b) { return a += b; }
  friend Letter operator*(const Rational& s, Letter a);

  friend bool operator==(const Letter&, const Letter&) = default;
  friend bool operator<(const Letter& a, const Letter& b);
  std::string to_text() const;
};

/// d0 x1 d1 ... xk dk. Diagonal letters are folded into the insertions on
/// construction, so letters() holds only letters with a Gaussian part.
class StarWord {
 public:
  StarWord();
  explicit StarWord(PiecewisePoly d);
  StarWord(std::vector<PiecewisePoly> insertions, std::vector<Letter> letters);
  static StarWord single(const Letter& x);

  const std::vector<PiecewisePoly>& insertions() const { return insertions_; }
  const std::vector<Letter>& letters() const { return letters_; }
  int length() const { return static_cast<int>(letters_.size()); }
  bool is_zero() const;

  friend StarWord operator*(const StarWord& a, const StarWord& b);
  StarWord adjoint() const;

  friend bool operator==(const StarWord&, const StarWord&) = default;
  friend bool operator<(const StarWord& a, const StarWord& b);
  std::string to_text() const;

 private:
  void normalize();
  std::vector<PiecewisePoly> insertions_;
  std::vector<Letter> letters_;
};

/// Finite rational linear combination of StarWords, kept canonical: terms
/// sorted, like words merged, zero terms dropped.
class WordExpr {
 public:
  using Term = std::pair<Rational, StarWord>;

  WordExpr() = default;
  WordExpr(StarWord w, const Rational& c = 1);
  WordExpr(const Letter& x) : WordExpr(StarWord::single(x)) {}

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  WordExpr& operator+=(const WordExpr& o);
  WordExpr& operator-=(const WordExpr& o);
  friend WordExpr operator+(WordExpr a, const WordExpr& b) { return a += b; }
  friend WordExpr operator-(WordExpr a, const WordExpr& b) { return a -= b; }
  friend WordExpr operator*(const WordExpr& a, const WordExpr& b);
  friend WordExpr operator*(const Rational& s, WordExpr a);

  WordExpr adjoint() const;
  /// Rewrites every affine letter as a sum over its drift and generators,
  /// leaving words whose letters are single generators.
  WordExpr expand_generators() const;

  friend bool operator==(const WordExpr&, const WordExpr&) = default;
  std::string to_text() const;

 private:
  void canonicalize();
  std::vector<Term> terms_;
};

/// a * b - b * a
WordExpr commutator(const WordExpr& a, const WordExpr& b);

PiecewisePoly ed_moment(const StarWord& w);
PiecewisePoly ed_moment(const WordExpr& w);
Rational tau(const StarWord& w);
Rational tau(const WordExpr& w);

/// *-moments of a single letter x over the alphabet {0 = x, 1 = x*}.
ncpart::MomentSequence star_moments(const Letter& x, int max_len);

/// Scalars and letters of S_t = D/sqrt(t) + sqrt((c^2+t)/t) T1 + T2* and
/// xi_t = sqrt(t/(c^2+t)) T1* + T2. Construction fails with
/// std::invalid_argument unless alpha = sqrt(t/(c^2+t)) is rational and, for
/// nonzero D, sqrt(t) is rational.
class DTParams {
 public:
  DTParams(Rational t, Rational csq, PiecewisePoly D = PiecewisePoly::identity());

  const Rational& t() const { return t_; }
  const Rational& csq() const { return csq_; }
  const Rational& alpha() const { return alpha_; }
  const Rational& beta() const { return beta_; }
  const PiecewisePoly& D() const { return D_; }
  /// D / sqrt(t), the diagonal part of S_t.
  const PiecewisePoly& drift() const { return drift_; }

  Letter S() const;
  Letter S_star() const { return S().adjoint(); }
  Letter xi() const;
  Letter xi_star() const { return xi().adjoint(); }
  /// letter 0 -> S_t, 1 -> S_t*.
  Letter s_letter(int which) const { return which == 0 ? S() : S_star(); }

 private:
  Rational t_, csq_, alpha_, beta_;
  PiecewisePoly D_, drift_;
};

/// b0 a1 b1 ... an bn with a_m in {S_t, S_t*} (0/1); insertions may be empty
/// (all ones) or have letters.size()+1 entries.
StarWord s_word(const DTParams& p, const std::vector<int>& letters,
                const std::vector<PiecewisePoly>& insertions = {});

/// tau(xi b0 a1 b1 ... an bn) - sum over m with a_m == target of
/// tau(b0 a1 ... a_{m-1} b_{m-1}) tau(b_m a_{m+1} ... an bn).
/// target 0 means xi is claimed conjugate to S_t, 1 to S_t*.
Rational conjugate_residual(const WordExpr& xi, int target, const std::vector<int>& letters,
                            const std::vector<PiecewisePoly>& insertions, const DTParams& p);

/// 2 tau(xi_t* xi_t); throws std::logic_error when it differs from
/// t/(c^2+t) + 1.
Rational fisher_exact(const Rational& t, const Rational& csq);

/// *-cumulants of T1 + T2* up to max_len (even, <= 8) against the circular
/// pattern kappa(c,c*) = kappa(c*,c) = 1, all others 0.
CheckList circularity_check(int max_len);

/// sqrt(a) T1 + sqrt(b) Y (Y circular, free) against sqrt(a+b) T1 + sqrt(b) T2*:
/// all *-moments up to max_len (<= 6), the first by free convolution, the
/// second by the exact engine.
CheckList distribution_identity_check(const Rational& a, const Rational& b, int max_len);

/// j_t as the explicit generator formula.
WordExpr liberation_gradient(const DTParams& p);
/// j_t as [xi_t, S_t] + [xi_t*, S_t*].
WordExpr liberation_gradient_commutators(const DTParams& p);

/// tau(j_t w) for every *-word w in S_t of length <= max_len (<= 4), plus a
/// record that the formula matches the commutator definition.
CheckList liberation_orthogonality(const Rational& t, const Rational& csq, int max_len);

struct KernelPair {
  Rational lhs;
  Rational rhs;
};

/// tau(T2* a T2 b) against the integral of (integral_0^x a) b(x).
KernelPair statelemma_kernel_check(const PiecewisePoly& a, const PiecewisePoly& b);

/// All *-words over {0, 1} of every length 0..max_len, shortest first.
std::vector<std::vector<int>> star_words_up_to(int max_len);
std::string star_word_name(const std::vector<int>& w, const char* letter);

}  // namespace dtlab::dgauss
