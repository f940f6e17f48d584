#include "dtlab/dgauss.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace dtlab::dgauss {

namespace {

const char* kGeneratorNames[4] = {"T1", "T1*", "T2", "T2*"};

template <class T>
bool lex_less(const std::vector<T>& a, const std::vector<T>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// E_D(x f y) for the Gaussian parts of x and y: only T f T* and T* f T of
// one family survive.
PiecewisePoly covariance(const Letter& x, const Letter& y, const PiecewisePoly& f) {
  Rational cl = x.coef[0] * y.coef[1] + x.coef[2] * y.coef[3];
  Rational cls = x.coef[1] * y.coef[0] + x.coef[3] * y.coef[2];
  PiecewisePoly out;
  if (sgn(cl) != 0) out += cl * cov_L(f);
  if (sgn(cls) != 0) out += cls * cov_Lstar(f);
  return out;
}

}  // namespace

std::string Generator::name() const { return kGeneratorNames[index()]; }

// ---------------------------------------------------------------------------

Letter Letter::generator(Generator g, const Rational& c) {
  Letter x;
  x.coef[static_cast<std::size_t>(g.index())] = c;
  return x;
}

Letter Letter::diagonal(PiecewisePoly d) {
  Letter x;
  x.drift = std::move(d);
  return x;
}

Letter Letter::adjoint() const {
  Letter x;
  x.drift = drift;
  x.coef = {coef[1], coef[0], coef[3], coef[2]};
  return x;
}

bool Letter::is_diagonal() const {
  return std::all_of(coef.begin(), coef.end(), [](const Rational& c) { return sgn(c) == 0; });
}

Letter& Letter::operator+=(const Letter& o) {
  drift += o.drift;
  for (std::size_t i = 0; i < 4; ++i) coef[i] += o.coef[i];
  return *this;
}

Letter operator*(const Rational& s, Letter a) {
  a.drift *= s;
  for (auto& c : a.coef) c *= s;
  return a;
}

bool operator<(const Letter& a, const Letter& b) {
  if (a.drift != b.drift) return a.drift < b.drift;
  return std::lexicographical_compare(a.coef.begin(), a.coef.end(), b.coef.begin(), b.coef.end());
}

std::string Letter::to_text() const {
  int nonzero = 0;
  int last = -1;
  for (int g = 0; g < 4; ++g) {
    if (sgn(coef[static_cast<std::size_t>(g)]) != 0) {
      ++nonzero;
      last = g;
    }
  }
  if (drift.is_zero() && nonzero == 1 && coef[static_cast<std::size_t>(last)] == 1) return kGeneratorNames[last];
  std::string out = "(";
  bool first = true;
  if (!drift.is_zero()) {
    out += drift.to_text();
    first = false;
  }
  for (int g = 0; g < 4; ++g) {
    const auto& c = coef[static_cast<std::size_t>(g)];
    if (sgn(c) == 0) continue;
    if (!first) out += " + ";
    out += to_string(c) + "*" + kGeneratorNames[g];
    first = false;
  }
  if (first) out += "0/1";
  return out + ")";
}

// ---------------------------------------------------------------------------

StarWord::StarWord() : insertions_{PiecewisePoly::constant(1)} {}

StarWord::StarWord(PiecewisePoly d) : insertions_{std::move(d)} { normalize(); }

StarWord::StarWord(std::vector<PiecewisePoly> insertions, std::vector<Letter> letters)
    : insertions_(std::move(insertions)), letters_(std::move(letters)) {
  if (insertions_.empty()) insertions_.assign(letters_.size() + 1, PiecewisePoly::constant(1));
  if (insertions_.size() != letters_.size() + 1) {
    throw std::invalid_argument("StarWord: need exactly one more insertion than letters");
  }
  normalize();
}

StarWord StarWord::single(const Letter& x) { return StarWord({}, {x}); }

void StarWord::normalize() {
  std::vector<PiecewisePoly> ins{insertions_.front()};
  std::vector<Letter> let;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (letters_[i].is_diagonal()) {
      ins.back() = ins.back() * letters_[i].drift * insertions_[i + 1];
    } else {
      let.push_back(std::move(letters_[i]));
      ins.push_back(std::move(insertions_[i + 1]));
    }
  }
  if (std::any_of(ins.begin(), ins.end(), [](const PiecewisePoly& d) { return d.is_zero(); })) {
    ins.assign(1, PiecewisePoly());
    let.clear();
  }
  insertions_ = std::move(ins);
  letters_ = std::move(let);
}

bool StarWord::is_zero() const { return letters_.empty() && insertions_.front().is_zero(); }

StarWord operator*(const StarWord& a, const StarWord& b) {
  std::vector<PiecewisePoly> ins(a.insertions_.begin(), a.insertions_.end() - 1);
  ins.push_back(a.insertions_.back() * b.insertions_.front());
  ins.insert(ins.end(), b.insertions_.begin() + 1, b.insertions_.end());
  std::vector<Letter> let = a.letters_;
  let.insert(let.end(), b.letters_.begin(), b.letters_.end());
  return StarWord(std::move(ins), std::move(let));
}

StarWord StarWord::adjoint() const {
  std::vector<PiecewisePoly> ins(insertions_.rbegin(), insertions_.rend());
  std::vector<Letter> let;
  let.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) let.push_back(it->adjoint());
  return StarWord(std::move(ins), std::move(let));
}

bool operator<(const StarWord& a, const StarWord& b) {
  if (a.letters_.size() != b.letters_.size()) return a.letters_.size() < b.letters_.size();
  if (a.letters_ != b.letters_) return lex_less(a.letters_, b.letters_);
  return lex_less(a.insertions_, b.insertions_);
}

std::string StarWord::to_text() const {
  const PiecewisePoly one = PiecewisePoly::constant(1);
  std::string out;
  auto append = [&out](const std::string& s) {
    if (!out.empty()) out += ' ';
    out += s;
  };
  for (std::size_t i = 0; i < insertions_.size(); ++i) {
    if (insertions_[i] != one) append(insertions_[i].to_text());
    if (i < letters_.size()) append(letters_[i].to_text());
  }
  return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------------------

WordExpr::WordExpr(StarWord w, const Rational& c) {
  terms_.emplace_back(c, std::move(w));
  canonicalize();
}

void WordExpr::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.second < b.second; });
  std::vector<Term> merged;
  for (auto& term : terms_) {
    if (sgn(term.first) == 0 || term.second.is_zero()) continue;
    if (!merged.empty() && merged.back().second == term.second) {
      merged.back().first += term.first;
      if (sgn(merged.back().first) == 0) merged.pop_back();
    } else {
      merged.push_back(std::move(term));
    }
  }
  terms_ = std::move(merged);
}

WordExpr& WordExpr::operator+=(const WordExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  canonicalize();
  return *this;
}

WordExpr& WordExpr::operator-=(const WordExpr& o) { return *this += Rational(-1) * o; }

WordExpr operator*(const WordExpr& a, const WordExpr& b) {
  WordExpr out;
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ca, wa] : a.terms_) {
    for (const auto& [cb, wb] : b.terms_) out.terms_.emplace_back(ca * cb, wa * wb);
  }
  out.canonicalize();
  return out;
}

WordExpr operator*(const Rational& s, WordExpr a) {
  for (auto& term : a.terms_) term.first *= s;
  a.canonicalize();
  return a;
}

WordExpr WordExpr::adjoint() const {
  WordExpr out;
  for (const auto& [c, w] : terms_) out.terms_.emplace_back(c, w.adjoint());
  out.canonicalize();
  return out;
}

WordExpr WordExpr::expand_generators() const {
  WordExpr out;
  for (const auto& [c, w] : terms_) {
    const auto& letters = w.letters();
    std::vector<Letter> chosen(letters.size());
    auto rec = [&](auto&& self, std::size_t pos, const Rational& coef) -> void {
      if (pos == letters.size()) {
        out.terms_.emplace_back(coef, StarWord(w.insertions(), chosen));
        return;
      }
      const Letter& x = letters[pos];
      if (!x.drift.is_zero()) {
        chosen[pos] = Letter::diagonal(x.drift);
        self(self, pos + 1, coef);
      }
      for (int g = 0; g < 4; ++g) {
        const auto& cg = x.coef[static_cast<std::size_t>(g)];
        if (sgn(cg) == 0) continue;
        chosen[pos] = Letter();
        chosen[pos].coef[static_cast<std::size_t>(g)] = 1;
        self(self, pos + 1, coef * cg);
      }
    };
    rec(rec, 0, c);
  }
  out.canonicalize();
  return out;
}

std::string WordExpr::to_text() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += " + ";
    out += to_string(terms_[i].first) + " * " + terms_[i].second.to_text();
  }
  return out;
}

WordExpr commutator(const WordExpr& a, const WordExpr& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------

PiecewisePoly ed_moment(const StarWord& w) {
  const int k = w.length();
  if (k > kMaxGenerators) {
    throw std::invalid_argument("ed_moment: words are limited to " + std::to_string(kMaxGenerators) + " letters");
  }
  const auto& b = w.insertions();
  const auto& x = w.letters();
  // g[i][j] = E_D(x_{i+1} b_{i+1} ... x_j b_j), letters 1-based.
  std::vector<std::vector<PiecewisePoly>> g(static_cast<std::size_t>(k) + 1,
                                            std::vector<PiecewisePoly>(static_cast<std::size_t>(k) + 1));
  for (int i = k; i >= 0; --i) {
    const auto ui = static_cast<std::size_t>(i);
    g[ui][ui] = PiecewisePoly::constant(1);
    if (i == k) continue;
    const Letter& first = x[ui];
    const PiecewisePoly& after_first = b[ui + 1];
    for (int j = i + 1; j <= k; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      PiecewisePoly acc;
      if (!first.drift.is_zero()) acc += first.drift * after_first * g[ui + 1][uj];
      for (int m = i + 2; m <= j; ++m) {
        const auto um = static_cast<std::size_t>(m);
        PiecewisePoly inner = covariance(first, x[um - 1], after_first * g[ui + 1][um - 1]);
        if (inner.is_zero()) continue;
        acc += inner * b[um] * g[um][uj];
      }
      g[ui][uj] = std::move(acc);
    }
  }
  return b[0] * g[0][static_cast<std::size_t>(k)];
}

PiecewisePoly ed_moment(const WordExpr& w) {
  PiecewisePoly out;
  for (const auto& [c, word] : w.terms()) out += c * ed_moment(word);
  return out;
}

Rational tau(const StarWord& w) { return ed_moment(w).integral(); }

Rational tau(const WordExpr& w) {
  Rational out = 0;
  for (const auto& [c, word] : w.terms()) out += c * tau(word);
  return out;
}

ncpart::MomentSequence star_moments(const Letter& x, int max_len) {
  const Letter xs = x.adjoint();
  ncpart::MomentSequence m(2, max_len);
  for (int len = 1; len <= max_len; ++len) {
    for (const auto& w : ncpart::all_words(2, len)) {
      std::vector<Letter> letters;
      letters.reserve(w.size());
      for (int l : w) letters.push_back(l == 0 ? x : xs);
      m.set(w, tau(StarWord({}, std::move(letters))));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

DTParams::DTParams(Rational t, Rational csq, PiecewisePoly D)
    : t_(std::move(t)), csq_(std::move(csq)), D_(std::move(D)) {
  if (sgn(t_) <= 0 || sgn(csq_) <= 0) throw std::invalid_argument("t and c^2 must be positive");
  const auto alpha = rational_sqrt(t_ / (csq_ + t_));
  if (!alpha) {
    throw std::invalid_argument("t/(c^2+t) = " + to_string(t_ / (csq_ + t_)) +
                                " is not the square of a rational; use the Monte Carlo path for these parameters");
  }
  alpha_ = *alpha;
  beta_ = 1 / alpha_;
  if (!D_.is_zero()) {
    const auto root = rational_sqrt(t_);
    if (!root) {
      throw std::invalid_argument("sqrt(t) must be rational when D is nonzero; use the Monte Carlo path");
    }
    drift_ = D_ * Rational(1 / *root);
  }
}

Letter DTParams::S() const {
  Letter s = Letter::generator(kT1, beta_) + Letter::generator(kT2Star);
  s.drift = drift_;
  return s;
}

Letter DTParams::xi() const { return Letter::generator(kT1Star, alpha_) + Letter::generator(kT2); }

StarWord s_word(const DTParams& p, const std::vector<int>& letters, const std::vector<PiecewisePoly>& insertions) {
  std::vector<Letter> xs;
  xs.reserve(letters.size());
  for (int l : letters) {
    if (l != 0 && l != 1) throw std::invalid_argument("S_t words use letters 0 (S_t) and 1 (S_t*)");
    xs.push_back(p.s_letter(l));
  }
  return StarWord(insertions, std::move(xs));
}

Rational conjugate_residual(const WordExpr& xi, int target, const std::vector<int>& letters,
                            const std::vector<PiecewisePoly>& insertions, const DTParams& p) {
  const std::size_t n = letters.size();
  if (n > 5) throw std::invalid_argument("conjugate_residual: words are limited to 5 letters");
  std::vector<PiecewisePoly> b = insertions;
  if (b.empty()) b.assign(n + 1, PiecewisePoly::constant(1));
  if (b.size() != n + 1) throw std::invalid_argument("conjugate_residual: need letters+1 insertions");

  const Rational lhs = tau(xi * WordExpr(s_word(p, letters, b)));
  Rational rhs = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    if (letters[m - 1] != target) continue;
    std::vector<int> pre_letters(letters.begin(), letters.begin() + static_cast<long>(m - 1));
    std::vector<PiecewisePoly> pre_ins(b.begin(), b.begin() + static_cast<long>(m));
    std::vector<int> post_letters(letters.begin() + static_cast<long>(m), letters.end());
    std::vector<PiecewisePoly> post_ins(b.begin() + static_cast<long>(m), b.end());
    const Rational left = tau(s_word(p, pre_letters, pre_ins));
    if (sgn(left) == 0) continue;
    rhs += left * tau(s_word(p, post_letters, post_ins));
  }
  return lhs - rhs;
}

Rational fisher_exact(const Rational& t, const Rational& csq) {
  const DTParams p(t, csq, PiecewisePoly());
  const WordExpr xi(p.xi());
  const Rational value = 2 * tau(xi.adjoint() * xi);
  const Rational closed = t / (csq + t) + 1;
  if (value != closed) {
    throw std::logic_error("fisher_exact: engine value " + to_string(value) + " differs from " + to_string(closed));
  }
  return value;
}

std::vector<std::vector<int>> star_words_up_to(int max_len) {
  std::vector<std::vector<int>> out;
  for (int len = 0; len <= max_len; ++len) {
    for (auto& w : ncpart::all_words(2, len)) out.push_back(std::move(w));
  }
  return out;
}

std::string star_word_name(const std::vector<int>& w, const char* letter) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += letter;
    if (w[i] == 1) out += '*';
  }
  return out;
}

CheckList circularity_check(int max_len) {
  if (max_len < 2 || max_len > 8 || max_len % 2 != 0) {
    throw std::invalid_argument("circularity_check: max_len must be even and in [2, 8]");
  }
  const Letter c = Letter::generator(kT1) + Letter::generator(kT2Star);
  const auto kappa = ncpart::moments_to_cumulants(star_moments(c, max_len));
  CheckList out;
  for (int len = 1; len <= max_len; ++len) {
    for (const auto& w : ncpart::all_words(2, len)) {
      const bool covariance = len == 2 && w[0] != w[1];
      out.push_back(exact_check("kappa(" + star_word_name(w, "c") + ")", covariance ? 1 : 0, kappa.at(w)));
    }
  }
  return out;
}

CheckList distribution_identity_check(const Rational& a, const Rational& b, int max_len) {
  if (max_len < 1 || max_len > 6) throw std::invalid_argument("distribution_identity_check: max_len must be in [1, 6]");
  if (sgn(a) < 0 || sgn(b) < 0) throw std::invalid_argument("distribution_identity_check: a, b must be non-negative");
  const auto ra = rational_sqrt(a);
  const auto rb = rational_sqrt(b);
  const auto rab = rational_sqrt(a + b);
  if (!ra || !rb || !rab) throw std::invalid_argument("distribution_identity_check: a, b and a+b must be rational squares");

  const auto t1_moments = star_moments(Letter::generator(kT1), max_len);
  ncpart::MomentSequence circular_kappa(2, max_len);
  for (int len = 1; len <= max_len; ++len) {
    for (const auto& w : ncpart::all_words(2, len)) circular_kappa.set(w, len == 2 && w[0] != w[1] ? 1 : 0);
  }
  const ncpart::FreeProduct free_side(t1_moments, ncpart::cumulants_to_moments(circular_kappa));

  const Letter z = Letter::generator(kT1, *rab) + Letter::generator(kT2Star, *rb);
  CheckList out;
  for (int len = 1; len <= max_len; ++len) {
    for (const auto& w : ncpart::all_words(2, len)) {
      Rational lhs = 0;
      std::vector<ncpart::MixedLetter> mixed(w.size());
      for (unsigned mask = 0; mask < (1u << len); ++mask) {
        Rational coef = 1;
        for (int i = 0; i < len; ++i) {
          const int family = (mask >> i) & 1u;
          coef *= family == 0 ? *ra : *rb;
          mixed[static_cast<std::size_t>(i)] = {family, w[static_cast<std::size_t>(i)]};
        }
        if (sgn(coef) == 0) continue;
        lhs += coef * free_side.moment(mixed);
      }
      std::vector<Letter> letters;
      for (int l : w) letters.push_back(l == 0 ? z : z.adjoint());
      const Rational rhs = tau(StarWord({}, std::move(letters)));
      out.push_back(exact_check("tau(" + star_word_name(w, "Z") + ")", rhs, lhs));
    }
  }
  return out;
}

WordExpr liberation_gradient(const DTParams& p) {
  const WordExpr t1(Letter::generator(kT1));
  const WordExpr t1s(Letter::generator(kT1Star));
  const WordExpr t2(Letter::generator(kT2));
  const WordExpr t2s(Letter::generator(kT2Star));
  const WordExpr d(StarWord(p.drift()));
  const WordExpr xi(p.xi());
  const WordExpr xis(p.xi_star());
  return (p.alpha() - p.beta()) * (commutator(t1, t2) + commutator(t1s, t2s)) + commutator(xi, d) +
         commutator(xis, d);
}

WordExpr liberation_gradient_commutators(const DTParams& p) {
  return commutator(WordExpr(p.xi()), WordExpr(p.S())) + commutator(WordExpr(p.xi_star()), WordExpr(p.S_star()));
}

CheckList liberation_orthogonality(const Rational& t, const Rational& csq, int max_len) {
  if (max_len < 0 || max_len > 4) throw std::invalid_argument("liberation_orthogonality: max_len must be in [0, 4]");
  const DTParams p(t, csq);
  const WordExpr j = liberation_gradient(p);
  CheckList out;
  const bool same =
      j.expand_generators() == liberation_gradient_commutators(p).expand_generators();
  out.push_back({"j_t formula equals [xi_t,S_t]+[xi_t*,S_t*]", "equal", same ? "equal" : "different", 0.0, same,
                 Provenance::Exact});
  for (const auto& w : star_words_up_to(max_len)) {
    out.push_back(exact_check("tau(j_t " + star_word_name(w, "S") + ")", 0, tau(j * WordExpr(s_word(p, w)))));
  }
  return out;
}

KernelPair statelemma_kernel_check(const PiecewisePoly& a, const PiecewisePoly& b) {
  const StarWord w({PiecewisePoly::constant(1), a, b},
                   {Letter::generator(kT2Star), Letter::generator(kT2)});
  return {tau(w), (cov_Lstar(a) * b).integral()};
}

}  // namespace dtlab::dgauss
