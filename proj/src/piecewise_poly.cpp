#include "dtlab/piecewise_poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dtlab {

namespace {

using Coeffs = PiecewisePoly::Coeffs;

void trim(Coeffs& c) {
  while (!c.empty() && sgn(c.back()) == 0) c.pop_back();
}

Coeffs poly_add(const Coeffs& a, const Coeffs& b, int sign) {
  Coeffs out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sign > 0 ? b[i] : Rational(-b[i]);
  trim(out);
  return out;
}

Coeffs poly_mul(const Coeffs& a, const Coeffs& b) {
  if (a.empty() || b.empty()) return {};
  Coeffs out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  trim(out);
  return out;
}

Rational poly_eval(const Coeffs& c, const Rational& x) {
  Rational acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Coeffs antiderivative(const Coeffs& c) {
  if (c.empty()) return {};
  Coeffs out(c.size() + 1);
  for (std::size_t k = 0; k < c.size(); ++k) out[k + 1] = c[k] / Rational(static_cast<long>(k + 1));
  return out;
}

std::size_t piece_index(const std::vector<Rational>& starts, const Rational& x) {
  auto it = std::upper_bound(starts.begin(), starts.end(), x);
  return static_cast<std::size_t>(it - starts.begin()) - 1;
}

}  // namespace

PiecewisePoly::PiecewisePoly() : starts_{Rational(0)}, pieces_{Coeffs{}} {}

PiecewisePoly::PiecewisePoly(std::vector<Rational> starts, std::vector<Coeffs> pieces)
    : starts_(std::move(starts)), pieces_(std::move(pieces)) {
  if (starts_.empty() || starts_.size() != pieces_.size()) {
    throw std::invalid_argument("PiecewisePoly: need one coefficient list per piece");
  }
  if (starts_.front() != 0) throw std::invalid_argument("PiecewisePoly: first piece must start at 0");
  for (std::size_t i = 1; i < starts_.size(); ++i) {
    if (!(starts_[i - 1] < starts_[i])) throw std::invalid_argument("PiecewisePoly: breakpoints must increase");
  }
  if (!(starts_.back() < 1)) throw std::invalid_argument("PiecewisePoly: breakpoints must lie in [0,1)");
  normalize();
}

PiecewisePoly PiecewisePoly::constant(const Rational& c) { return polynomial({c}); }

PiecewisePoly PiecewisePoly::polynomial(Coeffs coeffs) { return PiecewisePoly({Rational(0)}, {std::move(coeffs)}); }

PiecewisePoly PiecewisePoly::monomial(int degree, const Rational& coef) {
  if (degree < 0) throw std::invalid_argument("monomial degree must be non-negative");
  Coeffs c(static_cast<std::size_t>(degree) + 1);
  c.back() = coef;
  return polynomial(std::move(c));
}

PiecewisePoly PiecewisePoly::indicator(const Rational& a, const Rational& b) {
  if (a < 0 || b > 1 || !(a < b)) throw std::invalid_argument("indicator: need 0 <= a < b <= 1");
  std::vector<Rational> starts{Rational(0)};
  std::vector<Coeffs> pieces;
  if (a > 0) {
    pieces.push_back({});
    starts.push_back(a);
  }
  pieces.push_back({Rational(1)});
  if (b < 1) {
    starts.push_back(b);
    pieces.push_back({});
  }
  return PiecewisePoly(std::move(starts), std::move(pieces));
}

void PiecewisePoly::normalize() {
  for (auto& p : pieces_) trim(p);
  std::vector<Rational> s{starts_.front()};
  std::vector<Coeffs> p{pieces_.front()};
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    if (pieces_[i] == p.back()) continue;
    s.push_back(starts_[i]);
    p.push_back(std::move(pieces_[i]));
  }
  starts_ = std::move(s);
  pieces_ = std::move(p);
}

Rational PiecewisePoly::operator()(const Rational& x) const {
  if (x < 0 || x > 1) throw std::invalid_argument("PiecewisePoly: evaluation outside [0,1]");
  return poly_eval(pieces_[piece_index(starts_, x)], x);
}

double PiecewisePoly::eval(double x) const {
  std::size_t i = 0;
  while (i + 1 < starts_.size() && starts_[i + 1].get_d() <= x) ++i;
  double acc = 0.0;
  const auto& c = pieces_[i];
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

bool PiecewisePoly::is_zero() const { return pieces_.size() == 1 && pieces_[0].empty(); }

bool PiecewisePoly::is_constant(Rational* c) const {
  if (pieces_.size() != 1 || pieces_[0].size() > 1) return false;
  if (c) *c = pieces_[0].empty() ? Rational(0) : pieces_[0][0];
  return true;
}

int PiecewisePoly::degree() const {
  int d = 0;
  for (const auto& p : pieces_) d = std::max(d, static_cast<int>(p.size()) - 1);
  return d;
}

Rational PiecewisePoly::integral() const {
  Rational total = 0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Coeffs anti = antiderivative(pieces_[i]);
    const Rational hi = i + 1 < starts_.size() ? starts_[i + 1] : Rational(1);
    total += poly_eval(anti, hi) - poly_eval(anti, starts_[i]);
  }
  return total;
}

template <class Op>
PiecewisePoly PiecewisePoly::combine(const PiecewisePoly& a, const PiecewisePoly& b, Op op) {
  std::vector<Rational> starts;
  starts.reserve(a.starts_.size() + b.starts_.size());
  std::merge(a.starts_.begin(), a.starts_.end(), b.starts_.begin(), b.starts_.end(), std::back_inserter(starts));
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  std::vector<Coeffs> pieces;
  pieces.reserve(starts.size());
  std::size_t ia = 0, ib = 0;
  for (const auto& s : starts) {
    while (ia + 1 < a.starts_.size() && a.starts_[ia + 1] <= s) ++ia;
    while (ib + 1 < b.starts_.size() && b.starts_[ib + 1] <= s) ++ib;
    pieces.push_back(op(a.pieces_[ia], b.pieces_[ib]));
  }
  PiecewisePoly out;
  out.starts_ = std::move(starts);
  out.pieces_ = std::move(pieces);
  out.normalize();
  return out;
}

PiecewisePoly& PiecewisePoly::operator+=(const PiecewisePoly& o) {
  if (o.is_zero()) return *this;
  return *this = combine(*this, o, [](const Coeffs& x, const Coeffs& y) { return poly_add(x, y, 1); });
}

PiecewisePoly& PiecewisePoly::operator-=(const PiecewisePoly& o) {
  if (o.is_zero()) return *this;
  return *this = combine(*this, o, [](const Coeffs& x, const Coeffs& y) { return poly_add(x, y, -1); });
}

PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b) {
  if (a.is_zero() || b.is_zero()) return PiecewisePoly();
  Rational c;
  if (a.is_constant(&c)) return b * c;
  if (b.is_constant(&c)) return a * c;
  return PiecewisePoly::combine(a, b, poly_mul);
}

PiecewisePoly& PiecewisePoly::operator*=(const PiecewisePoly& o) { return *this = *this * o; }

PiecewisePoly& PiecewisePoly::operator*=(const Rational& s) {
  if (sgn(s) == 0) return *this = PiecewisePoly();
  for (auto& p : pieces_) {
    for (auto& c : p) c *= s;
  }
  return *this;
}

PiecewisePoly PiecewisePoly::operator-() const { return *this * Rational(-1); }

bool operator<(const PiecewisePoly& a, const PiecewisePoly& b) {
  if (a.starts_ != b.starts_) {
    return std::lexicographical_compare(a.starts_.begin(), a.starts_.end(), b.starts_.begin(), b.starts_.end());
  }
  return std::lexicographical_compare(a.pieces_.begin(), a.pieces_.end(), b.pieces_.begin(), b.pieces_.end(),
                                      [](const Coeffs& x, const Coeffs& y) {
                                        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
                                      });
}

std::string PiecewisePoly::to_text() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) os << ';';
    os << to_string(starts_[i]) << ':';
    if (pieces_[i].empty()) {
      os << "0/1";
      continue;
    }
    for (std::size_t k = 0; k < pieces_[i].size(); ++k) {
      if (k) os << ',';
      os << to_string(pieces_[i][k]);
    }
  }
  os << '}';
  return os.str();
}

PiecewisePoly PiecewisePoly::from_text(std::string_view text) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw std::invalid_argument("piecewise polynomial text must be wrapped in braces");
  }
  text = text.substr(1, text.size() - 2);
  std::vector<Rational> starts;
  std::vector<Coeffs> pieces;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const std::string_view piece = text.substr(0, semi);
    const auto colon = piece.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("piece must look like start:c0,c1,...");
    starts.push_back(parse_rational(piece.substr(0, colon)));
    Coeffs coeffs;
    std::string_view rest = piece.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      coeffs.push_back(parse_rational(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    pieces.push_back(std::move(coeffs));
    if (semi == std::string_view::npos) break;
    text = text.substr(semi + 1);
  }
  return PiecewisePoly(std::move(starts), std::move(pieces));
}

PiecewisePoly cov_Lstar(const PiecewisePoly& f) {
  const auto& starts = f.starts();
  std::vector<Coeffs> pieces;
  pieces.reserve(starts.size());
  Rational accumulated = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Coeffs anti = antiderivative(f.pieces()[i]);
    const Rational at_start = poly_eval(anti, starts[i]);
    const Rational hi = i + 1 < starts.size() ? starts[i + 1] : Rational(1);
    const Rational at_end = poly_eval(anti, hi);
    if (anti.empty()) anti.resize(1);
    anti[0] += accumulated - at_start;
    accumulated += at_end - at_start;
    pieces.push_back(std::move(anti));
  }
  return PiecewisePoly(starts, std::move(pieces));
}

PiecewisePoly cov_L(const PiecewisePoly& f) { return PiecewisePoly::constant(f.integral()) - cov_Lstar(f); }

}  // namespace dtlab
