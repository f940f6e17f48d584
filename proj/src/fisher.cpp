#include "dtlab/fisher.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dtlab/dgauss.hpp"
#include "dtlab/ncpart.hpp"

namespace dtlab::fisher {

namespace {

constexpr double kLogTwoPiE = 2.8378770664093454835606594728112;  // log(2 pi e)

std::string rational_or_double(const Rational& q) {
  const std::string s = to_string(q);
  if (s.size() <= 24) return s;
  return format_double(q.get_d());
}

Rational parse_number(const std::string& text) {
  if (text.find('/') != std::string::npos) return parse_rational(text);
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad number '" + text + "'");
  return Rational(v);
}

// Exact complex rationals for the Re/Im cumulant expansion.
struct CRational {
  Rational re, im;
  CRational operator*(const CRational& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  CRational& operator+=(const CRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
};

}  // namespace

void PhiProfile::validate() const {
  if (samples.empty()) throw std::invalid_argument("profile has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (sgn(samples[i].t) <= 0) throw std::invalid_argument("profile t values must be positive");
    if (i > 0 && !(samples[i].t < samples[i - 1].t)) {
      throw std::invalid_argument("profile t values must be strictly decreasing");
    }
    if (std::isnan(samples[i].phi) || samples[i].phi < 0) throw std::invalid_argument("profile phi values must be >= 0");
  }
}

void PhiProfile::add(const Rational& t, double phi) { samples.push_back({t, phi, std::nullopt}); }

void PhiProfile::add_exact(const Rational& t, const Rational& phi) { samples.push_back({t, phi.get_d(), phi}); }

void PhiProfile::write_csv(std::ostream& os) const {
  os << "t,phi,exact_flag\n";
  for (const auto& s : samples) {
    os << rational_or_double(s.t) << ',';
    if (s.exact_phi) {
      os << rational_or_double(*s.exact_phi) << ",1\n";
    } else {
      os << (std::isinf(s.phi) ? std::string("inf") : format_double(s.phi)) << ",0\n";
    }
  }
}

PhiProfile PhiProfile::read_csv(std::istream& is) {
  PhiProfile p;
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,phi", 0) != 0) throw std::invalid_argument("profile CSV needs a t,phi,exact_flag header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string t_text, phi_text, flag;
    std::getline(ls, t_text, ',');
    std::getline(ls, phi_text, ',');
    std::getline(ls, flag, ',');
    const Rational t = parse_number(t_text);
    if (phi_text == "inf") {
      p.add(t, kInfinity);
    } else if (flag == "1") {
      p.add_exact(t, parse_number(phi_text));
    } else {
      p.add(t, std::stod(phi_text));
    }
  }
  p.validate();
  return p;
}

std::vector<Rational> log_grid(double t_max, int decades, int per_decade) {
  if (!(t_max > 0) || decades < 1 || per_decade < 1) throw std::invalid_argument("log_grid: bad arguments");
  std::vector<Rational> out;
  const int count = decades * per_decade;
  for (int k = 0; k <= count; ++k) {
    out.emplace_back(t_max * std::pow(10.0, -static_cast<double>(k) / per_decade));
  }
  return out;
}

std::string DimensionReport::to_json() const {
  nlohmann::ordered_json j;
  j["n_vars"] = n_vars;
  j["limsup_estimate"] = limsup_estimate;
  j["lower_bound"] = lower_bound;
  j["equality_claimed"] = equality_claimed;
  return j.dump();
}

// ---------------------------------------------------------------------------

Rational phi_dt_relative_D(const Rational& t, const Rational& csq) {
  if (sgn(t) <= 0 || sgn(csq) <= 0) throw std::invalid_argument("phi_dt_relative_D: t and c^2 must be positive");
  return t / (csq + t) + 1;
}

PhiProfile dt_profile(const Rational& csq, double t_min, double t_max, int per_decade) {
  const int decades = static_cast<int>(std::lround(std::log10(t_max / t_min)));
  PhiProfile p;
  for (const auto& t : log_grid(t_max, decades, per_decade)) p.add_exact(t, phi_dt_relative_D(t, csq) / t);
  return p;
}

PhiProfile semicircular_profile(int n_vars, const Rational& v, double t_min, double t_max, int per_decade) {
  const int decades = static_cast<int>(std::lround(std::log10(t_max / t_min)));
  PhiProfile p;
  for (const auto& t : log_grid(t_max, decades, per_decade)) p.add_exact(t, Rational(n_vars) / (v + t));
  return p;
}

DimensionReport delta_star_relative_D(const Rational& csq) {
  if (sgn(csq) <= 0) throw std::invalid_argument("delta_star_relative_D: c^2 must be positive");
  const DimensionReport numeric = delta_star_lower(dt_profile(csq, 1e-6, 1.0, 16), 2);
  DimensionReport r;
  r.n_vars = 2;
  r.limsup_estimate = 1.0;  // lim_{t->0} (t/(c^2+t) + 1)
  r.lower_bound = 1.0;
  r.equality_claimed = numeric.equality_claimed;
  return r;
}

double chi_star_upper(int n_vars, double csq) {
  if (n_vars < 1) throw std::invalid_argument("chi_star_upper: n must be positive");
  if (!(csq > 0)) throw std::invalid_argument("chi_star_upper: C^2 must be positive");
  return 0.5 * n_vars * (kLogTwoPiE + std::log(csq / n_vars));
}

Quadrature chi_star_from_profile(const PhiProfile& profile, int n_vars) {
  profile.validate();
  if (n_vars < 1) throw std::invalid_argument("chi_star_from_profile: n must be positive");
  std::vector<double> t, g;
  for (auto it = profile.samples.rbegin(); it != profile.samples.rend(); ++it) {
    if (std::isinf(it->phi)) return {-kInfinity, 0.0};
    t.push_back(it->t.get_d());
    g.push_back(n_vars / (1.0 + t.back()) - it->phi);
  }
  const std::size_t count = t.size();
  if (count < 3) throw PrecisionError("chi_star_from_profile: profile too sparse");
  const double decades = std::log10(t.back() / t.front());
  if ((count - 1) < 16.0 * decades - 1e-9) {
    throw PrecisionError("chi_star_from_profile: fewer than 16 points per decade");
  }
  if (!profile.analytic_tail && t.back() < 1e3) {
    throw PrecisionError("chi_star_from_profile: profile must reach t >= 1e3 or carry an analytic tail");
  }
  if (t.front() * profile.samples.back().phi > 1e-3) return {-kInfinity, 0.0};

  std::vector<double> s(count), h(count);
  for (std::size_t i = 0; i < count; ++i) {
    s[i] = std::log(t[i]);
    h[i] = g[i] * t[i];
  }
  auto trapezoid = [&](std::size_t stride) {
    double acc = 0.0;
    for (std::size_t i = 0; i + stride < count; i += stride) acc += 0.5 * (s[i + stride] - s[i]) * (h[i] + h[i + stride]);
    return acc;
  };
  bool uniform = (count - 1) % 2 == 0;
  const double ds = s[1] - s[0];
  for (std::size_t i = 1; uniform && i < count; ++i) uniform = std::abs((s[i] - s[i - 1]) - ds) <= 1e-9 * std::abs(ds);
  const double fine = trapezoid(1);
  Quadrature q;
  if (uniform) {
    const double coarse = trapezoid(2);
    q.value = fine + (fine - coarse) / 3.0;
    q.error = std::abs(fine - coarse) / 3.0;
  } else {
    q.value = fine;
  }
  const double head = g.front() * t.front();
  const double tail = profile.analytic_tail ? 0.0 : g.back() * t.back();
  q.value += head + tail;
  q.error += 0.5 * std::abs(head) + 0.1 * std::abs(tail);
  q.value = 0.5 * q.value + 0.5 * n_vars * kLogTwoPiE;
  q.error *= 0.5;
  return q;
}

DimensionReport delta_star_lower(const PhiProfile& profile, int n_vars) {
  profile.validate();
  const double t_min = profile.samples.back().t.get_d();
  const double t_max = profile.samples.front().t.get_d();
  if (t_max / t_min < 1e3 * (1 - 1e-9)) throw PrecisionError("delta_star_lower: profile must span at least 3 decades");
  double m1 = -kInfinity, m2 = -kInfinity;
  for (const auto& s : profile.samples) {
    const double t = s.t.get_d();
    const double v = std::isinf(s.phi) ? kInfinity : t * s.phi;
    if (t <= 10 * t_min * (1 + 1e-12)) {
      m1 = std::max(m1, v);
    } else if (t <= 100 * t_min * (1 + 1e-12)) {
      m2 = std::max(m2, v);
    }
  }
  if (std::isinf(m2) && m2 < 0) throw PrecisionError("delta_star_lower: no samples in the second decade");
  DimensionReport r;
  r.n_vars = n_vars;
  r.limsup_estimate = m1;
  r.lower_bound = n_vars - m1;
  r.equality_claimed = std::isfinite(m1) && std::isfinite(m2) && std::abs(m1 - m2) <= 0.01 * std::max(1.0, std::abs(m2));
  return r;
}

double stam_bound(double phi1, double phi2) {
  for (double p : {phi1, phi2}) {
    if (std::isnan(p) || p <= 0) throw std::invalid_argument("stam_bound: arguments must be positive or infinite");
  }
  const double r = (std::isinf(phi1) ? 0.0 : 1.0 / phi1) + (std::isinf(phi2) ? 0.0 : 1.0 / phi2);
  return r == 0.0 ? kInfinity : 1.0 / r;
}

double stam_limit_display(int n_vars, double alpha, double t) { return t * stam_bound(alpha, n_vars / t); }

DimensionReport delta_star_nonsa(const PhiProfile& profile) {
  if (profile.analytic_limit) {
    DimensionReport r;
    r.n_vars = 2;
    r.limsup_estimate = *profile.analytic_limit;
    r.lower_bound = 2.0 - *profile.analytic_limit;
    r.equality_claimed = r.lower_bound == 2.0;  // squeezed against delta* <= 2
    return r;
  }
  return delta_star_lower(profile, 2);
}

// ---------------------------------------------------------------------------

CheckList nonsa_fisher_identity_check(int max_len) {
  if (max_len < 2 || max_len > 6) throw std::invalid_argument("nonsa_fisher_identity_check: max_len must be in [2, 6]");
  using dgauss::Letter;
  const Letter c = Letter::generator(dgauss::kT1) + Letter::generator(dgauss::kT2Star);
  const auto m = dgauss::star_moments(c, max_len);
  const auto kappa = ncpart::moments_to_cumulants(m);
  CheckList out;

  // xi_c = c* (letter 1) and xi_{c*} = c (letter 0).
  for (int target = 0; target < 2; ++target) {
    const int xi_letter = 1 - target;
    const std::string xi_name = target == 0 ? "c*" : "c";
    for (int len = 0; len < max_len; ++len) {
      for (const auto& w : ncpart::all_words(2, len)) {
        ncpart::Word full{xi_letter};
        full.insert(full.end(), w.begin(), w.end());
        const bool expected = len == 1 && w[0] == target;
        out.push_back(exact_check("kappa(" + xi_name + (w.empty() ? "" : ", ") +
                                      (w.empty() ? "" : dgauss::star_word_name(w, "c")) + ")",
                                  expected ? 1 : 0, kappa.at(full)));
      }
    }
  }
  const Rational phi_c = m.at({0, 1}) + m.at({1, 0});
  out.push_back(exact_check("Phi*(c, c*)", 2, phi_c));

  // x0 = (c + c*)/2, x1 = -i/2 (c - c*).
  const CRational coef[2][2] = {{{Rational(1, 2), 0}, {Rational(1, 2), 0}}, {{0, Rational(-1, 2)}, {0, Rational(1, 2)}}};
  Rational second[2];
  for (int len = 1; len <= max_len; ++len) {
    for (const auto& u : ncpart::all_words(2, len)) {
      CRational value{0, 0};
      for (const auto& w : ncpart::all_words(2, len)) {
        const Rational& k = kappa.at(w);
        if (sgn(k) == 0) continue;
        CRational term{k, 0};
        for (int i = 0; i < len; ++i) term = term * coef[u[static_cast<std::size_t>(i)]][w[static_cast<std::size_t>(i)]];
        value += term;
      }
      const bool semicircular = len == 2 && u[0] == u[1];
      if (semicircular) second[u[0]] = value.re;
      std::string name = "kappa(";
      for (int i = 0; i < len; ++i) name += std::string(i ? ", " : "") + (u[static_cast<std::size_t>(i)] == 0 ? "Re c" : "Im c");
      name += ")";
      const Rational expected = semicircular ? Rational(1, 2) : Rational(0);
      out.push_back({name, to_string(expected), to_string(value.re) + (sgn(value.im) ? " + " + to_string(value.im) + "i" : ""),
                     0.0, value.re == expected && sgn(value.im) == 0, Provenance::Exact});
    }
  }
  // Conjugate of a variance-v semicircular is x/v, so Phi* = sum 1/v.
  const Rational phi_re_im = 1 / second[0] + 1 / second[1];
  out.push_back(exact_check("Phi*(Re c, Im c)", 4, phi_re_im));
  out.push_back(exact_check("Phi*(Re c, Im c) - 2 Phi*(c, c*)", 0, phi_re_im - 2 * phi_c));

  // Scaling: (c*/r, c/r) is conjugate to (r c, r c*), Phi* = 2/r^2.
  for (const Rational r : {Rational(1, 2), Rational(2), Rational(3)}) {
    const std::string tag = to_string(r);
    out.push_back(exact_check("kappa(c*/r, r c) at r=" + tag, 1, (1 / r) * r * kappa.at({1, 0})));
    out.push_back(exact_check("kappa(c*/r, r c*) at r=" + tag, 0, (1 / r) * r * kappa.at({1, 1})));
    const Rational phi_r = (m.at({0, 1}) + m.at({1, 0})) / (r * r);
    out.push_back(exact_check("Phi*(r c, r c*) at r=" + tag, 2 / (r * r), phi_r));
  }
  return out;
}

Rational phi_complex_truncated(const Rational& t, const Rational& csq, int degree) {
  if (degree < 0 || degree > 3) throw std::invalid_argument("phi_complex_truncated: degree must be in [0, 3]");
  const dgauss::DTParams p(t, csq);
  const auto words = dgauss::star_words_up_to(degree);
  const std::size_t k = words.size();
  std::vector<dgauss::StarWord> basis;
  basis.reserve(k);
  for (const auto& w : words) basis.push_back(dgauss::s_word(p, w));
  const dgauss::WordExpr xi(p.xi());

  // Augmented Gram system [G | b], G_uv = tau(u* v), b_u = tau(u* xi).
  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k + 1));
  for (std::size_t u = 0; u < k; ++u) {
    const dgauss::StarWord us = basis[u].adjoint();
    for (std::size_t v = u; v < k; ++v) {
      a[u][v] = dgauss::tau(us * basis[v]);
      a[v][u] = a[u][v];
    }
    a[u][k] = dgauss::tau(dgauss::WordExpr(us) * xi);
  }
  const std::vector<Rational> b = [&] {
    std::vector<Rational> col(k);
    for (std::size_t u = 0; u < k; ++u) col[u] = a[u][k];
    return col;
  }();
  // Gauss-Jordan; zero pivots (dependent monomials) leave that coordinate 0.
  std::vector<long> pivot_row(k, -1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < k && row < k; ++col) {
    std::size_t piv = row;
    while (piv < k && sgn(a[piv][col]) == 0) ++piv;
    if (piv == k) continue;
    std::swap(a[piv], a[row]);
    const Rational inv = 1 / a[row][col];
    for (std::size_t j = col; j <= k; ++j) a[row][j] *= inv;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == row || sgn(a[i][col]) == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j <= k; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_row[col] = static_cast<long>(row);
    ++row;
  }
  Rational norm_sq = 0;
  for (std::size_t col = 0; col < k; ++col) {
    if (pivot_row[col] >= 0) norm_sq += a[static_cast<std::size_t>(pivot_row[col])][k] * b[col];
  }
  return 2 * norm_sq;
}

// ---------------------------------------------------------------------------

CheckList bounds_suite() {
  CheckList out;
  auto dominance = [&out](const std::string& name, const PhiProfile& profile, int n, double csq) {
    const Quadrature chi = chi_star_from_profile(profile, n);
    const double upper = chi_star_upper(n, csq);
    const double slack = 1e-9 + chi.error;
    out.push_back({"chi* <= upper bound: " + name, "<= " + format_double(upper), format_double(chi.value), slack,
                   chi.value <= upper + slack, Provenance::PaperClosedForm});
  };
  for (const auto& [n, v] : std::vector<std::pair<int, Rational>>{{1, 1}, {1, Rational(1, 2)}, {2, 2}, {3, Rational(1, 3)}}) {
    PhiProfile p = semicircular_profile(n, v, 1e-6, 1e4, 16);
    dominance("semicircular n=" + std::to_string(n) + " v=" + to_string(v), p, n, n * v.get_d());
  }
  {
    // Z = x + c T with c^2 = 3/4: C^2 = tau(ZZ*) + tau(Z*Z) = 2 (1/3 + 3/8).
    PhiProfile p = dt_profile(Rational(3, 4), 1e-6, 1e4, 16);
    dominance("DT relative to D, c^2=3/4", p, 2, 2.0 * (1.0 / 3.0 + 3.0 / 8.0));
  }

  const std::vector<std::pair<double, double>> pairs = {
      {2, 2}, {kInfinity, 3}, {1, 1e6}, {0.5, 7}, {kInfinity, kInfinity}, {1e-3, 1e3}};
  for (const auto& [x, y] : pairs) {
    const double s = stam_bound(x, y);
    out.push_back({"stam(" + format_double(x) + ", " + format_double(y) + ") <= min", "<= " + format_double(std::min(x, y)),
                   format_double(s), 0.0, s <= std::min(x, y), Provenance::PaperClosedForm});
  }
  for (double alpha : {1.0, 10.0, 100.0}) {
    for (double t : {1.0, 1e-3}) {
      const double s = stam_bound(alpha, 2 / t);
      out.push_back({"stam(" + format_double(alpha) + ", n/t) <= min at t=" + format_double(t),
                     "<= " + format_double(std::min(alpha, 2 / t)), format_double(s), 0.0, s <= std::min(alpha, 2 / t),
                     Provenance::PaperClosedForm});
    }
  }
  for (double alpha : {1.0, 10.0, 100.0}) {
    bool decreasing = true;
    double prev = kInfinity;
    double last = 0;
    for (int k = 0; k <= 10; ++k) {
      last = stam_limit_display(2, alpha, std::pow(10.0, -k));
      decreasing = decreasing && last < prev;
      prev = last;
    }
    const double tol = 1e-8;
    out.push_back({"n t/((n/alpha)+t) -> 0 at alpha=" + format_double(alpha), "0", format_double(last), tol,
                   decreasing && last <= tol, Provenance::PaperClosedForm});
  }
  return out;
}

}  // namespace dtlab::fisher
