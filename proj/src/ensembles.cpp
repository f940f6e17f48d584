#include "dtlab/ensembles.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dtlab::ensembles {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Complex parse_complex(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty atom value");
  const char* p = s.c_str();
  char* end = nullptr;
  double re = 0.0, im = 0.0;
  if (s.back() != 'i') {
    re = std::strtod(p, &end);
    if (end != p + s.size()) throw std::invalid_argument("bad atom value '" + s + "'");
    return {re, 0.0};
  }
  // a+bi, a-bi, bi, i
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size() - 1; k > 0; --k) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re_text = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_text = s.substr(split == std::string::npos ? 0 : split, s.size() - (split == std::string::npos ? 0 : split) - 1);
  if (im_text.empty() || im_text == "+") im_text = "1";
  if (im_text == "-") im_text = "-1";
  if (!re_text.empty()) {
    re = std::strtod(re_text.c_str(), &end);
    if (*end) throw std::invalid_argument("bad atom value '" + s + "'");
  }
  im = std::strtod(im_text.c_str(), &end);
  if (*end) throw std::invalid_argument("bad atom value '" + s + "'");
  return {re, im};
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i";
}

double largest_singular_value(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t replicate, Role role)
    : key_(mix64(mix64(seed ^ (static_cast<std::uint64_t>(role) * 0xD1B54A32D192ED03ULL)) + replicate)) {}

std::uint64_t Stream::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double Stream::uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

Complex Stream::complex_normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

// ---------------------------------------------------------------------------

MeasureSpec MeasureSpec::delta(Complex a) { return atomic({Atom{a, Rational(1)}}); }

MeasureSpec MeasureSpec::atomic(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("atomic measure needs at least one atom");
  Rational total = 0;
  for (const auto& a : atoms) {
    if (sgn(a.weight) <= 0) throw std::invalid_argument("atom weights must be positive");
    total += a.weight;
  }
  if (total != 1) throw std::invalid_argument("atom weights must sum to 1, got " + to_string(total));
  MeasureSpec m;
  m.kind = Kind::Atomic;
  m.atoms = std::move(atoms);
  return m;
}

MeasureSpec MeasureSpec::pushforward(PiecewisePoly f) {
  MeasureSpec m;
  m.kind = Kind::Pushforward;
  m.f = std::move(f);
  return m;
}

bool MeasureSpec::is_real() const {
  if (kind == Kind::Pushforward) return true;
  return std::all_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.value.imag() == 0.0; });
}

std::string MeasureSpec::to_text() const {
  if (kind == Kind::Pushforward) return "pushforward:" + f.to_text();
  if (atoms.size() == 1) return "delta:" + format_complex(atoms[0].value);
  std::string out = "atomic:";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ',';
    out += format_complex(atoms[i].value) + "@" + to_string(atoms[i].weight);
  }
  return out;
}

MeasureSpec MeasureSpec::from_text(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (kind.starts_with("delta")) {
    // "delta:a" or the shorthand "delta0", "delta1"
    std::string_view value = colon == std::string_view::npos ? kind.substr(5) : body;
    if (value.empty()) throw std::invalid_argument("delta measure needs a value");
    return delta(parse_complex(value));
  }
  if (kind == "atomic") {
    std::vector<Atom> atoms;
    std::string_view rest = body;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto at = item.find('@');
      if (at == std::string_view::npos) throw std::invalid_argument("atoms must look like value@weight");
      atoms.push_back({parse_complex(item.substr(0, at)), parse_rational(item.substr(at + 1))});
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return atomic(std::move(atoms));
  }
  if (kind == "pushforward") return pushforward(PiecewisePoly::from_text(body));
  throw std::invalid_argument("unknown measure '" + std::string(text) + "' (delta:, atomic:, pushforward:)");
}

// ---------------------------------------------------------------------------

Vector sample_diagonal(const MeasureSpec& mu, int n, Stream& rng) {
  Vector d(n);
  if (mu.kind == MeasureSpec::Kind::Pushforward) {
    for (int i = 0; i < n; ++i) d(i) = mu.f.eval(rng.uniform());
    return d;
  }
  if (mu.atoms.size() == 1) {
    d.setConstant(mu.atoms[0].value);
    return d;
  }
  std::vector<double> cumulative;
  Rational acc = 0;
  for (const auto& a : mu.atoms) {
    acc += a.weight;
    cumulative.push_back(acc.get_d());
  }
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
    d(i) = mu.atoms[k].value;
  }
  return d;
}

Matrix sample_strict_upper(int n, Stream& rng) {
  Matrix t = Matrix::Zero(n, n);
  const double scale = std::sqrt(1.0 / (2.0 * n));
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) t(i, j) = scale * rng.complex_normal();
  }
  return t;
}

Matrix sample_dt(const EnsembleSpec& spec, std::uint64_t replicate) {
  if (spec.n < 1) throw std::invalid_argument("matrix dimension must be positive");
  if (spec.c < 0) throw std::invalid_argument("c must be non-negative");
  Stream diag_rng(spec.seed, replicate, Role::Diagonal);
  Matrix z = Matrix::Zero(spec.n, spec.n);
  if (spec.c != 0.0) {
    Stream upper_rng(spec.seed, replicate, Role::Upper1);
    z = spec.c * sample_strict_upper(spec.n, upper_rng);
  }
  z.diagonal() += sample_diagonal(spec.mu, spec.n, diag_rng);
  return z;
}

Matrix sample_ginibre_circular(int n, Stream& rng) {
  Matrix y(n, n);
  const double scale = std::sqrt(1.0 / (2.0 * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) y(i, j) = scale * rng.complex_normal();
  }
  return y;
}

// ---------------------------------------------------------------------------

namespace {

void parse_sequence(std::string_view text, std::size_t& pos, char letter, std::vector<int>& out, int depth);

int parse_power(std::string_view text, std::size_t& pos) {
  if (pos >= text.size() || text[pos] != '^') return 1;
  ++pos;
  const std::size_t start = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (start == pos) throw std::invalid_argument("expected an exponent after '^'");
  return std::atoi(std::string(text.substr(start, pos - start)).c_str());
}

void parse_sequence(std::string_view text, std::size_t& pos, char letter, std::vector<int>& out, int depth) {
  while (pos < text.size()) {
    const char ch = text[pos];
    if (ch == ' ') {
      ++pos;
    } else if (ch == '(') {
      ++pos;
      std::vector<int> inner;
      parse_sequence(text, pos, letter, inner, depth + 1);
      if (pos >= text.size() || text[pos] != ')') throw std::invalid_argument("unbalanced parentheses in word");
      ++pos;
      const int power = parse_power(text, pos);
      for (int k = 0; k < power; ++k) out.insert(out.end(), inner.begin(), inner.end());
    } else if (ch == ')') {
      if (depth == 0) throw std::invalid_argument("unbalanced parentheses in word");
      return;
    } else if (ch == letter) {
      ++pos;
      int l = 0;
      if (pos < text.size() && text[pos] == '*') {
        l = 1;
        ++pos;
      }
      const int power = parse_power(text, pos);
      for (int k = 0; k < power; ++k) out.push_back(l);
    } else {
      throw std::invalid_argument(std::string("unexpected character '") + ch + "' in word; letters are " + letter +
                                  " and " + letter + "*");
    }
  }
}

}  // namespace

std::vector<int> parse_star_word(std::string_view text, char letter) {
  std::vector<int> out;
  if (text == "1") return out;
  std::size_t pos = 0;
  parse_sequence(text, pos, letter, out, 0);
  return out;
}

std::string format_star_word(const std::vector<int>& word, char letter) {
  if (word.empty()) return "1";
  std::string out;
  for (int l : word) {
    out += letter;
    if (l == 1) out += '*';
  }
  return out;
}

Complex normalized_trace(const std::vector<const Matrix*>& factors, const std::vector<bool>& adjoint) {
  const std::size_t k = factors.size();
  if (k == 0) return 1.0;
  const double n = static_cast<double>(factors[0]->rows());
  if (k == 1) {
    const Complex tr = factors[0]->trace();
    return (adjoint[0] ? std::conj(tr) : tr) / n;
  }
  Matrix p = adjoint[0] ? Matrix(factors[0]->adjoint()) : *factors[0];
  for (std::size_t i = 1; i + 1 < k; ++i) {
    if (adjoint[i]) {
      p = p * factors[i]->adjoint();
    } else {
      p = p * (*factors[i]);
    }
  }
  const Matrix& last = *factors[k - 1];
  const Complex tr = adjoint[k - 1] ? p.cwiseProduct(last.conjugate()).sum() : p.cwiseProduct(last.transpose()).sum();
  return tr / n;
}

Complex normalized_word_trace(const Matrix& z, const std::vector<int>& word) {
  std::vector<const Matrix*> factors(word.size(), &z);
  std::vector<bool> adjoint(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) adjoint[i] = word[i] == 1;
  return normalized_trace(factors, adjoint);
}

MomentEstimate summarize(std::string word, const std::vector<double>& values, int n, std::uint64_t seed) {
  MomentEstimate e;
  e.word = std::move(word);
  e.reps = static_cast<int>(values.size());
  e.n = n;
  e.seed = seed;
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

std::vector<double> replicate_word_traces(const EnsembleSpec& spec, const std::vector<int>& word, int reps,
                                          Schedule schedule) {
  return run_replicates(reps, schedule, [&](int r) {
    const Matrix z = sample_dt(spec, static_cast<std::uint64_t>(r));
    return normalized_word_trace(z, word).real();
  });
}

MomentEstimate estimate_star_moment(const EnsembleSpec& spec, const std::vector<int>& word, int reps,
                                    Schedule schedule) {
  if (reps < 2) throw std::invalid_argument("estimate_star_moment: reps must be at least 2");
  if (word.empty() || word.size() > 12) throw std::invalid_argument("estimate_star_moment: word length must be in [1, 12]");
  return summarize(format_star_word(word), replicate_word_traces(spec, word, reps, schedule), spec.n, spec.seed);
}

MomentEstimate norm_estimate(const EnsembleSpec& spec, int reps, Schedule schedule) {
  if (reps < 1) throw std::invalid_argument("norm_estimate: reps must be at least 1");
  const auto values = run_replicates(reps, schedule, [&](int r) {
    return largest_singular_value(sample_dt(spec, static_cast<std::uint64_t>(r)));
  });
  return summarize("norm", values, spec.n, spec.seed);
}

CutoutReport cutout_residual(const EnsembleSpec& spec, int k_blocks, int reps, Schedule schedule) {
  const int n = spec.n;
  if (k_blocks < 1 || n % k_blocks != 0) throw std::invalid_argument("cutout_residual: k must divide n");
  if (reps < 1) throw std::invalid_argument("cutout_residual: reps must be at least 1");
  const int m = n / k_blocks;
  struct Rep {
    double block_norm = 0.0;
    double lower = 0.0;
  };
  const auto results = run_replicates(reps, schedule, [&](int r) {
    const auto rep = static_cast<std::uint64_t>(r);
    Stream upper1(spec.seed, rep, Role::Upper1);
    Stream upper2(spec.seed, rep, Role::Upper2);
    Stream diag(spec.seed, rep, Role::Diagonal);
    const Matrix t1 = sample_strict_upper(n, upper1);
    Rep out;
    for (int b = 0; b < k_blocks; ++b) {
      out.block_norm = std::max(out.block_norm, largest_singular_value(t1.block(b * m, b * m, m, m)));
    }
    Vector d = sample_diagonal(spec.mu, n, diag);
    if (spec.mu.is_real()) {
      std::sort(d.data(), d.data() + n, [](const Complex& a, const Complex& b) { return a.real() < b.real(); });
    }
    Matrix z = spec.c * t1;
    z.diagonal() += d;
    const Matrix a = z.adjoint();
    const Matrix b = sample_strict_upper(n, upper2).adjoint();
    const Matrix comm = a * b - b * a;
    double ss = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i / m < j / m) ss += std::norm(comm(i, j));
      }
    }
    out.lower = std::sqrt(ss);
    return out;
  });
  CutoutReport report;
  report.k = k_blocks;
  report.reference = std::sqrt(std::numbers::e / k_blocks);
  report.bound = 2.0 * report.reference;
  report.within_bound = true;
  for (const auto& r : results) {
    report.block_norms.push_back(r.block_norm);
    report.lower_residual = std::max(report.lower_residual, r.lower);
    if (!(r.block_norm <= report.bound)) report.within_bound = false;
  }
  return report;
}

std::vector<MomentEstimate> liberation_mc(const EnsembleSpec& spec, double t, const std::vector<std::vector<int>>& words,
                                          const std::vector<int>& ns, int reps, Schedule schedule) {
  if (!(t > 0)) throw std::invalid_argument("liberation_mc: t must be positive");
  if (reps < 2) throw std::invalid_argument("liberation_mc: reps must be at least 2");
  const double alpha = std::sqrt(t / (spec.c * spec.c + t));
  const double beta = 1.0 / alpha;
  const double inv_sqrt_t = 1.0 / std::sqrt(t);
  std::vector<MomentEstimate> out;
  for (int n : ns) {
    if (n < 1) throw std::invalid_argument("liberation_mc: dimensions must be positive");
    const auto per_rep = run_replicates(reps, schedule, [&](int r) {
      const auto rep = static_cast<std::uint64_t>(r);
      Stream diag(spec.seed, rep, Role::Diagonal);
      Stream upper1(spec.seed, rep, Role::Upper1);
      Stream upper2(spec.seed, rep, Role::Upper2);
      const Vector d = sample_diagonal(spec.mu, n, diag);
      const Matrix t1 = sample_strict_upper(n, upper1);
      const Matrix t2 = sample_strict_upper(n, upper2);
      Matrix s = beta * t1 + t2.adjoint();
      s.diagonal() += inv_sqrt_t * d;
      const Matrix xi = alpha * t1.adjoint() + t2;
      const Matrix s_star = s.adjoint();
      const Matrix xi_star = xi.adjoint();
      const Matrix j = xi * s - s * xi + xi_star * s_star - s_star * xi_star;
      std::vector<double> values;
      values.reserve(words.size());
      for (const auto& w : words) {
        if (w.empty()) {
          Complex acc = 0.0;
          for (int col = 0; col < n; ++col) {
            for (int row = 0; row < n; ++row) {
              acc += xi(row, col) * s(col, row) - s(col, row) * xi(row, col);
              acc += xi_star(row, col) * s_star(col, row) - s_star(col, row) * xi_star(row, col);
            }
          }
          values.push_back(acc.real() / n);
          continue;
        }
        std::vector<const Matrix*> factors{&j};
        std::vector<bool> adjoint{false};
        for (int l : w) {
          factors.push_back(&s);
          adjoint.push_back(l == 1);
        }
        values.push_back(normalized_trace(factors, adjoint).real());
      }
      return values;
    });
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      std::vector<double> column;
      column.reserve(per_rep.size());
      for (const auto& v : per_rep) column.push_back(v[wi]);
      out.push_back(summarize(format_star_word(words[wi], 'S'), column, n, spec.seed));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_matrix(std::ostream& os, const Matrix& m) {
  os << "dtlab-matrix " << m.rows() << ' ' << m.cols() << " complex128 colmajor\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double parts[2] = {m(i, j).real(), m(i, j).imag()};
      os.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
  }
}

Matrix read_matrix(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("read_matrix: missing header");
  std::istringstream hs(header);
  std::string magic, dtype, order;
  long rows = -1, cols = -1;
  hs >> magic >> rows >> cols >> dtype >> order;
  if (magic != "dtlab-matrix" || dtype != "complex128" || order != "colmajor" || rows < 0 || cols < 0) {
    throw std::invalid_argument("read_matrix: unrecognized header '" + header + "'");
  }
  Matrix m(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      double parts[2];
      if (!is.read(reinterpret_cast<char*>(parts), sizeof parts)) throw std::invalid_argument("read_matrix: truncated data");
      m(i, j) = Complex(parts[0], parts[1]);
    }
  }
  return m;
}

void write_estimates_csv(std::ostream& os, const std::vector<MomentEstimate>& rows) {
  os << "word,mean,stderr,reps,n,seed\n";
  for (const auto& r : rows) {
    os << r.word << ',' << fmt(r.mean) << ',' << fmt(r.std_error) << ',' << r.reps << ',' << r.n << ',' << r.seed << '\n';
  }
}

}  // namespace dtlab::ensembles
