#pragma once

// Finite-n matrix models Z_n = D_n + c T_n and Monte Carlo estimators.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dtlab/parallel.hpp"
#include "dtlab/piecewise_poly.hpp"
#include "dtlab/rational.hpp"

namespace dtlab::ensembles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Role : std::uint64_t { Diagonal = 1, Upper1 = 2, Upper2 = 3, Ginibre = 4 };

std::uint64_t mix64(std::uint64_t x);

/// Counter-based stream keyed by (master seed, replicate, role). Draws do
/// not depend on which thread or in which order replicates run.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replicate, Role role);
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Real and imaginary parts independent standard normals (Box-Muller).
  Complex complex_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct Atom {
  Complex value;
  Rational weight;
};

struct MeasureSpec {
  enum class Kind { Atomic, Pushforward };
  Kind kind = Kind::Atomic;
  std::vector<Atom> atoms;
  PiecewisePoly f;

  static MeasureSpec delta(Complex a);
  /// Weights must be positive and sum to exactly 1.
  static MeasureSpec atomic(std::vector<Atom> atoms);
  static MeasureSpec pushforward(PiecewisePoly f);

  bool is_real() const;
  /// "delta:a", "atomic:a@w,b@v" (a, b real or re+imi), "pushforward:{...}".
  std::string to_text() const;
  static MeasureSpec from_text(std::string_view text);
};

struct EnsembleSpec {
  MeasureSpec mu;
  double c = 1.0;
  int n = 1;
  std::uint64_t seed = 0;
};

struct MomentEstimate {
  std::string word;
  double mean = 0.0;
  double std_error = 0.0;
  int reps = 0;
  int n = 0;
  std::uint64_t seed = 0;
};

Vector sample_diagonal(const MeasureSpec& mu, int n, Stream& rng);
/// Entries on and below the diagonal are exactly zero; above it, real and
/// imaginary parts are N(0, 1/(2n)), so E|entry|^2 = 1/n.
Matrix sample_strict_upper(int n, Stream& rng);
/// D_n + c T_n for one replicate of the spec.
Matrix sample_dt(const EnsembleSpec& spec, std::uint64_t replicate);
/// All entries complex Gaussian with E|entry|^2 = 1/n.
Matrix sample_ginibre_circular(int n, Stream& rng);

/// Parses words such as "ZZ*", "Z Z* Z", "(ZZ*)^2". Letter 0 is the plain
/// letter, 1 its adjoint; every letter must be `letter`.
std::vector<int> parse_star_word(std::string_view text, char letter = 'Z');
std::string format_star_word(const std::vector<int>& word, char letter = 'Z');

/// Normalized trace of the product of the matrices, taking adjoints where
/// flagged. Uses k-2 products and an O(n^2) final trace.
Complex normalized_trace(const std::vector<const Matrix*>& factors, const std::vector<bool>& adjoint);
Complex normalized_word_trace(const Matrix& z, const std::vector<int>& word);

/// Mean and standard error of the values, reduced in index order.
MomentEstimate summarize(std::string word, const std::vector<double>& values, int n, std::uint64_t seed);

std::vector<double> replicate_word_traces(const EnsembleSpec& spec, const std::vector<int>& word, int reps,
                                          Schedule schedule = Schedule::Auto);
MomentEstimate estimate_star_moment(const EnsembleSpec& spec, const std::vector<int>& word, int reps,
                                    Schedule schedule = Schedule::Auto);

/// Largest singular value of D_n + c T_n; reps == 1 gives std_error 0.
MomentEstimate norm_estimate(const EnsembleSpec& spec, int reps, Schedule schedule = Schedule::Auto);

struct CutoutReport {
  int k = 0;
  std::vector<double> block_norms;  // per replicate, || sum_i p_i T p_i ||
  double reference = 0.0;           // sqrt(e/k)
  double bound = 0.0;               // 2 sqrt(e/k)
  double lower_residual = 0.0;      // max over replicates of the block-upper part of [(D+cT1)*, T2*]
  bool within_bound = false;
};

CutoutReport cutout_residual(const EnsembleSpec& spec, int k_blocks, int reps, Schedule schedule = Schedule::Auto);

/// tr_n(j_t w(S_t)) per word and n, j_t = [xi,S]+[xi*,S*] built from
/// independent T1, T2 samples and D from spec.mu (spec.n is ignored).
/// Empty words are evaluated as a paired commutator sum, exactly 0.
std::vector<MomentEstimate> liberation_mc(const EnsembleSpec& spec, double t, const std::vector<std::vector<int>>& words,
                                          const std::vector<int>& ns, int reps, Schedule schedule = Schedule::Auto);

/// One header line "dtlab-matrix <rows> <cols> complex128 colmajor", then
/// interleaved (re, im) little-endian doubles in column-major order.
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

void write_estimates_csv(std::ostream& os, const std::vector<MomentEstimate>& rows);

}  // namespace dtlab::ensembles
