#pragma once

// Generalized eigenspaces of pencils, their independence, the projection
// lattice with Kaplansky's trace identity, and point-spectrum diagnostics.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "dtlab/ensembles.hpp"

namespace dtlab::spectral {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-10;

struct Pencil {
  Matrix A;
  Matrix B;
};

struct SubspaceBasis {
  int ambient = 0;
  Matrix columns;  // ambient x dim, orthonormal
  int dim() const { return static_cast<int>(columns.cols()); }
};

/// Numerical null space of A - lambda B: right singular vectors whose
/// singular value is at most tol * sigma_max * dim.
SubspaceBasis generalized_eigenspace(const Pencil& p, Complex lambda, double tol = kDefaultTol);

struct IndependenceReport {
  bool independent = false;
  std::vector<int> dims;
  int total_dim = 0;
  int rank = 0;
};

/// Throws std::invalid_argument on repeated lambdas and std::domain_error
/// when B has a numerically nontrivial kernel.
IndependenceReport independence_check(const Pencil& p, const std::vector<Complex>& lambdas, double tol = kDefaultTol);

struct MeetJoin {
  SubspaceBasis meet;
  SubspaceBasis join;
};

MeetJoin projection_meet_join(const SubspaceBasis& p, const SubspaceBasis& q, double tol = kDefaultTol);

/// Orthogonal projection onto the span.
Matrix projection(const SubspaceBasis& s);

struct TracePair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// tau(p v q) against tau(p) + tau(q) - tau(p ^ q), tau the normalized trace.
TracePair kaplansky_check(const SubspaceBasis& p, const SubspaceBasis& q, double tol = kDefaultTol);

/// tau of the join of the eigenprojections against the sum of their traces.
TracePair eigenprojection_additivity(const Pencil& p, const std::vector<Complex>& lambdas, double tol = kDefaultTol);

/// A = B V diag(values) V^{-1} with random invertible B, V. Eigenvalue
/// values[i] is repeated multiplicities[i] times; the remaining diagonal is
/// filled with values far from the listed ones.
Pencil constructed_pencil(int dim, const std::vector<Complex>& values, const std::vector<int>& multiplicities,
                          std::uint64_t seed);

/// Two random subspaces of C^dim sharing a common subspace.
std::pair<SubspaceBasis, SubspaceBasis> random_projection_pair(int dim, std::uint64_t seed);

struct PointSpectrumRow {
  Complex gamma;
  int n = 0;
  std::vector<double> smallest;  // per replicate
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double norm_bound = 0.0;  // |gamma| - max ||Z_n|| over replicates
};

/// Smallest singular value of gamma I - Z_n per replicate. Finite matrices
/// always have eigenvalues, so this is a trend statistic, not a test of an
/// empty point spectrum.
std::vector<PointSpectrumRow> point_spectrum_diagnostic(const ensembles::EnsembleSpec& spec,
                                                        const std::vector<Complex>& gammas, const std::vector<int>& ns,
                                                        int reps, Schedule schedule = Schedule::Auto);

}  // namespace dtlab::spectral
