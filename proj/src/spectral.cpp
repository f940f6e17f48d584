#include "dtlab/spectral.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtlab::spectral {

namespace {

using ensembles::Role;
using ensembles::Stream;

// Right singular vectors with singular value <= tol * sigma_max * dim
// (plus the directions beyond the row count, which are null by shape).
using Svd = Eigen::JacobiSVD<Matrix>;

Matrix null_space(const Matrix& m, double tol, int dim) {
  Svd svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() ? sv(0) : 0.0;
  const double threshold = tol * sigma_max * dim;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    if (i >= sv.size() || sv(i) <= threshold) keep.push_back(i);
  }
  Matrix out(m.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = svd.matrixV().col(keep[k]);
  return out;
}

// Orthonormal basis of the column span.
Matrix range(const Matrix& m, double tol, int dim) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Svd svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double threshold = tol * (sv.size() ? sv(0) : 0.0) * dim;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > threshold) ++r;
  return svd.matrixU().leftCols(r);
}

int numerical_rank(const Matrix& m, double tol, int dim) { return static_cast<int>(range(m, tol, dim).cols()); }

void check_tol(double tol) {
  if (!(tol > 0) || tol > 1e-4) throw std::invalid_argument("tolerance must lie in (0, 1e-4]");
}

double normalized_trace(const SubspaceBasis& s) {
  if (s.ambient == 0) return 0.0;
  return projection(s).trace().real() / s.ambient;
}

Matrix random_gaussian(int rows, int cols, Stream& rng) {
  Matrix g(rows, cols);
  const double scale = std::sqrt(0.5 / rows);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) g(i, j) = scale * rng.complex_normal();
  }
  return g;
}

Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

SubspaceBasis generalized_eigenspace(const Pencil& p, Complex lambda, double tol) {
  check_tol(tol);
  const auto n = p.A.rows();
  if (p.A.cols() != n || p.B.rows() != n || p.B.cols() != n) {
    throw std::invalid_argument("generalized_eigenspace: A and B must be square of the same size");
  }
  return {static_cast<int>(n), null_space(p.A - lambda * p.B, tol, static_cast<int>(n))};
}

IndependenceReport independence_check(const Pencil& p, const std::vector<Complex>& lambdas, double tol) {
  check_tol(tol);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      if (lambdas[i] == lambdas[j]) throw std::invalid_argument("independence_check: eigenvalues must be distinct");
    }
  }
  const int n = static_cast<int>(p.A.rows());
  if (null_space(p.B, tol, n).cols() > 0) throw std::domain_error("independence_check: ker B is nontrivial");
  IndependenceReport r;
  Matrix all(n, 0);
  for (const auto& lambda : lambdas) {
    const SubspaceBasis e = generalized_eigenspace(p, lambda, tol);
    r.dims.push_back(e.dim());
    r.total_dim += e.dim();
    Matrix next(n, all.cols() + e.columns.cols());
    next << all, e.columns;
    all = std::move(next);
  }
  r.rank = numerical_rank(all, tol, n);
  r.independent = r.rank == r.total_dim;
  return r;
}

Matrix projection(const SubspaceBasis& s) { return s.columns * s.columns.adjoint(); }

MeetJoin projection_meet_join(const SubspaceBasis& p, const SubspaceBasis& q, double tol) {
  check_tol(tol);
  if (p.ambient != q.ambient) throw std::invalid_argument("projection_meet_join: ambient dimensions differ");
  const int n = p.ambient;
  const Matrix id = Matrix::Identity(n, n);
  Matrix stacked(2 * n, n);
  stacked << id - projection(p), id - projection(q);
  Matrix both(n, p.columns.cols() + q.columns.cols());
  both << p.columns, q.columns;
  return {{n, null_space(stacked, tol, n)}, {n, range(both, tol, n)}};
}

TracePair kaplansky_check(const SubspaceBasis& p, const SubspaceBasis& q, double tol) {
  const MeetJoin mj = projection_meet_join(p, q, tol);
  return {normalized_trace(mj.join), normalized_trace(p) + normalized_trace(q) - normalized_trace(mj.meet)};
}

TracePair eigenprojection_additivity(const Pencil& p, const std::vector<Complex>& lambdas, double tol) {
  const int n = static_cast<int>(p.A.rows());
  Matrix all(n, 0);
  double sum = 0.0;
  for (const auto& lambda : lambdas) {
    const SubspaceBasis e = generalized_eigenspace(p, lambda, tol);
    sum += normalized_trace(e);
    Matrix next(n, all.cols() + e.columns.cols());
    next << all, e.columns;
    all = std::move(next);
  }
  return {normalized_trace(SubspaceBasis{n, range(all, tol, n)}), sum};
}

Pencil constructed_pencil(int dim, const std::vector<Complex>& values, const std::vector<int>& multiplicities,
                          std::uint64_t seed) {
  if (values.size() != multiplicities.size()) throw std::invalid_argument("constructed_pencil: one multiplicity per value");
  int used = 0;
  for (int m : multiplicities) {
    if (m < 1) throw std::invalid_argument("constructed_pencil: multiplicities must be positive");
    used += m;
  }
  if (used > dim) throw std::invalid_argument("constructed_pencil: multiplicities exceed the dimension");
  Stream rng(seed, 0, Role::Ginibre);
  const Matrix id = Matrix::Identity(dim, dim);
  const Matrix b = 2.0 * id + random_gaussian(dim, dim, rng);
  const Matrix v = 2.0 * id + random_gaussian(dim, dim, rng);
  Eigen::VectorXcd diag(dim);
  int k = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (int m = 0; m < multiplicities[i]; ++m) diag(k++) = values[i];
  }
  for (int filler = 0; k < dim; ++filler) diag(k++) = Complex(100.0 + filler, 1.0);
  const Matrix a = b * v * diag.asDiagonal() * v.partialPivLu().inverse();
  return {a, b};
}

std::pair<SubspaceBasis, SubspaceBasis> random_projection_pair(int dim, std::uint64_t seed) {
  Stream rng(seed, 0, Role::Ginibre);
  const int common = 1 + static_cast<int>(rng.next_u64() % 3);
  const int extra_p = 1 + static_cast<int>(rng.next_u64() % 4);
  const int extra_q = 1 + static_cast<int>(rng.next_u64() % 4);
  if (common + extra_p + extra_q > dim) throw std::invalid_argument("random_projection_pair: dimension too small");
  const Matrix c = orthonormalize(random_gaussian(dim, common, rng));
  Matrix p(dim, common + extra_p), q(dim, common + extra_q);
  p << c, random_gaussian(dim, extra_p, rng);
  q << c, random_gaussian(dim, extra_q, rng);
  return {{dim, orthonormalize(p)}, {dim, orthonormalize(q)}};
}

std::vector<PointSpectrumRow> point_spectrum_diagnostic(const ensembles::EnsembleSpec& spec,
                                                        const std::vector<Complex>& gammas, const std::vector<int>& ns,
                                                        int reps, Schedule schedule) {
  if (reps < 1) throw std::invalid_argument("point_spectrum_diagnostic: reps must be at least 1");
  std::vector<PointSpectrumRow> out;
  for (int n : ns) {
    ensembles::EnsembleSpec s = spec;
    s.n = n;
    struct Rep {
      std::vector<double> smallest;
      double norm = 0.0;
    };
    const auto results = run_replicates(reps, schedule, [&](int r) {
      const Matrix z = ensembles::sample_dt(s, static_cast<std::uint64_t>(r));
      Rep rep;
      rep.norm = Eigen::BDCSVD<Matrix>(z).singularValues()(0);
      for (const auto& gamma : gammas) {
        const Matrix shifted = gamma * Matrix::Identity(n, n) - z;
        const auto sv = Eigen::BDCSVD<Matrix>(shifted).singularValues();
        rep.smallest.push_back(sv(sv.size() - 1));
      }
      return rep;
    });
    double max_norm = 0.0;
    for (const auto& r : results) max_norm = std::max(max_norm, r.norm);
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      PointSpectrumRow row;
      row.gamma = gammas[g];
      row.n = n;
      for (const auto& r : results) row.smallest.push_back(r.smallest[g]);
      std::vector<double> sorted = row.smallest;
      std::sort(sorted.begin(), sorted.end());
      row.min = sorted.front();
      row.max = sorted.back();
      row.q1 = quantile(sorted, 0.25);
      row.median = quantile(sorted, 0.5);
      row.q3 = quantile(sorted, 0.75);
      row.norm_bound = std::abs(gammas[g]) - max_norm;
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace dtlab::spectral
