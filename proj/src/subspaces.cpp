#include "gcnalign/subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gcnalign {
namespace {

constexpr double kOrthonormalTolerance = 1e-10;

void check_dims(Index k, Index n) {
  if (k < 1) throw std::invalid_argument("subspace dimension must be at least 1");
  if (k >= n) {
    throw std::invalid_argument("subspace dimension " + std::to_string(k) + " must be below ambient dimension " +
                                std::to_string(n));
  }
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Chordal: return "chordal";
    case Metric::Grassmann: return "grassmann";
    case Metric::Projection: return "projection";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "chordal") return Metric::Chordal;
  if (name == "grassmann") return Metric::Grassmann;
  if (name == "projection") return Metric::Projection;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

OrthonormalBasis OrthonormalBasis::from_orthonormal(Eigen::MatrixXd columns) {
  check_dims(columns.cols(), columns.rows());
  const Eigen::MatrixXd gram = columns.transpose() * columns;
  const double err = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (err > kOrthonormalTolerance) {
    throw std::invalid_argument("columns are not orthonormal (max deviation " + std::to_string(err) + ")");
  }
  return OrthonormalBasis(std::move(columns));
}

OrthonormalBasis OrthonormalBasis::from_span(const Eigen::MatrixXd& a) {
  check_dims(a.cols(), a.rows());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  if (r.diagonal().cwiseAbs().minCoeff() <= 1e-12 * scale) {
    throw std::invalid_argument("matrix is column rank deficient");
  }
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return OrthonormalBasis(std::move(q));
}

Eigen::MatrixXd normalized_adjacency(const SparseMatrix& adjacency) {
  return Eigen::MatrixXd(normalized_adjacency_sparse(adjacency));
}

SparseMatrix normalized_adjacency_sparse(const SparseMatrix& adjacency) {
  const Index n = adjacency.rows();
  Eigen::VectorXd inv_sqrt_degree(n);
  for (Index j = 0; j < n; ++j) {
    double degree = 1.0;
    for (SparseMatrix::InnerIterator it(adjacency, j); it; ++it) degree += it.value();
    inv_sqrt_degree(j) = 1.0 / std::sqrt(degree);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(adjacency.nonZeros() + n));
  for (Index j = 0; j < n; ++j) {
    triplets.emplace_back(j, j, inv_sqrt_degree(j) * inv_sqrt_degree(j));
    for (SparseMatrix::InnerIterator it(adjacency, j); it; ++it) {
      if (it.row() != j) triplets.emplace_back(it.row(), j, it.value() * inv_sqrt_degree(it.row()) * inv_sqrt_degree(j));
    }
  }
  SparseMatrix a_hat(n, n);
  a_hat.setFromTriplets(triplets.begin(), triplets.end());
  return a_hat;
}

void fix_signs(Eigen::MatrixXd& columns) {
  for (Index j = 0; j < columns.cols(); ++j) {
    Index arg = 0;
    columns.col(j).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, j) < 0.0) columns.col(j) *= -1.0;
  }
}

OrthonormalBasis SymmetricSpectrum::leading(Index k) const {
  check_dims(k, eigenvectors.rows());
  return OrthonormalBasis(eigenvectors.leftCols(k));
}

OrthonormalBasis LeftSingularSubspace::leading(Index k) const {
  check_dims(k, vectors.rows());
  if (k > vectors.cols()) {
    throw std::invalid_argument("subspace dimension " + std::to_string(k) + " exceeds column count " +
                                std::to_string(vectors.cols()));
  }
  return OrthonormalBasis(vectors.leftCols(k));
}

SymmetricSpectrum symmetric_spectrum(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition did not converge");
  const Eigen::VectorXd& values = solver.eigenvalues();
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });

  SymmetricSpectrum out;
  out.eigenvalues.resize(values.size());
  out.eigenvectors.resize(symmetric.rows(), values.size());
  for (Index i = 0; i < values.size(); ++i) {
    out.eigenvalues(i) = values(order[i]);
    out.eigenvectors.col(i) = solver.eigenvectors().col(order[i]);
  }
  fix_signs(out.eigenvectors);
  return out;
}

LeftSingularSubspace left_singular_subspace(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  LeftSingularSubspace out{svd.singularValues(), svd.matrixU()};
  fix_signs(out.vectors);
  return out;
}

OrthonormalBasis graph_basis(const Eigen::MatrixXd& a_hat, Index k) {
  check_dims(k, a_hat.rows());
  return symmetric_spectrum(a_hat).leading(k);
}

OrthonormalBasis feature_basis(const Eigen::MatrixXd& x, Index k) {
  check_dims(k, x.rows());
  if (k > x.cols()) {
    throw std::invalid_argument("subspace dimension " + std::to_string(k) + " exceeds column count " +
                                std::to_string(x.cols()));
  }
  return left_singular_subspace(x).leading(k);
}

OrthonormalBasis groundtruth_basis(const Eigen::MatrixXd& y, Index k) { return feature_basis(y, k); }

PrincipalAngles principal_angles(const OrthonormalBasis& b1, const OrthonormalBasis& b2) {
  if (b1.ambient_dim() != b2.ambient_dim()) {
    throw std::invalid_argument("principal angles need bases in the same ambient space");
  }
  const bool first_larger = b1.dim() >= b2.dim();
  const Eigen::MatrixXd& qa = first_larger ? b1.columns() : b2.columns();
  const Eigen::MatrixXd& qb = first_larger ? b2.columns() : b1.columns();
  const Index k = qb.cols();

  const Eigen::MatrixXd cross = qa.transpose() * qb;
  const Eigen::VectorXd cosines = singular_values(cross);  // decreasing
  // Cosines lose precision for small angles, so those are taken from the
  // singular values of the component of qb orthogonal to span(qa).
  Eigen::VectorXd sines;
  if (cosines.size() > 0 && cosines(0) * cosines(0) >= 0.5) {
    sines = singular_values(qb - qa * cross);  // decreasing
  }

  PrincipalAngles out;
  out.radians.resize(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    const double c = std::clamp(cosines(j), 0.0, 1.0);
    if (c * c >= 0.5) {
      out.radians[j] = std::asin(std::clamp(sines(k - 1 - j), 0.0, 1.0));
    } else {
      out.radians[j] = std::acos(c);
    }
  }
  std::sort(out.radians.begin(), out.radians.end());
  return out;
}

double subspace_distance(const PrincipalAngles& angles, Metric metric) {
  if (angles.radians.empty()) return 0.0;
  switch (metric) {
    case Metric::Chordal: {
      double sum = 0.0;
      for (double t : angles.radians) sum += std::sin(t) * std::sin(t);
      return std::sqrt(sum);
    }
    case Metric::Grassmann: {
      double sum = 0.0;
      for (double t : angles.radians) sum += t * t;
      return std::sqrt(sum);
    }
    case Metric::Projection:
      return std::sin(angles.radians.back());
  }
  return 0.0;
}

DistanceMatrix3 distance_matrix(const OrthonormalBasis& basis_x, const OrthonormalBasis& basis_a,
                                const OrthonormalBasis& basis_y, Metric metric) {
  const double xa = subspace_distance(principal_angles(basis_x, basis_a), metric);
  const double xy = subspace_distance(principal_angles(basis_x, basis_y), metric);
  const double ay = subspace_distance(principal_angles(basis_a, basis_y), metric);
  DistanceMatrix3 d;
  d.values << 0.0, xa, xy,
              xa, 0.0, ay,
              xy, ay, 0.0;
  return d;
}

double sam(const DistanceMatrix3& d) { return d.values.norm(); }

}  // namespace gcnalign
