#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gcnalign/dataset.hpp"

namespace gcnalign {

enum class Metric { Chordal, Grassmann, Projection };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

/// k orthonormal columns spanning a proper subspace of R^n (k < n).
class OrthonormalBasis {
 public:
  /// Takes columns that are already orthonormal (checked to 1e-10).
  static OrthonormalBasis from_orthonormal(Eigen::MatrixXd columns);
  /// Orthonormalises the column space of `a` with a thin QR factorisation.
  /// `a` must have full column rank.
  static OrthonormalBasis from_span(const Eigen::MatrixXd& a);

  Index ambient_dim() const { return columns_.rows(); }
  Index dim() const { return columns_.cols(); }
  const Eigen::MatrixXd& columns() const { return columns_; }

 private:
  friend struct SymmetricSpectrum;
  friend struct LeftSingularSubspace;
  explicit OrthonormalBasis(Eigen::MatrixXd columns) : columns_(std::move(columns)) {}
  Eigen::MatrixXd columns_;
};

/// Angles in radians, nondecreasing, each in [0, pi/2].
struct PrincipalAngles {
  std::vector<double> radians;
};

/// Rows and columns indexed (X, A, Y); symmetric with zero diagonal.
struct DistanceMatrix3 {
  Eigen::Matrix3d values = Eigen::Matrix3d::Zero();

  double xa() const { return values(0, 1); }
  double xy() const { return values(0, 2); }
  double ay() const { return values(1, 2); }
};

/// D^{-1/2} (A + I) D^{-1/2} with D the degrees of A + I.
Eigen::MatrixXd normalized_adjacency(const SparseMatrix& adjacency);
SparseMatrix normalized_adjacency_sparse(const SparseMatrix& adjacency);

/// Full eigendecomposition of a symmetric matrix, eigenpairs ordered by
/// algebraically decreasing eigenvalue (ties keep solver order).
struct SymmetricSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  OrthonormalBasis leading(Index k) const;
};

/// Thin SVD left factor, ordered by decreasing singular value.
struct LeftSingularSubspace {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd vectors;

  OrthonormalBasis leading(Index k) const;
};

SymmetricSpectrum symmetric_spectrum(const Eigen::MatrixXd& symmetric);
LeftSingularSubspace left_singular_subspace(const Eigen::MatrixXd& m);

/// Leading k eigenvectors of the normalized adjacency.
OrthonormalBasis graph_basis(const Eigen::MatrixXd& a_hat, Index k);
/// Leading k left singular vectors of the uncentred feature matrix.
OrthonormalBasis feature_basis(const Eigen::MatrixXd& x, Index k);
/// Same construction applied to the one-hot ground truth; k is normally F.
OrthonormalBasis groundtruth_basis(const Eigen::MatrixXd& y, Index k);

/// Flips each column so its largest-magnitude entry (first on ties) is positive.
void fix_signs(Eigen::MatrixXd& columns);

PrincipalAngles principal_angles(const OrthonormalBasis& b1, const OrthonormalBasis& b2);

double subspace_distance(const PrincipalAngles& angles, Metric metric);

DistanceMatrix3 distance_matrix(const OrthonormalBasis& basis_x, const OrthonormalBasis& basis_a,
                                const OrthonormalBasis& basis_y, Metric metric);

/// Frobenius norm of the distance matrix.
double sam(const DistanceMatrix3& d);

}  // namespace gcnalign
