#pragma once

#include <cstdint>
#include <vector>

#include "gcnalign/dataset.hpp"
#include "gcnalign/subspaces.hpp"

namespace gcnalign {

struct AlignmentDims {
  Index kx = 0;
  Index ka = 0;
  Index ky = 0;
};

/// One pass of the (k_X, k_A) grid scan. objective(i, j) belongs to
/// (kx_grid[i], ka_grid[j]).
struct ScanRound {
  std::vector<Index> kx_grid;
  std::vector<Index> ka_grid;
  Eigen::MatrixXd objective;
};

struct AlignmentResult {
  AlignmentDims dims;
  DistanceMatrix3 distances;
  double sam = 0.0;
  Metric metric = Metric::Chordal;
  double objective = 0.0;  // null-mean SAM minus original SAM at dims
  std::vector<ScanRound> rounds;
};

struct OptimizeOptions {
  Metric metric = Metric::Chordal;
  int n_null = 100;
  int grid_points = 10;
  int rounds = 2;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

/// `points` equally spaced integers from lo to hi inclusive, truncated toward
/// lo (the first is lo, the last is hi). One point yields {lo}.
std::vector<Index> integer_grid(Index lo, Index hi, int points);

/// Full factorisations of the three matrices of a dataset. Truncating a
/// basis is a column slice, so one factorisation serves every grid cell.
struct DatasetSubspaces {
  LeftSingularSubspace features;
  SymmetricSpectrum graph;
  LeftSingularSubspace ground_truth;
};

DatasetSubspaces dataset_subspaces(const Dataset& d);

/// Distance matrix and SAM of the dataset at fixed dimensions.
AlignmentResult evaluate_alignment(const DatasetSubspaces& subspaces, const AlignmentDims& dims, Metric metric);
AlignmentResult evaluate_alignment(const Dataset& d, const AlignmentDims& dims, Metric metric);

/// Picks (k_X, k_A) maximising mean_null SAM(X_100, A_100, Y) - SAM(X, A, Y)
/// with k_Y = F, by successive grid refinement. k_X ranges over
/// [F, min(C, N - 1)] and k_A over [F, N - 1].
AlignmentResult optimize_dimensions(const Dataset& d, const OptimizeOptions& options);

}  // namespace gcnalign
