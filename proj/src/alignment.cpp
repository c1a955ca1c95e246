#include "gcnalign/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "gcnalign/parallel.hpp"
#include "gcnalign/randomize.hpp"
#include "gcnalign/rng.hpp"

namespace gcnalign {
namespace {

struct ScanRange {
  Index kx_lo, kx_hi, ka_lo, ka_hi;
};

double frobenius_from_pairs(double xa, double xy, double ay) {
  return std::sqrt(2.0 * (xa * xa + xy * xy + ay * ay));
}

// SAM with the chordal metric for every (kx, ka) in the range, using
// d^2 = min(k1, k2) - ||Q1^T Q2||_F^2, so each cell is a prefix-sum lookup.
Eigen::MatrixXd chordal_sam_table(const DatasetSubspaces& s, const ScanRange& range) {
  const Index kx_max = range.kx_hi;
  const Index ka_max = range.ka_hi;
  const Index ky = s.ground_truth.vectors.cols();
  const auto& ux = s.features.vectors;
  const auto& va = s.graph.eigenvectors;
  const auto& uy = s.ground_truth.vectors;

  const Eigen::MatrixXd xa_sq = (ux.leftCols(kx_max).transpose() * va.leftCols(ka_max)).array().square().matrix();
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(kx_max + 1, ka_max + 1);
  for (Index i = 0; i < kx_max; ++i) {
    double row = 0.0;
    for (Index j = 0; j < ka_max; ++j) {
      row += xa_sq(i, j);
      prefix(i + 1, j + 1) = prefix(i, j + 1) + row;
    }
  }
  const Eigen::VectorXd xy_rows = (ux.leftCols(kx_max).transpose() * uy).rowwise().squaredNorm();
  const Eigen::VectorXd ay_rows = (va.leftCols(ka_max).transpose() * uy).rowwise().squaredNorm();
  Eigen::VectorXd xy_prefix = Eigen::VectorXd::Zero(kx_max + 1);
  Eigen::VectorXd ay_prefix = Eigen::VectorXd::Zero(ka_max + 1);
  for (Index i = 0; i < kx_max; ++i) xy_prefix(i + 1) = xy_prefix(i) + xy_rows(i);
  for (Index j = 0; j < ka_max; ++j) ay_prefix(j + 1) = ay_prefix(j) + ay_rows(j);

  auto chordal = [](Index k1, Index k2, double overlap) {
    return std::sqrt(std::max(0.0, static_cast<double>(std::min(k1, k2)) - overlap));
  };

  Eigen::MatrixXd table(range.kx_hi - range.kx_lo + 1, range.ka_hi - range.ka_lo + 1);
  for (Index kx = range.kx_lo; kx <= range.kx_hi; ++kx) {
    const double xy = chordal(kx, ky, xy_prefix(kx));
    for (Index ka = range.ka_lo; ka <= range.ka_hi; ++ka) {
      const double xa = chordal(kx, ka, prefix(kx, ka));
      const double ay = chordal(ka, ky, ay_prefix(ka));
      table(kx - range.kx_lo, ka - range.ka_lo) = frobenius_from_pairs(xa, xy, ay);
    }
  }
  return table;
}

Eigen::MatrixXd sam_on_grid(const DatasetSubspaces& s, const std::vector<Index>& kx_grid,
                            const std::vector<Index>& ka_grid, Metric metric) {
  const Index ky = s.ground_truth.vectors.cols();
  Eigen::MatrixXd out(static_cast<Index>(kx_grid.size()), static_cast<Index>(ka_grid.size()));
  for (std::size_t i = 0; i < kx_grid.size(); ++i) {
    for (std::size_t j = 0; j < ka_grid.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) =
          evaluate_alignment(s, {kx_grid[i], ka_grid[j], ky}, metric).sam;
    }
  }
  return out;
}

DatasetSubspaces null_subspaces(const Dataset& d, std::uint64_t seed) {
  return dataset_subspaces(randomize_dataset(d, {100.0, 100.0, seed}));
}

// Calls consume(r, subspaces) for every null realization in index order while
// building up to `threads` factorisations concurrently.
template <typename Consume>
void for_each_null(const Dataset& d, const OptimizeOptions& options, Consume&& consume) {
  const auto batch = static_cast<std::size_t>(resolve_threads(options.threads));
  const auto total = static_cast<std::size_t>(options.n_null);
  for (std::size_t start = 0; start < total; start += batch) {
    const std::size_t count = std::min(batch, total - start);
    std::vector<DatasetSubspaces> slots(count);
    parallel_for(count, options.threads, [&](std::size_t i) {
      slots[i] = null_subspaces(d, mix_seed(options.seed, start + i));
    });
    for (std::size_t i = 0; i < count; ++i) consume(start + i, slots[i]);
  }
}

std::pair<Index, Index> neighbours(const std::vector<Index>& grid, std::size_t best) {
  const std::size_t lo = best == 0 ? 0 : best - 1;
  const std::size_t hi = std::min(best + 1, grid.size() - 1);
  return {grid[lo], grid[hi]};
}

}  // namespace

std::vector<Index> integer_grid(Index lo, Index hi, int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  if (hi < lo) throw std::invalid_argument("empty grid interval");
  if (points == 1) return {lo};
  std::vector<Index> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (Index i = 0; i < points; ++i) grid.push_back(lo + (i * (hi - lo)) / (points - 1));
  return grid;
}

DatasetSubspaces dataset_subspaces(const Dataset& d) {
  return {left_singular_subspace(d.features), symmetric_spectrum(normalized_adjacency(d.adjacency)),
          left_singular_subspace(one_hot(d.labels, d.num_classes))};
}

AlignmentResult evaluate_alignment(const DatasetSubspaces& subspaces, const AlignmentDims& dims, Metric metric) {
  AlignmentResult out;
  out.dims = dims;
  out.metric = metric;
  out.distances = distance_matrix(subspaces.features.leading(dims.kx), subspaces.graph.leading(dims.ka),
                                  subspaces.ground_truth.leading(dims.ky), metric);
  out.sam = sam(out.distances);
  return out;
}

AlignmentResult evaluate_alignment(const Dataset& d, const AlignmentDims& dims, Metric metric) {
  return evaluate_alignment(dataset_subspaces(d), dims, metric);
}

AlignmentResult optimize_dimensions(const Dataset& d, const OptimizeOptions& options) {
  if (options.n_null < 1) throw std::invalid_argument("need at least one null realization");
  if (options.rounds < 1) throw std::invalid_argument("need at least one scan round");
  validate(d);

  const Index n = d.num_nodes();
  const Index f = d.num_classes;
  const ScanRange range{f, std::min(d.num_features(), n - 1), f, n - 1};
  if (range.kx_hi < range.kx_lo || range.ka_hi < range.ka_lo) {
    throw std::invalid_argument("no admissible subspace dimensions for this dataset");
  }

  const DatasetSubspaces original = dataset_subspaces(d);
  const bool tabulate = options.metric == Metric::Chordal;

  // Chordal: the objective is tabulated over the whole range once, and the
  // rounds read from it.
  Eigen::MatrixXd objective_table;
  if (tabulate) {
    Eigen::MatrixXd null_sum = Eigen::MatrixXd::Zero(range.kx_hi - range.kx_lo + 1, range.ka_hi - range.ka_lo + 1);
    for_each_null(d, options, [&](std::size_t, const DatasetSubspaces& s) { null_sum += chordal_sam_table(s, range); });
    objective_table = null_sum / options.n_null - chordal_sam_table(original, range);
  }

  AlignmentResult result;
  Index kx_lo = range.kx_lo, kx_hi = range.kx_hi, ka_lo = range.ka_lo, ka_hi = range.ka_hi;
  Index best_kx = kx_lo, best_ka = ka_lo;
  double best_objective = 0.0;
  for (int round = 0; round < options.rounds; ++round) {
    ScanRound scan;
    scan.kx_grid = integer_grid(kx_lo, kx_hi, options.grid_points);
    scan.ka_grid = integer_grid(ka_lo, ka_hi, options.grid_points);
    const auto rows = static_cast<Index>(scan.kx_grid.size());
    const auto cols = static_cast<Index>(scan.ka_grid.size());
    scan.objective.resize(rows, cols);

    if (tabulate) {
      for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
          scan.objective(i, j) = objective_table(scan.kx_grid[i] - range.kx_lo, scan.ka_grid[j] - range.ka_lo);
        }
      }
    } else {
      Eigen::MatrixXd null_sum = Eigen::MatrixXd::Zero(rows, cols);
      for_each_null(d, options, [&](std::size_t, const DatasetSubspaces& s) {
        null_sum += sam_on_grid(s, scan.kx_grid, scan.ka_grid, options.metric);
      });
      scan.objective = null_sum / options.n_null - sam_on_grid(original, scan.kx_grid, scan.ka_grid, options.metric);
    }

    std::size_t bi = 0, bj = 0;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        if (scan.objective(i, j) > scan.objective(static_cast<Index>(bi), static_cast<Index>(bj))) {
          bi = static_cast<std::size_t>(i);
          bj = static_cast<std::size_t>(j);
        }
      }
    }
    best_kx = scan.kx_grid[bi];
    best_ka = scan.ka_grid[bj];
    best_objective = scan.objective(static_cast<Index>(bi), static_cast<Index>(bj));
    std::tie(kx_lo, kx_hi) = neighbours(scan.kx_grid, bi);
    std::tie(ka_lo, ka_hi) = neighbours(scan.ka_grid, bj);
    result.rounds.push_back(std::move(scan));
  }

  auto rounds = std::move(result.rounds);
  result = evaluate_alignment(original, {best_kx, best_ka, f}, options.metric);
  result.rounds = std::move(rounds);
  result.objective = best_objective;
  return result;
}

}  // namespace gcnalign
