#pragma once

#include <cstdint>
#include <vector>

#include "gcnalign/dataset.hpp"

namespace gcnalign {

struct RandomizationSpec {
  double p_graph = 0.0;     // percent in [0, 100]
  double p_features = 0.0;  // percent in [0, 100]
  std::uint64_t seed = 0;

  void validate() const;
};

/// Intermediate products of one graph rewiring, kept for inspection.
struct GraphRewiring {
  std::vector<Edge> selected;   // E_r, the edges chosen for rewiring
  std::vector<Index> stubs;     // stub list built from the degree sequence of E_r
  std::vector<Index> shuffled;  // the stub list after shuffling
  std::vector<Edge> rewired;    // E'_r before multiedge/self-loop removal
  SparseMatrix adjacency;       // final simple graph
};

/// Number of items selected at `percent`: floor(count * percent / 100).
Index randomized_count(Index count, double percent);

/// Degree-preserving stub rewiring of floor(|E| p / 100) random edges. The
/// rewired edges are united with the untouched ones and only then are
/// multiedges and self-loops removed, so |E'| <= |E|.
GraphRewiring rewire_graph(const SparseMatrix& adjacency, double percent, std::uint64_t seed);

SparseMatrix randomize_graph(const SparseMatrix& adjacency, double percent, std::uint64_t seed);

/// Permutes floor(N p / 100) uniformly chosen rows among themselves; all
/// other rows are untouched.
Eigen::MatrixXd randomize_features(const Eigen::MatrixXd& x, double percent, std::uint64_t seed);

/// Applies both randomizations with sub-seeds derived from spec.seed.
Dataset randomize_dataset(const Dataset& d, const RandomizationSpec& spec);

}  // namespace gcnalign
