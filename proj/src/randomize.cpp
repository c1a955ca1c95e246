#include "gcnalign/randomize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcnalign/rng.hpp"

namespace gcnalign {
namespace {

void check_percent(double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw std::invalid_argument("percent must lie in [0, 100]");
}

}  // namespace

void RandomizationSpec::validate() const {
  check_percent(p_graph);
  check_percent(p_features);
}

Index randomized_count(Index count, double percent) {
  check_percent(percent);
  return static_cast<Index>(std::floor(static_cast<double>(count) * percent / 100.0));
}

GraphRewiring rewire_graph(const SparseMatrix& adjacency, double percent, std::uint64_t seed) {
  const Index n = adjacency.rows();
  std::vector<Edge> edges = edge_list(adjacency);
  const Index n_rewire = randomized_count(static_cast<Index>(edges.size()), percent);

  GraphRewiring out;
  if (n_rewire == 0) {
    out.adjacency = adjacency;
    return out;
  }

  Rng rng(seed);
  std::shuffle(edges.begin(), edges.end(), rng);
  out.selected.assign(edges.begin(), edges.begin() + n_rewire);
  std::vector<Edge> kept(edges.begin() + n_rewire, edges.end());

  std::vector<Index> degree(n, 0);
  for (const Edge& e : out.selected) {
    ++degree[e.u];
    ++degree[e.v];
  }
  for (Index i = 0; i < n; ++i) out.stubs.insert(out.stubs.end(), degree[i], i);

  out.shuffled = out.stubs;
  std::shuffle(out.shuffled.begin(), out.shuffled.end(), rng);
  // Consecutive stubs of the shuffled list form the new edges, giving each
  // node exactly its original number of stubs.
  for (std::size_t t = 0; t + 1 < out.shuffled.size(); t += 2) {
    out.rewired.push_back({out.shuffled[t], out.shuffled[t + 1]});
  }

  kept.insert(kept.end(), out.rewired.begin(), out.rewired.end());
  out.adjacency = adjacency_from_edges(n, kept);
  return out;
}

SparseMatrix randomize_graph(const SparseMatrix& adjacency, double percent, std::uint64_t seed) {
  return rewire_graph(adjacency, percent, seed).adjacency;
}

Eigen::MatrixXd randomize_features(const Eigen::MatrixXd& x, double percent, std::uint64_t seed) {
  const Index n_swap = randomized_count(x.rows(), percent);
  if (n_swap == 0) return x;

  Rng rng(seed);
  std::vector<Index> rows(x.rows());
  std::iota(rows.begin(), rows.end(), Index{0});
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(n_swap);
  std::sort(rows.begin(), rows.end());

  std::vector<Index> source = rows;
  std::shuffle(source.begin(), source.end(), rng);

  Eigen::MatrixXd out = x;
  for (Index i = 0; i < n_swap; ++i) out.row(rows[i]) = x.row(source[i]);
  return out;
}

Dataset randomize_dataset(const Dataset& d, const RandomizationSpec& spec) {
  spec.validate();
  Dataset out = d;
  out.adjacency = randomize_graph(d.adjacency, spec.p_graph, mix_seed(spec.seed, 0));
  out.features = randomize_features(d.features, spec.p_features, mix_seed(spec.seed, 1));
  return out;
}

}  // namespace gcnalign
