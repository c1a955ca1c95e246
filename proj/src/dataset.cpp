#include "gcnalign/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_set>

#include "gcnalign/rng.hpp"

namespace gcnalign {

void validate(const Dataset& d) {
  const Index n = d.num_nodes();
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid dataset: " + what); };

  if (d.features.rows() != n) fail("feature row count differs from node count");
  if (static_cast<Index>(d.labels.size()) != n) fail("label count differs from node count");
  if (d.adjacency.rows() != n || d.adjacency.cols() != n) fail("adjacency shape differs from node count");
  if (d.num_classes < 2) fail("need at least two classes");
  if (d.num_features() < d.num_classes) fail("fewer features than classes");

  std::unordered_set<std::string> seen;
  for (const auto& id : d.node_ids) {
    if (!seen.insert(id).second) fail("duplicate node id '" + id + "'");
  }
  for (int label : d.labels) {
    if (label < 0 || label >= d.num_classes) fail("label out of range");
  }

  for (Index col = 0; col < d.adjacency.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(d.adjacency, col); it; ++it) {
      if (it.row() == it.col()) fail("adjacency has a self-loop");
      if (it.value() != 1.0) fail("adjacency entries must be 0/1");
      if (d.adjacency.coeff(it.col(), it.row()) != 1.0) fail("adjacency is not symmetric");
    }
  }
}

SparseMatrix adjacency_from_edges(Index n, std::span<const Edge> edges) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) continue;
    triplets.emplace_back(e.u, e.v, 1.0);
    triplets.emplace_back(e.v, e.u, 1.0);
  }
  SparseMatrix a(n, n);
  // Duplicates collapse to 1 instead of being summed.
  a.setFromTriplets(triplets.begin(), triplets.end(), [](double, double) { return 1.0; });
  a.makeCompressed();
  return a;
}

std::vector<Edge> edge_list(const SparseMatrix& adjacency) {
  std::vector<Edge> edges;
  edges.reserve(adjacency.nonZeros() / 2);
  for (Index col = 0; col < adjacency.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(adjacency, col); it; ++it) {
      if (it.row() < it.col()) edges.push_back({it.row(), it.col()});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return edges;
}

void ConstructiveSpec::validate() const {
  if (n_nodes <= 0 || n_communities <= 0 || n_nodes % n_communities != 0) {
    throw std::invalid_argument("n_nodes must be a positive multiple of n_communities");
  }
  if (features_per_community * n_communities != n_features) {
    throw std::invalid_argument("features_per_community * n_communities must equal n_features");
  }
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0)) {
    throw std::invalid_argument("need 0 <= p_out <= p_in <= 1");
  }
}

Dataset generate_constructive(const ConstructiveSpec& spec) {
  spec.validate();
  const Index n = spec.n_nodes;
  const Index block = n / spec.n_communities;
  auto community_of_node = [&](Index i) { return static_cast<int>(i / block); };
  auto community_of_feature = [&](Index f) { return static_cast<int>(f / spec.features_per_community); };

  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double p = community_of_node(i) == community_of_node(j) ? spec.p_in : spec.p_out;
      if (unit(rng) < p) edges.push_back({i, j});
    }
  }

  Dataset d;
  d.features = Eigen::MatrixXd::Zero(n, spec.n_features);
  for (Index i = 0; i < n; ++i) {
    for (Index f = 0; f < spec.n_features; ++f) {
      const double p = community_of_feature(f) == community_of_node(i) ? spec.p_in : spec.p_out;
      if (unit(rng) < p) d.features(i, f) = 1.0;
    }
  }

  d.node_ids.reserve(n);
  d.labels.reserve(n);
  for (Index i = 0; i < n; ++i) {
    d.node_ids.push_back(std::to_string(i));
    d.labels.push_back(community_of_node(i));
  }
  d.adjacency = adjacency_from_edges(n, edges);
  d.num_classes = spec.n_communities;
  return d;
}

Dataset largest_connected_component(const Dataset& d) {
  const Index n = d.num_nodes();
  std::vector<Index> component(n, -1);
  std::vector<Index> sizes;
  for (Index start = 0; start < n; ++start) {
    if (component[start] >= 0) continue;
    const Index id = static_cast<Index>(sizes.size());
    Index size = 0;
    std::queue<Index> frontier;
    frontier.push(start);
    component[start] = id;
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      ++size;
      for (SparseMatrix::InnerIterator it(d.adjacency, u); it; ++it) {
        if (component[it.row()] < 0) {
          component[it.row()] = id;
          frontier.push(it.row());
        }
      }
    }
    sizes.push_back(size);
  }
  if (sizes.size() <= 1) return d;

  // Components are numbered by their smallest node, so max_element's first hit
  // implements the tie-break.
  const Index keep = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();
  std::vector<Index> old_to_new(n, -1);
  std::vector<Index> kept;
  for (Index i = 0; i < n; ++i) {
    if (component[i] == keep) {
      old_to_new[i] = static_cast<Index>(kept.size());
      kept.push_back(i);
    }
  }

  Dataset out;
  out.num_classes = d.num_classes;
  out.features.resize(static_cast<Index>(kept.size()), d.num_features());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    out.node_ids.push_back(d.node_ids[kept[r]]);
    out.labels.push_back(d.labels[kept[r]]);
    out.features.row(static_cast<Index>(r)) = d.features.row(kept[r]);
  }
  std::vector<Edge> edges;
  for (const Edge& e : edge_list(d.adjacency)) {
    if (old_to_new[e.u] >= 0 && old_to_new[e.v] >= 0) edges.push_back({old_to_new[e.u], old_to_new[e.v]});
  }
  out.adjacency = adjacency_from_edges(static_cast<Index>(kept.size()), edges);
  return out;
}

Eigen::MatrixXd row_normalize_features(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Index i = 0; i < out.rows(); ++i) {
    const double sum = out.row(i).sum();
    if (sum != 0.0) out.row(i) /= sum;
  }
  return out;
}

Eigen::MatrixXd one_hot(std::span<const int> labels, int num_classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw std::invalid_argument("label " + std::to_string(labels[i]) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
    y(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return y;
}

Dataset apply_limiting_case(const Dataset& d, LimitingCase limiting_case) {
  Dataset out = d;
  const Index n = d.num_nodes();
  switch (limiting_case) {
    case LimitingCase::NoGraph:
      out.adjacency = SparseMatrix(n, n);
      break;
    case LimitingCase::CompleteGraph: {
      std::vector<Eigen::Triplet<double>> triplets;
      triplets.reserve(static_cast<std::size_t>(n * (n - 1)));
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
          if (i != j) triplets.emplace_back(i, j, 1.0);
        }
      }
      out.adjacency = SparseMatrix(n, n);
      out.adjacency.setFromTriplets(triplets.begin(), triplets.end());
      break;
    }
    case LimitingCase::NoFeatures:
      out.features = Eigen::MatrixXd::Identity(n, n);
      break;
  }
  return out;
}

}  // namespace gcnalign
