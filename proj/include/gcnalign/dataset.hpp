#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace gcnalign {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Raised for malformed or inconsistent input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  Index u = 0;
  Index v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Features, graph and ground truth over a common node set.
///
/// `adjacency` is a symmetric 0/1 matrix with empty diagonal; `labels` holds
/// class indices in [0, num_classes).
struct Dataset {
  std::vector<std::string> node_ids;
  Eigen::MatrixXd features;
  SparseMatrix adjacency;
  std::vector<int> labels;
  int num_classes = 0;

  Index num_nodes() const { return static_cast<Index>(node_ids.size()); }
  Index num_features() const { return features.cols(); }
  Index num_edges() const { return adjacency.nonZeros() / 2; }
};

/// Throws std::invalid_argument if any Dataset invariant is violated.
void validate(const Dataset& d);

/// Builds a simple undirected adjacency matrix: edges are symmetrised,
/// duplicates collapsed and self-loops dropped.
SparseMatrix adjacency_from_edges(Index n, std::span<const Edge> edges);

/// Upper-triangle edge list (u < v), sorted lexicographically.
std::vector<Edge> edge_list(const SparseMatrix& adjacency);

/// Planted-partition generator: graph and binary features share the same
/// block structure as the ground truth.
struct ConstructiveSpec {
  Index n_nodes = 1000;
  int n_communities = 10;
  Index n_features = 500;
  Index features_per_community = 50;
  double p_in = 0.07;
  double p_out = 0.007;
  std::uint64_t seed = 0;

  void validate() const;
};

Dataset generate_constructive(const ConstructiveSpec& spec);

enum class DatasetFormat { Cora, Generic };

/// Reads a dataset from an edge file and a feature/label file.
///
/// Cora layout: `<id> <binary features...> <class string>` per node and
/// `<cited> <citing>` per edge; class strings are indexed in lexicographic
/// order. Generic layout: `<id> <v1> ... <vC> <label>` per node and `<id> <id>`
/// per edge; integer labels are indexed in numeric order, anything else
/// lexicographically. Blank lines and lines starting with '#' are skipped.
Dataset load_dataset(const std::filesystem::path& edges_path,
                     const std::filesystem::path& features_path,
                     DatasetFormat format);

/// Writes the generic layout. Values use the shortest round-trip
/// representation, so loading the files back reproduces `d` exactly.
void save_dataset(const Dataset& d, const std::filesystem::path& edges_path,
                  const std::filesystem::path& features_path);

/// Induced sub-dataset on the largest connected component. Ties go to the
/// component holding the smallest node index; node order is preserved.
Dataset largest_connected_component(const Dataset& d);

/// Each nonzero row is scaled to sum to one; all-zero rows stay zero.
Eigen::MatrixXd row_normalize_features(const Eigen::MatrixXd& x);

Eigen::MatrixXd one_hot(std::span<const int> labels, int num_classes);

enum class LimitingCase { NoGraph, CompleteGraph, NoFeatures };

/// NoGraph: A = 0. CompleteGraph: A = 11^T - I. NoFeatures: X = I_N.
Dataset apply_limiting_case(const Dataset& d, LimitingCase limiting_case);

}  // namespace gcnalign
