#include <doctest.h>

#include <cmath>

#include "gcnalign/dataset.hpp"
#include "gcnalign/subspaces.hpp"
#include "test_util.hpp"

using namespace gcnalign;
using test_util::TempDir;
using test_util::write_file;

namespace {

Dataset from_edges(Index n, std::vector<Edge> edges) {
  Dataset d;
  for (Index i = 0; i < n; ++i) d.node_ids.push_back(std::to_string(i));
  d.features = Eigen::MatrixXd::Identity(n, n);
  d.adjacency = adjacency_from_edges(n, edges);
  d.labels.assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) d.labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
  d.num_classes = n > 1 ? 2 : 1;
  return d;
}

// Counts edges inside and across communities of the default block layout.
std::pair<Index, Index> block_edge_counts(const Dataset& d) {
  Index intra = 0, inter = 0;
  for (const Edge& e : edge_list(d.adjacency)) {
    (d.labels[static_cast<std::size_t>(e.u)] == d.labels[static_cast<std::size_t>(e.v)] ? intra : inter)++;
  }
  return {intra, inter};
}

}  // namespace

TEST_CASE("adjacency_from_edges symmetrises and cleans") {
  const std::vector<Edge> edges = {{0, 1}, {1, 0}, {2, 2}, {1, 2}, {1, 2}};
  const SparseMatrix a = adjacency_from_edges(3, edges);
  CHECK(a.nonZeros() == 4);
  CHECK(a.coeff(0, 1) == 1.0);
  CHECK(a.coeff(1, 0) == 1.0);
  CHECK(a.coeff(2, 2) == 0.0);
  CHECK(edge_list(a) == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(adjacency_from_edges(2, std::vector<Edge>{{0, 2}}), std::invalid_argument);
}

TEST_CASE("constructive example matches the planted-partition design") {
  const Dataset d = generate_constructive({});
  validate(d);
  CHECK(d.num_nodes() == 1000);
  CHECK(d.num_features() == 500);
  CHECK(d.num_classes == 10);
  CHECK(std::abs(static_cast<double>(d.num_edges()) - 6541.0) <= 240.0);
  CHECK(((d.features.array() == 0.0) || (d.features.array() == 1.0)).all());
  for (Index i = 0; i < d.num_nodes(); ++i) CHECK(d.labels[static_cast<std::size_t>(i)] == i / 100);

  SUBCASE("same seed, same data") {
    const Dataset again = generate_constructive({});
    CHECK(again.features == d.features);
    CHECK(edge_list(again.adjacency) == edge_list(d.adjacency));
    ConstructiveSpec other;
    other.seed = 1;
    CHECK(generate_constructive(other).features != d.features);
  }

  SUBCASE("feature blocks follow the communities") {
    // Share of ones inside the owned block vs elsewhere.
    double inside = 0.0, outside = 0.0;
    for (Index i = 0; i < d.num_nodes(); ++i) {
      for (Index j = 0; j < d.num_features(); ++j) (j / 50 == i / 100 ? inside : outside) += d.features(i, j);
    }
    CHECK(inside / (1000.0 * 50.0) == doctest::Approx(0.07).epsilon(0.1));
    CHECK(outside / (1000.0 * 450.0) == doctest::Approx(0.007).epsilon(0.1));
  }
}

TEST_CASE("constructive edge counts agree with their binomial expectation over 100 seeds") {
  const double pairs_in = 10.0 * (100.0 * 99.0 / 2.0);
  const double pairs_out = 1000.0 * 999.0 / 2.0 - pairs_in;
  double intra = 0.0, inter = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ConstructiveSpec spec;
    spec.seed = seed;
    const auto [a, b] = block_edge_counts(generate_constructive(spec));
    intra += static_cast<double>(a);
    inter += static_cast<double>(b);
  }
  const double n_in = 100.0 * pairs_in, n_out = 100.0 * pairs_out;
  CHECK(std::abs(intra - n_in * 0.07) <= 3.0 * std::sqrt(n_in * 0.07 * 0.93));
  CHECK(std::abs(inter - n_out * 0.007) <= 3.0 * std::sqrt(n_out * 0.007 * 0.993));
}

TEST_CASE("constructive example with zero probabilities is empty") {
  ConstructiveSpec spec;
  spec.p_in = 0.0;
  spec.p_out = 0.0;
  const Dataset d = generate_constructive(spec);
  CHECK(d.num_edges() == 0);
  CHECK(d.features.isZero());
  spec.n_nodes = 999;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("load_dataset reads both layouts") {
  TempDir dir;
  const auto edges = dir.file("edges.txt");
  const auto feats = dir.file("features.txt");

  SUBCASE("two-node graph written in both directions has one edge") {
    write_file(feats, "a 1 0 x\nb 0 1 y\n");
    write_file(edges, "a b\nb a\n");
    const Dataset d = load_dataset(edges, feats, DatasetFormat::Cora);
    CHECK(d.num_nodes() == 2);
    CHECK(d.num_edges() == 1);
  }

  SUBCASE("cora class strings are indexed lexicographically") {
    write_file(feats, "# header\n\n10 1 0 1 Theory\n20 0 1 0 Neural_Networks\n30 1 1 0 Case_Based\n");
    write_file(edges, "10 20\n30 10\n");
    const Dataset d = load_dataset(edges, feats, DatasetFormat::Cora);
    CHECK(d.labels == std::vector<int>{2, 1, 0});
    CHECK(d.num_classes == 3);
    CHECK(d.features(2, 1) == 1.0);
    CHECK(d.node_ids == std::vector<std::string>{"10", "20", "30"});
  }

  SUBCASE("generic integer labels are indexed numerically") {
    write_file(feats, "n0 0.5 2 1 10\nn1 1.5 3 1 9\nn2 2.5 4 1 100\n");
    write_file(edges, "n0 n1\n");
    const Dataset d = load_dataset(edges, feats, DatasetFormat::Generic);
    CHECK(d.labels == std::vector<int>{1, 0, 2});
    CHECK(d.features(0, 0) == 0.5);
  }

  SUBCASE("malformed inputs are rejected") {
    write_file(feats, "a 1 0\nb 0 1\n");
    write_file(edges, "a z\n");
    CHECK_THROWS_AS(load_dataset(edges, feats, DatasetFormat::Generic), DataError);
    write_file(edges, "a b c\n");
    CHECK_THROWS_AS(load_dataset(edges, feats, DatasetFormat::Generic), DataError);
    write_file(edges, "a b\n");
    write_file(feats, "a 1 0\nb 0\n");
    CHECK_THROWS_AS(load_dataset(edges, feats, DatasetFormat::Generic), DataError);
    write_file(feats, "a 1 0\na 0 1\n");
    CHECK_THROWS_AS(load_dataset(edges, feats, DatasetFormat::Generic), DataError);
    write_file(feats, "a\nb\n");
    CHECK_THROWS_AS(load_dataset(edges, feats, DatasetFormat::Generic), DataError);
    write_file(feats, "a 1 x 0\nb 0 1 1\n");
    CHECK_THROWS_AS(load_dataset(edges, feats, DatasetFormat::Generic), DataError);
    CHECK_THROWS_AS(load_dataset(dir.file("missing"), feats, DatasetFormat::Generic), DataError);
  }
}

TEST_CASE("save then load reproduces the dataset exactly") {
  Rng rng(7);
  Dataset d = from_edges(30, {});
  d.features = test_util::gaussian(30, 6, rng);
  d.features(0, 0) = 1.0 / 3.0;
  d.features(1, 1) = 1e-300;
  d.adjacency = test_util::random_graph(30, 0.2, rng);
  for (int i = 0; i < 30; ++i) d.labels[static_cast<std::size_t>(i)] = i % 3;
  d.num_classes = 3;

  TempDir dir;
  save_dataset(d, dir.file("e"), dir.file("f"));
  const Dataset back = load_dataset(dir.file("e"), dir.file("f"), DatasetFormat::Generic);
  CHECK(back.node_ids == d.node_ids);
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  CHECK(back.num_classes == d.num_classes);
  CHECK(edge_list(back.adjacency) == edge_list(d.adjacency));
}

TEST_CASE("largest connected component") {
  SUBCASE("tie goes to the component with the smallest node") {
    const Dataset d = from_edges(7, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    const Dataset lcc = largest_connected_component(d);
    CHECK(lcc.node_ids == std::vector<std::string>{"0", "1", "2"});
    CHECK(lcc.num_edges() == 3);
    CHECK(lcc.features.rows() == 3);
    CHECK(lcc.labels == std::vector<int>{0, 1, 0});
  }
  SUBCASE("connected graph is unchanged") {
    const Dataset d = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    const Dataset lcc = largest_connected_component(d);
    CHECK(lcc.node_ids == d.node_ids);
    CHECK(lcc.features == d.features);
    CHECK(edge_list(lcc.adjacency) == edge_list(d.adjacency));
  }
  SUBCASE("star plus isolated node") {
    const Dataset d = from_edges(6, {{5, 0}, {5, 1}, {5, 2}, {5, 3}});
    const Dataset lcc = largest_connected_component(d);
    CHECK(lcc.node_ids == std::vector<std::string>{"0", "1", "2", "3", "5"});
    CHECK(lcc.num_edges() == 4);
  }
}

TEST_CASE("row normalisation") {
  Eigen::MatrixXd x(2, 3);
  x << 2, 2, 0, 0, 0, 0;
  const Eigen::MatrixXd r = row_normalize_features(x);
  CHECK(r(0, 0) == 0.5);
  CHECK(r(0, 1) == 0.5);
  CHECK(r(0, 2) == 0.0);
  CHECK(r.row(1).isZero());
  CHECK(row_normalize_features(Eigen::MatrixXd::Ones(1, 1))(0, 0) == 1.0);
}

TEST_CASE("one_hot") {
  const std::vector<int> labels = {0, 1, 1};
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0, 1;
  CHECK(one_hot(labels, 2) == expected);
  const std::vector<int> same = {0, 0};
  CHECK(one_hot(same, 2) == (Eigen::MatrixXd(2, 2) << 1, 0, 1, 0).finished());
  const std::vector<int> bad = {5};
  CHECK_THROWS_AS(one_hot(bad, 3), std::invalid_argument);
}

TEST_CASE("limiting cases") {
  const Dataset d = from_edges(4, {{0, 1}, {1, 2}});
  const auto edges_before = edge_list(d.adjacency);

  const Dataset no_graph = apply_limiting_case(d, LimitingCase::NoGraph);
  CHECK(normalized_adjacency(no_graph.adjacency).isApprox(Eigen::MatrixXd::Identity(4, 4)));

  const Dataset complete = apply_limiting_case(from_edges(3, {}), LimitingCase::CompleteGraph);
  CHECK((normalized_adjacency(complete.adjacency).array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);

  Dataset wide = d;
  wide.features = Eigen::MatrixXd::Ones(4, 2);
  const Dataset no_features = apply_limiting_case(wide, LimitingCase::NoFeatures);
  CHECK(no_features.features == Eigen::MatrixXd::Identity(4, 4));

  for (const Dataset* out : {&no_graph, &no_features}) CHECK(out->labels == d.labels);
  CHECK(complete.labels == from_edges(3, {}).labels);
  CHECK(edge_list(d.adjacency) == edges_before);
  CHECK(wide.features == Eigen::MatrixXd::Ones(4, 2));
}

TEST_CASE("validate rejects inconsistent datasets") {
  Dataset d = from_edges(3, {{0, 1}});
  CHECK_NOTHROW(validate(d));
  d.labels[0] = 7;
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
  d = from_edges(3, {{0, 1}});
  d.features.resize(2, 3);
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
}
