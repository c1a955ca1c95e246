#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gcnalign/experiments.hpp"

using namespace gcnalign;

namespace {

Dataset small_example() {
  ConstructiveSpec spec;
  spec.n_nodes = 90;
  spec.n_communities = 3;
  spec.n_features = 30;
  spec.features_per_community = 10;
  spec.p_in = 0.25;
  spec.p_out = 0.02;
  spec.seed = 4;
  return generate_constructive(spec);
}

SweepSpec small_spec() {
  SweepSpec s;
  s.dataset_name = "toy";
  s.percents = {0, 50, 100};
  s.realizations = 2;
  s.training.split = {20.0, 20.0, 60.0};
  s.training.max_epochs = 60;
  s.threads = 1;
  return s;
}

const AlignmentDims kDims{8, 3, 3};

SweepRow row(double percent, double accuracy, double sam, Variant v = Variant::Gcn) {
  SweepRow r;
  r.dataset = "d";
  r.percent = percent;
  r.accuracy = accuracy;
  r.sam = sam;
  r.sams = {sam};
  r.variant = v;
  return r;
}

}  // namespace

TEST_CASE("axis names and randomization levels") {
  for (Axis a : {Axis::GraphOnly, Axis::FeaturesOnly, Axis::Both}) CHECK(parse_axis(to_string(a)) == a);
  CHECK_THROWS_AS(parse_axis("edges"), std::invalid_argument);
  const auto g = randomization_for(Axis::GraphOnly, 30, 1);
  CHECK(g.p_graph == 30);
  CHECK(g.p_features == 0);
  const auto f = randomization_for(Axis::FeaturesOnly, 30, 1);
  CHECK(f.p_graph == 0);
  CHECK(f.p_features == 30);
  const auto b = randomization_for(Axis::Both, 30, 9);
  CHECK(b.p_graph == 30);
  CHECK(b.p_features == 30);
  CHECK(b.seed == 9);
}

TEST_CASE("sweep rows") {
  const Dataset d = small_example();
  SweepSpec spec = small_spec();
  const auto rows = run_sweep(d, spec, kDims);
  REQUIRE(rows.size() == 6);

  SUBCASE("ordered by percent then realization") {
    const double percents[] = {0, 0, 50, 50, 100, 100};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].percent == percents[i]);
      CHECK(rows[i].realization == static_cast<int>(i % 2));
      CHECK(rows[i].dataset == "toy");
      CHECK(rows[i].dims.kx == 8);
      CHECK((rows[i].accuracy >= 0.0 && rows[i].accuracy <= 1.0));
      CHECK(rows[i].sam >= 0.0);
    }
    CHECK(rows[0].seed != rows[1].seed);
    CHECK(rows[2].seed != rows[4].seed);
  }

  SUBCASE("unrandomized rows share the dataset's own SAM") {
    const AlignmentResult base = evaluate_alignment(d, kDims, Metric::Chordal);
    CHECK(rows[0].sam == doctest::Approx(base.sam).epsilon(1e-12));
    CHECK(rows[1].sam == rows[0].sam);
    CHECK(rows[0].d_xa == doctest::Approx(base.distances.xa()).epsilon(1e-12));
    CHECK(rows[4].sam > rows[0].sam);
  }

  SUBCASE("SAM matches a direct evaluation of the randomized copy") {
    const Dataset r = randomize_dataset(d, randomization_for(Axis::Both, 50, rows[2].seed));
    CHECK(rows[2].sam == doctest::Approx(evaluate_alignment(r, kDims, Metric::Chordal).sam).epsilon(1e-10));
  }

  SUBCASE("deterministic and independent of the thread count") {
    spec.threads = 3;
    const auto again = run_sweep(d, spec, kDims);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(again[i].accuracy == rows[i].accuracy);
      CHECK(again[i].sam == rows[i].sam);
      CHECK(again[i].seed == rows[i].seed);
    }
  }
}

TEST_CASE("sweep with several variants and metrics") {
  const Dataset d = small_example();
  SweepSpec spec = small_spec();
  spec.percents = {0, 100};
  spec.realizations = 1;
  spec.variants = {Variant::Gcn, Variant::Sgc, Variant::NoGraph};
  spec.metrics = {Metric::Chordal, Metric::Projection};
  const auto rows = run_sweep(d, spec, kDims);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].variant == Variant::Gcn);
  CHECK(rows[1].variant == Variant::Sgc);
  CHECK(rows[2].variant == Variant::NoGraph);
  CHECK(rows[0].sams.size() == 2);
  CHECK(rows[0].sams[0] == rows[0].sam);
  CHECK(rows[0].sams[1] == doctest::Approx(evaluate_alignment(d, kDims, Metric::Projection).sam).epsilon(1e-12));
}

TEST_CASE("single-axis sweeps leave the other factor alone") {
  const Dataset d = small_example();
  SweepSpec spec = small_spec();
  spec.axis = Axis::GraphOnly;
  const auto graph_rows = run_sweep(d, spec, kDims);
  for (const SweepRow& r : graph_rows) CHECK(r.d_xy == doctest::Approx(graph_rows[0].d_xy).epsilon(1e-12));
  spec.axis = Axis::FeaturesOnly;
  const auto feature_rows = run_sweep(d, spec, kDims);
  for (const SweepRow& r : feature_rows) CHECK(r.d_ay == doctest::Approx(feature_rows[0].d_ay).epsilon(1e-12));
  CHECK(feature_rows.back().d_xy != feature_rows[0].d_xy);
}

TEST_CASE("sweep spec validation") {
  const Dataset d = small_example();
  SweepSpec spec = small_spec();
  spec.percents = {120};
  CHECK_THROWS_AS(run_sweep(d, spec, kDims), std::invalid_argument);
  spec = small_spec();
  spec.realizations = 0;
  CHECK_THROWS_AS(run_sweep(d, spec, kDims), std::invalid_argument);
  spec = small_spec();
  spec.dataset_name = "a,b";
  CHECK_THROWS_AS(run_sweep(d, spec, kDims), std::invalid_argument);
}

TEST_CASE("csv round trip") {
  std::vector<SweepRow> rows = {row(0, 0.9, 1.25), row(10, std::nan(""), 2.5, Variant::Sgc)};
  rows[0].d_xa = 0.1;
  rows[0].d_xy = 1.0 / 3.0;
  rows[0].d_ay = 0.7;
  rows[0].dims = {287, 10, 10};
  rows[0].seed = 18446744073709551615ull;
  rows[1].axis = Axis::FeaturesOnly;
  rows[1].realization = 7;

  std::stringstream buf;
  write_sweep_csv(buf, rows);
  const std::string text = buf.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "dataset,axis,percent,realization,variant,accuracy,sam,d_xa,d_xy,d_ay,kx,ka,ky,seed");
  const auto back = read_sweep_csv(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].accuracy == 0.9);
  CHECK(back[0].d_xy == 1.0 / 3.0);
  CHECK(back[0].dims.kx == 287);
  CHECK(back[0].seed == rows[0].seed);
  CHECK(std::isnan(back[1].accuracy));
  CHECK(back[1].axis == Axis::FeaturesOnly);
  CHECK(back[1].variant == Variant::Sgc);
  CHECK(back[1].realization == 7);
  CHECK(back[1].sams == std::vector<double>{2.5});
}

TEST_CASE("malformed csv") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_sweep_csv(in);
  };
  const std::string header(kSweepCsvHeader);
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(parse("a,b\n"), DataError);
  CHECK_THROWS_AS(parse(header + "\nd,both,0,0,gcn,0.5\n"), DataError);
  CHECK_THROWS_AS(parse(header + "\nd,both,x,0,gcn,0.5,1,0,0,0,1,1,1,0\n"), DataError);
  CHECK_THROWS_AS(parse(header + "\nd,diagonal,0,0,gcn,0.5,1,0,0,0,1,1,1,0\n"), DataError);
  CHECK(parse(header + "\r\n\nd,both,0,0,gcn,0.5,1,0,0,0,1,1,1,0\r\n").size() == 1);
}

TEST_CASE("pearson") {
  const std::vector<double> xs = {1, 2, 3, 4};
  const std::vector<double> neg = {-1, -2, -3, -4};
  CHECK(pearson(xs, xs) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(xs, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> ys = {2, 1, 4, 3};
  CHECK(pearson(xs, ys) == doctest::Approx(0.6).epsilon(1e-15));
  const std::vector<double> flat = {5, 5, 5, 5};
  CHECK_THROWS_AS(pearson(xs, flat), std::invalid_argument);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(pearson(xs, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("per-percent means and grouped correlation") {
  std::vector<SweepRow> rows = {row(0, 0.9, 1.0), row(0, 0.7, 2.0),   row(50, 0.5, 3.0),
                                row(50, std::nan(""), 9.0), row(100, 0.1, 5.0), row(100, 0.3, 4.0),
                                row(0, 0.8, 1.0, Variant::Sgc), row(100, 0.2, 4.0, Variant::Sgc)};
  const auto means = percent_means(std::span(rows).first(6));
  REQUIRE(means.size() == 3);
  CHECK(means[0].accuracy == doctest::Approx(0.8));
  CHECK(means[0].sam == doctest::Approx(1.5));
  CHECK(means[1].runs == 1);
  CHECK(means[1].sam == 3.0);
  CHECK(means[2].percent == 100);

  const auto corr = correlate(rows);
  REQUIRE(corr.size() == 2);
  CHECK(corr[0].variant == Variant::Gcn);
  CHECK(corr[0].points == 5);
  const std::vector<double> acc = {0.9, 0.7, 0.5, 0.1, 0.3}, sam = {1, 2, 3, 5, 4};
  CHECK(corr[0].per_point == doctest::Approx(pearson(acc, sam)).epsilon(1e-14));
  const std::vector<double> macc = {0.8, 0.5, 0.2}, msam = {1.5, 3.0, 4.5};
  CHECK(corr[0].per_percent == doctest::Approx(pearson(macc, msam)).epsilon(1e-14));
  CHECK(corr[1].per_percent == doctest::Approx(-1.0));
  CHECK_THROWS_AS(correlate(rows, 1), std::out_of_range);
}

TEST_CASE("percent grids") {
  CHECK(parse_percent_grid("0:100:10") == std::vector<double>{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  CHECK(parse_percent_grid("0:100:30") == std::vector<double>{0, 30, 60, 90});
  CHECK(parse_percent_grid("0,50,100") == std::vector<double>{0, 50, 100});
  CHECK(parse_percent_grid("25") == std::vector<double>{25});
  CHECK_THROWS_AS(parse_percent_grid("0:200:10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_percent_grid("10:0:5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_percent_grid("0:10:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_percent_grid("0:10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_percent_grid("a"), std::invalid_argument);
  CHECK_THROWS_AS(parse_percent_grid(""), std::invalid_argument);
}
