#include "gcnalign/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "gcnalign/alignment.hpp"
#include "gcnalign/dataset.hpp"
#include "gcnalign/experiments.hpp"
#include "gcnalign/gcn.hpp"
#include "gcnalign/randomize.hpp"

namespace gcnalign {
namespace {

using json = nlohmann::json;

// Bad flag combinations that CLI11 cannot express; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetArgs {
  std::string name = "constructive";
  std::string edges;
  std::string features;
  std::string format = "generic";
  bool lcc = false;
  std::uint64_t data_seed = 0;
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& a) {
  cmd->add_option("--dataset", a.name, "Dataset name; 'constructive' generates the planted-partition example")
      ->capture_default_str();
  cmd->add_option("--edges", a.edges, "Edge list file");
  cmd->add_option("--features", a.features, "Feature/label file");
  cmd->add_option("--format", a.format, "File layout of --edges/--features")
      ->check(CLI::IsMember({"cora", "generic"}))
      ->capture_default_str();
  cmd->add_flag("--lcc", a.lcc, "Keep only the largest connected component");
  cmd->add_option("--data-seed", a.data_seed, "Seed of the generated constructive example")->capture_default_str();
}

Dataset load(const DatasetArgs& a) {
  Dataset d;
  if (!a.edges.empty() || !a.features.empty()) {
    if (a.edges.empty() || a.features.empty()) throw UsageError("--edges and --features must be given together");
    d = load_dataset(a.edges, a.features, a.format == "cora" ? DatasetFormat::Cora : DatasetFormat::Generic);
  } else if (a.name == "constructive") {
    ConstructiveSpec spec;
    spec.seed = a.data_seed;
    d = generate_constructive(spec);
  } else {
    throw UsageError("dataset '" + a.name + "' needs --edges and --features");
  }
  return a.lcc ? largest_connected_component(d) : d;
}

void add_training_options(CLI::App* cmd, GcnConfig& c) {
  cmd->add_option("--hidden", c.hidden_units, "Hidden units")->capture_default_str();
  cmd->add_option("--lr", c.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--dropout", c.dropout, "Dropout rate")->capture_default_str();
  cmd->add_option("--l2", c.l2_weight, "L2 weight on the first layer")->capture_default_str();
  cmd->add_option("--epochs", c.max_epochs, "Maximum epochs")->capture_default_str();
  cmd->add_option("--patience", c.patience, "Early-stopping patience in epochs")->capture_default_str();
  cmd->add_option("--split-seed", c.split_seed, "Seed of the train/val/test split")->capture_default_str();
  cmd->add_option("--train-pct", c.split.train, "Training share in percent")->capture_default_str();
  cmd->add_option("--val-pct", c.split.val, "Validation share in percent")->capture_default_str();
  cmd->add_option("--test-pct", c.split.test, "Test share in percent")->capture_default_str();
  cmd->add_option("--sgc-degree", c.sgc_degree, "Propagation steps of the sgc variant")->capture_default_str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

// Plain `key=value` lines belong to the subcommand being run, so the file
// can mirror its flags without [section] headers.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto active = app_.get_subcommands();
    if (active.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty()) item.parents.push_back(active.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App& app_;
};

json distances_json(const DistanceMatrix3& d) { return {{"xa", d.xa()}, {"xy", d.xy()}, {"ay", d.ay()}}; }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json dataset_json(const std::string& name, const Dataset& d) {
  return {{"name", name},
          {"nodes", d.num_nodes()},
          {"edges", d.num_edges()},
          {"features", d.num_features()},
          {"classes", d.num_classes}};
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature, graph and ground-truth subspace alignment for graph convolutional networks", "gcnalign"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "Read options from a key=value file; keys are the flag names of the subcommand");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));

  // generate
  auto* generate = app.add_subcommand("generate", "Write the planted-partition example to files");
  ConstructiveSpec gen_spec;
  std::string gen_edges, gen_features;
  generate->add_option("--nodes", gen_spec.n_nodes, "Number of nodes")->capture_default_str();
  generate->add_option("--communities", gen_spec.n_communities, "Number of communities")->capture_default_str();
  generate->add_option("--num-features", gen_spec.n_features, "Feature dimension")->capture_default_str();
  generate->add_option("--features-per-community", gen_spec.features_per_community, "Features owned per community")
      ->capture_default_str();
  generate->add_option("--p-in", gen_spec.p_in, "Within-community probability")->capture_default_str();
  generate->add_option("--p-out", gen_spec.p_out, "Between-community probability")->capture_default_str();
  generate->add_option("--seed", gen_spec.seed, "Random seed")->capture_default_str();
  generate->add_option("--edges-out", gen_edges, "Edge list output")->required();
  generate->add_option("--features-out", gen_features, "Feature/label output")->required();

  // align
  auto* align = app.add_subcommand("align", "Choose subspace dimensions and report the alignment (JSON)");
  DatasetArgs align_data;
  add_dataset_options(align, align_data);
  OptimizeOptions align_opts;
  std::string align_metric = "chordal";
  std::vector<Index> align_dims;
  align->add_option("--nulls", align_opts.n_null, "Fully randomized realizations in the objective")
      ->capture_default_str();
  align->add_option("--metric", align_metric, "Subspace distance")
      ->check(CLI::IsMember({"chordal", "grassmann", "projection"}))
      ->capture_default_str();
  align->add_option("--grid-points", align_opts.grid_points, "Grid points per axis and round")->capture_default_str();
  align->add_option("--rounds", align_opts.rounds, "Grid refinement rounds")->capture_default_str();
  align->add_option("--seed", align_opts.seed, "Seed of the null realizations")->capture_default_str();
  align->add_option("--threads", align_opts.threads, "Worker threads (0 = all cores)")->capture_default_str();
  align->add_option("--dims", align_dims, "Evaluate at kx,ka,ky instead of optimizing")
      ->delimiter(',')
      ->expected(3);

  // randomize
  auto* randomize = app.add_subcommand("randomize", "Write a randomized copy of a dataset");
  DatasetArgs rand_data;
  add_dataset_options(randomize, rand_data);
  RandomizationSpec rand_spec;
  std::string rand_edges, rand_features;
  randomize->add_option("--p-graph", rand_spec.p_graph, "Percent of edges rewired")->capture_default_str();
  randomize->add_option("--p-features", rand_spec.p_features, "Percent of feature rows shuffled")
      ->capture_default_str();
  randomize->add_option("--seed", rand_spec.seed, "Random seed")->capture_default_str();
  randomize->add_option("--edges-out", rand_edges, "Edge list output")->required();
  randomize->add_option("--features-out", rand_features, "Feature/label output")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one model variant (JSON report)");
  DatasetArgs train_data;
  add_dataset_options(train_cmd, train_data);
  GcnConfig train_config;
  std::string train_variant = "gcn";
  train_cmd->add_option("--variant", train_variant, "Model variant")
      ->check(CLI::IsMember({"gcn", "nograph", "nofeatures", "complete", "sgc"}))
      ->capture_default_str();
  train_cmd->add_option("--seed", train_config.seed, "Weight and dropout seed")->capture_default_str();
  add_training_options(train_cmd, train_config);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Randomization sweep of accuracy and alignment (CSV)");
  DatasetArgs sweep_data;
  add_dataset_options(sweep, sweep_data);
  SweepSpec sweep_spec;
  std::string sweep_axis = "both", sweep_metric = "chordal", sweep_out;
  std::vector<std::string> sweep_grid = {"0:100:10"};
  std::vector<std::string> sweep_variants = {"gcn"};
  std::vector<Index> sweep_dims;
  OptimizeOptions sweep_opts;
  sweep_spec.realizations = 100;
  sweep->add_option("--axis", sweep_axis, "What to randomize")
      ->check(CLI::IsMember({"graph", "features", "both"}))
      ->capture_default_str();
  sweep->add_option("--grid", sweep_grid, "Percent grid, start:stop:step or a comma list")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--realizations", sweep_spec.realizations, "Realizations per percent")->capture_default_str();
  sweep->add_option("--variants", sweep_variants, "Comma-separated model variants")
      ->delimiter(',')
      ->check(CLI::IsMember({"gcn", "nograph", "nofeatures", "complete", "sgc"}))
      ->capture_default_str();
  sweep->add_option("--metric", sweep_metric, "Subspace distance")
      ->check(CLI::IsMember({"chordal", "grassmann", "projection"}))
      ->capture_default_str();
  sweep->add_option("--seed", sweep_spec.base_seed, "Base seed of the realizations")->capture_default_str();
  sweep->add_option("--threads", sweep_spec.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sweep->add_option("--dims", sweep_dims, "Fixed kx,ka,ky; optimized on the dataset when omitted")
      ->delimiter(',')
      ->expected(3);
  sweep->add_option("--nulls", sweep_opts.n_null, "Null realizations when optimizing dimensions")
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
  add_training_options(sweep, sweep_spec.training);

  // correlate
  auto* correlate_cmd = app.add_subcommand("correlate", "Accuracy/SAM correlation of a sweep CSV");
  std::string corr_input;
  correlate_cmd->add_option("input", corr_input, "Sweep CSV ('-' for stdin)")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) {
      const Dataset d = generate_constructive(gen_spec);
      save_dataset(d, gen_edges, gen_features);
      out << dataset_json("constructive", d).dump(2) << '\n';
    } else if (*align) {
      const Dataset d = load(align_data);
      align_opts.metric = parse_metric(align_metric);
      AlignmentResult result;
      if (align_dims.empty()) {
        result = optimize_dimensions(d, align_opts);
      } else {
        result = evaluate_alignment(d, {align_dims[0], align_dims[1], align_dims[2]}, align_opts.metric);
      }
      json report = {{"dataset", dataset_json(align_data.name, d)},
                     {"metric", to_string(result.metric)},
                     {"k", {result.dims.kx, result.dims.ka, result.dims.ky}},
                     {"sam", result.sam},
                     {"distances", distances_json(result.distances)}};
      if (align_dims.empty()) {
        report["objective"] = result.objective;
        report["nulls"] = align_opts.n_null;
        json rounds = json::array();
        for (const ScanRound& r : result.rounds) {
          rounds.push_back({{"kx_grid", r.kx_grid}, {"ka_grid", r.ka_grid}, {"objective", matrix_json(r.objective)}});
        }
        report["rounds"] = std::move(rounds);
      }
      out << report.dump(2) << '\n';
    } else if (*randomize) {
      const Dataset d = load(rand_data);
      const Dataset r = randomize_dataset(d, rand_spec);
      save_dataset(r, rand_edges, rand_features);
      out << json{{"input", dataset_json(rand_data.name, d)},
                  {"output", dataset_json(rand_data.name, r)},
                  {"p_graph", rand_spec.p_graph},
                  {"p_features", rand_spec.p_features},
                  {"seed", rand_spec.seed}}
                 .dump(2)
          << '\n';
    } else if (*train_cmd) {
      const Dataset d = load(train_data);
      const TrainReport r = train(d, parse_variant(train_variant), train_config);
      out << json{{"dataset", dataset_json(train_data.name, d)},
                  {"variant", to_string(r.variant)},
                  {"seed", r.seed},
                  {"split_seed", train_config.split_seed},
                  {"epochs_run", r.epochs_run},
                  {"train_accuracy", r.train_accuracy},
                  {"val_accuracy", r.val_accuracy},
                  {"test_accuracy", r.test_accuracy},
                  {"train_loss", r.train_loss},
                  {"val_loss", r.val_loss}}
                 .dump(2)
          << '\n';
    } else if (*sweep) {
      const Dataset d = load(sweep_data);
      sweep_spec.dataset_name = sweep_data.name;
      sweep_spec.axis = parse_axis(sweep_axis);
      sweep_spec.percents = parse_percent_grid(CLI::detail::join(sweep_grid, ","));
      sweep_spec.metrics = {parse_metric(sweep_metric)};
      sweep_spec.variants.clear();
      for (const auto& v : sweep_variants) sweep_spec.variants.push_back(parse_variant(v));
      AlignmentDims dims;
      if (sweep_dims.empty()) {
        sweep_opts.metric = sweep_spec.metrics.front();
        sweep_opts.seed = sweep_spec.base_seed;
        sweep_opts.threads = sweep_spec.threads;
        dims = optimize_dimensions(d, sweep_opts).dims;
      } else {
        dims = {sweep_dims[0], sweep_dims[1], sweep_dims[2]};
      }
      const auto rows = run_sweep(d, sweep_spec, dims);
      std::ofstream file;
      write_sweep_csv(open_output(sweep_out, file, out), rows);
    } else if (*correlate_cmd) {
      std::vector<SweepRow> rows;
      if (corr_input == "-") {
        rows = read_sweep_csv(std::cin);
      } else {
        std::ifstream in(corr_input);
        if (!in) throw std::runtime_error("cannot open '" + corr_input + "'");
        rows = read_sweep_csv(in);
      }
      out << "dataset,axis,variant,points,r_per_point,r_per_percent\n";
      for (const Correlation& c : correlate(rows)) {
        out << c.dataset << ',' << to_string(c.axis) << ',' << to_string(c.variant) << ',' << c.points << ','
            << c.per_point << ',' << c.per_percent << '\n';
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace gcnalign
