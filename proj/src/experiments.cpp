#include "gcnalign/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>

#include "gcnalign/parallel.hpp"
#include "gcnalign/randomize.hpp"
#include "gcnalign/rng.hpp"

namespace gcnalign {
namespace {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, std::string_view column) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DataError("sweep csv line " + std::to_string(line) + ": bad " + std::string(column) + " '" +
                    std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Measured {
  DistanceMatrix3 primary;
  std::vector<double> sams;
};

Measured measure(const DatasetSubspaces& s, const AlignmentDims& dims, std::span<const Metric> metrics) {
  const OrthonormalBasis bx = s.features.leading(dims.kx);
  const OrthonormalBasis ba = s.graph.leading(dims.ka);
  const OrthonormalBasis by = s.ground_truth.leading(dims.ky);
  Measured out;
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    DistanceMatrix3 dm = distance_matrix(bx, ba, by, metrics[m]);
    out.sams.push_back(sam(dm));
    if (m == 0) out.primary = dm;
  }
  return out;
}

// Factorisations of a randomized copy, recomputing only what the axis touched.
DatasetSubspaces randomized_subspaces(const DatasetSubspaces& original, const Dataset& randomized, Axis axis,
                                      double percent) {
  if (percent == 0.0) return original;
  DatasetSubspaces out = original;
  if (axis != Axis::FeaturesOnly) out.graph = symmetric_spectrum(normalized_adjacency(randomized.adjacency));
  if (axis != Axis::GraphOnly) out.features = left_singular_subspace(randomized.features);
  return out;
}

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::GraphOnly: return "graph";
    case Axis::FeaturesOnly: return "features";
    case Axis::Both: return "both";
  }
  return "unknown";
}

Axis parse_axis(std::string_view name) {
  if (name == "graph") return Axis::GraphOnly;
  if (name == "features") return Axis::FeaturesOnly;
  if (name == "both") return Axis::Both;
  throw std::invalid_argument("unknown axis '" + std::string(name) + "'");
}

RandomizationSpec randomization_for(Axis axis, double percent, std::uint64_t seed) {
  RandomizationSpec spec;
  spec.p_graph = axis == Axis::FeaturesOnly ? 0.0 : percent;
  spec.p_features = axis == Axis::GraphOnly ? 0.0 : percent;
  spec.seed = seed;
  return spec;
}

void SweepSpec::validate() const {
  if (percents.empty()) throw std::invalid_argument("sweep needs at least one percent");
  for (double p : percents) {
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("sweep percent outside [0, 100]");
  }
  if (realizations < 1) throw std::invalid_argument("sweep needs at least one realization");
  if (variants.empty()) throw std::invalid_argument("sweep needs at least one variant");
  if (metrics.empty()) throw std::invalid_argument("sweep needs at least one metric");
  if (dataset_name.find_first_of(",\"\n") != std::string::npos) {
    throw std::invalid_argument("dataset name must not contain commas, quotes or newlines");
  }
  training.validate();
}

std::vector<SweepRow> run_sweep(const Dataset& d, const SweepSpec& spec, const AlignmentDims& dims) {
  spec.validate();
  validate(d);

  const DatasetSubspaces original = dataset_subspaces(d);
  const SplitSpec split = build_split(d.labels, d.num_classes, spec.training.split, spec.training.split_seed);

  const std::size_t per_percent = static_cast<std::size_t>(spec.realizations);
  const std::size_t tasks = spec.percents.size() * per_percent;
  std::vector<std::vector<SweepRow>> slots(tasks);

  parallel_for(tasks, spec.threads, [&](std::size_t task) {
    const std::size_t pi = task / per_percent;
    const int r = static_cast<int>(task % per_percent);
    const double percent = spec.percents[pi];
    const std::uint64_t seed = mix_seed(mix_seed(spec.base_seed, pi), static_cast<std::uint64_t>(r));

    const Dataset randomized = randomize_dataset(d, randomization_for(spec.axis, percent, seed));
    const Measured m = measure(randomized_subspaces(original, randomized, spec.axis, percent), dims, spec.metrics);

    GcnConfig config = spec.training;
    config.seed = mix_seed(seed, 2);
    for (Variant variant : spec.variants) {
      SweepRow row;
      row.dataset = spec.dataset_name;
      row.axis = spec.axis;
      row.percent = percent;
      row.realization = r;
      row.variant = variant;
      try {
        row.accuracy = train(randomized, variant, config, split).test_accuracy;
      } catch (const TrainingDiverged&) {
        row.accuracy = std::nan("");
      }
      row.sam = m.sams.front();
      row.d_xa = m.primary.xa();
      row.d_xy = m.primary.xy();
      row.d_ay = m.primary.ay();
      row.dims = dims;
      row.seed = seed;
      row.sams = m.sams;
      slots[task].push_back(std::move(row));
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(tasks * spec.variants.size());
  for (auto& slot : slots) {
    for (auto& row : slot) rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.dataset << ',' << to_string(r.axis) << ',' << format_double(r.percent) << ',' << r.realization << ','
        << to_string(r.variant) << ',' << format_double(r.accuracy) << ',' << format_double(r.sam) << ','
        << format_double(r.d_xa) << ',' << format_double(r.d_xy) << ',' << format_double(r.d_ay) << ',' << r.dims.kx
        << ',' << r.dims.ka << ',' << r.dims.ky << ',' << r.seed << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kSweepCsvHeader) throw DataError("sweep csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = split_fields(line, ',');
    if (f.size() != 14) {
      throw DataError("sweep csv line " + std::to_string(line_no) + ": expected 14 fields, got " +
                      std::to_string(f.size()));
    }
    SweepRow r;
    try {
      r.dataset = std::string(f[0]);
      r.axis = parse_axis(f[1]);
      r.variant = parse_variant(f[4]);
    } catch (const std::invalid_argument& e) {
      throw DataError("sweep csv line " + std::to_string(line_no) + ": " + e.what());
    }
    r.percent = parse_number<double>(f[2], line_no, "percent");
    r.realization = parse_number<int>(f[3], line_no, "realization");
    r.accuracy = parse_number<double>(f[5], line_no, "accuracy");
    r.sam = parse_number<double>(f[6], line_no, "sam");
    r.d_xa = parse_number<double>(f[7], line_no, "d_xa");
    r.d_xy = parse_number<double>(f[8], line_no, "d_xy");
    r.d_ay = parse_number<double>(f[9], line_no, "d_ay");
    r.dims.kx = parse_number<Index>(f[10], line_no, "kx");
    r.dims.ka = parse_number<Index>(f[11], line_no, "ka");
    r.dims.ky = parse_number<Index>(f[12], line_no, "ky");
    r.seed = parse_number<std::uint64_t>(f[13], line_no, "seed");
    r.sams = {r.sam};
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("sweep csv: missing header");
  return rows;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: sizes differ");
  if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const auto n = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), n);
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double sx = dx.norm();
  const double sy = dy.norm();
  if (sx == 0.0 || sy == 0.0) throw std::invalid_argument("pearson: zero variance");
  return std::clamp(dx.dot(dy) / (sx * sy), -1.0, 1.0);
}

std::vector<PercentMean> percent_means(std::span<const SweepRow> rows, std::size_t metric_slot) {
  std::map<double, PercentMean> by_percent;
  for (const SweepRow& r : rows) {
    if (std::isnan(r.accuracy)) continue;
    if (metric_slot >= r.sams.size()) throw std::out_of_range("sweep row has no SAM for the requested metric");
    PercentMean& m = by_percent[r.percent];
    m.percent = r.percent;
    m.accuracy += r.accuracy;
    m.sam += r.sams[metric_slot];
    ++m.runs;
  }
  std::vector<PercentMean> out;
  for (auto& [p, m] : by_percent) {
    m.accuracy /= m.runs;
    m.sam /= m.runs;
    out.push_back(m);
  }
  return out;
}

std::vector<Correlation> correlate(std::span<const SweepRow> rows, std::size_t metric_slot) {
  std::vector<Correlation> out;
  std::vector<std::vector<SweepRow>> groups;
  for (const SweepRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Correlation& c) {
      return c.dataset == r.dataset && c.axis == r.axis && c.variant == r.variant;
    });
    if (it == out.end()) {
      out.push_back({r.dataset, r.axis, r.variant, 0, 0.0, 0.0});
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[static_cast<std::size_t>(it - out.begin())].push_back(r);
  }

  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> acc, sams;
    for (const SweepRow& r : groups[g]) {
      if (std::isnan(r.accuracy)) continue;
      if (metric_slot >= r.sams.size()) throw std::out_of_range("sweep row has no SAM for the requested metric");
      acc.push_back(r.accuracy);
      sams.push_back(r.sams[metric_slot]);
    }
    out[g].points = static_cast<int>(acc.size());
    out[g].per_point = pearson(acc, sams);

    const auto means = percent_means(groups[g], metric_slot);
    std::vector<double> mean_acc, mean_sam;
    for (const PercentMean& m : means) {
      mean_acc.push_back(m.accuracy);
      mean_sam.push_back(m.sam);
    }
    out[g].per_percent = pearson(mean_acc, mean_sam);
  }
  return out;
}

std::vector<double> parse_percent_grid(std::string_view text) {
  auto number = [&](std::string_view field) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end) {
      throw std::invalid_argument("bad percent grid '" + std::string(text) + "'");
    }
    return v;
  };

  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split_fields(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("percent grid must be start:stop:step");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad percent grid '" + std::string(text) + "'");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    for (auto field : split_fields(text, ',')) out.push_back(number(field));
  }
  for (double p : out) {
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percent grid values must lie in [0, 100]");
  }
  return out;
}

}  // namespace gcnalign
