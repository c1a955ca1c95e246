#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcnalign/alignment.hpp"
#include "gcnalign/dataset.hpp"
#include "gcnalign/gcn.hpp"
#include "gcnalign/randomize.hpp"

namespace gcnalign {

/// What a sweep randomizes.
enum class Axis { GraphOnly, FeaturesOnly, Both };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view name);

/// Randomization percentages for one axis at level `percent`.
RandomizationSpec randomization_for(Axis axis, double percent, std::uint64_t seed);

struct SweepSpec {
  std::string dataset_name = "dataset";
  Axis axis = Axis::Both;
  std::vector<double> percents = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int realizations = 100;
  std::vector<Variant> variants = {Variant::Gcn};
  std::uint64_t base_seed = 0;
  /// Hyperparameters and the split seed. The split is built once and shared
  /// by every run; `training.seed` is replaced per realization.
  GcnConfig training;
  /// SAM is reported for every metric listed; the first one fills the
  /// distance columns.
  std::vector<Metric> metrics = {Metric::Chordal};
  int threads = 0;

  void validate() const;
};

struct SweepRow {
  std::string dataset;
  Axis axis = Axis::Both;
  double percent = 0.0;
  int realization = 0;
  Variant variant = Variant::Gcn;
  double accuracy = 0.0;  // NaN when training diverged
  double sam = 0.0;
  double d_xa = 0.0;
  double d_xy = 0.0;
  double d_ay = 0.0;
  AlignmentDims dims;
  std::uint64_t seed = 0;  // randomization seed of the realization
  /// SAM per metric of the sweep, in SweepSpec::metrics order (sams[0] == sam).
  std::vector<double> sams;
};

/// Randomizes, retrains and measures alignment at the fixed `dims` for every
/// (percent, realization), one row per variant. Rows come out in (percent,
/// realization, variant) order regardless of the thread count.
std::vector<SweepRow> run_sweep(const Dataset& d, const SweepSpec& spec, const AlignmentDims& dims);

inline constexpr std::string_view kSweepCsvHeader =
    "dataset,axis,percent,realization,variant,accuracy,sam,d_xa,d_xy,d_ay,kx,ka,ky,seed";

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
/// Parses CSV written by write_sweep_csv. Throws DataError on malformed input.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Pearson correlation coefficient. Throws std::invalid_argument for fewer
/// than two points, mismatched sizes or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct PercentMean {
  double percent = 0.0;
  double accuracy = 0.0;
  double sam = 0.0;
  int runs = 0;
};

/// Mean accuracy and SAM per percent, in increasing percent order. Rows with
/// NaN accuracy are skipped. `metric_slot` indexes SweepRow::sams.
std::vector<PercentMean> percent_means(std::span<const SweepRow> rows, std::size_t metric_slot = 0);

struct Correlation {
  std::string dataset;
  Axis axis = Axis::Both;
  Variant variant = Variant::Gcn;
  int points = 0;          // rows used
  double per_point = 0.0;  // accuracy vs SAM over individual rows
  double per_percent = 0.0;  // over per-percent means
};

/// Accuracy/SAM correlation for every (dataset, axis, variant) group, in
/// order of first appearance.
std::vector<Correlation> correlate(std::span<const SweepRow> rows, std::size_t metric_slot = 0);

/// "start:stop:step" (inclusive of stop when it lies on the grid) or a
/// comma-separated list. Values must lie in [0, 100].
std::vector<double> parse_percent_grid(std::string_view text);

}  // namespace gcnalign
