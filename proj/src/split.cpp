#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcnalign/gcn.hpp"

namespace gcnalign {
namespace {

std::size_t count(const Mask& mask) { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

}  // namespace

std::size_t SplitSpec::train_count() const { return count(train); }
std::size_t SplitSpec::val_count() const { return count(val); }
std::size_t SplitSpec::test_count() const { return count(test); }

SplitSpec build_split(std::span<const int> labels, int num_classes, const SplitFractions& fractions,
                      std::uint64_t seed) {
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      std::abs(fractions.train + fractions.val + fractions.test - 100.0) > 1e-9) {
    throw std::invalid_argument("split percentages must be nonnegative and add up to 100");
  }
  const std::size_t n = labels.size();
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.train / 100.0));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.val / 100.0));
  if (n_train == 0) throw std::invalid_argument("split leaves the training set empty");

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw std::invalid_argument("label out of range");
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (const auto& m : members) {
    if (m.empty()) throw std::invalid_argument("every class needs at least one node");
  }

  Rng rng(seed);
  const auto classes = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> quota(classes, n_train / classes);
  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t r = 0; r < n_train % classes; ++r) ++quota[order[r]];

  SplitSpec split{Mask(n, false), Mask(n, false), Mask(n, false)};
  for (std::size_t c = 0; c < classes; ++c) {
    if (quota[c] > members[c].size()) {
      throw std::invalid_argument("training fraction too large for class " + std::to_string(c) + " (" +
                                  std::to_string(members[c].size()) + " nodes)");
    }
    auto pool = members[c];
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t k = 0; k < quota[c]; ++k) split.train[pool[k]] = true;
  }

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!split.train[i]) rest.push_back(i);
  }
  if (n_val > rest.size()) throw std::invalid_argument("not enough nodes left for the validation set");
  std::shuffle(rest.begin(), rest.end(), rng);
  for (std::size_t k = 0; k < rest.size(); ++k) (k < n_val ? split.val : split.test)[rest[k]] = true;
  return split;
}

}  // namespace gcnalign
