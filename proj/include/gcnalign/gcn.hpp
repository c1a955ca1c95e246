#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gcnalign/dataset.hpp"
#include "gcnalign/rng.hpp"

namespace gcnalign {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Mask = std::vector<bool>;

enum class Variant { Gcn, NoGraph, NoFeatures, CompleteGraph, Sgc };

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view name);

// ---------------------------------------------------------------------------
// Data split

/// Percentages of nodes in each part; they must add up to 100.
struct SplitFractions {
  double train = 5.0;
  double val = 10.0;
  double test = 85.0;
};

struct SplitSpec {
  Mask train;
  Mask val;
  Mask test;

  std::size_t train_count() const;
  std::size_t val_count() const;
  std::size_t test_count() const;
};

/// floor(train% N) training nodes spread evenly over classes (the remainder
/// of the division goes to randomly chosen classes), floor(val% N)
/// validation nodes drawn uniformly from the rest, and everything left over
/// as test nodes.
SplitSpec build_split(std::span<const int> labels, int num_classes, const SplitFractions& fractions,
                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Two-layer GCN

enum class LossReduction { Sum, Mean };

struct GcnConfig {
  int hidden_units = 16;
  double learning_rate = 0.01;
  double dropout = 0.5;
  double l2_weight = 5e-4;
  int max_epochs = 400;
  int patience = 100;
  std::uint64_t seed = 0;        // weight initialisation and dropout
  std::uint64_t split_seed = 0;  // data split, when train() builds it
  SplitFractions split;
  /// Cross-entropy reduction over labelled nodes used during training.
  LossReduction reduction = LossReduction::Mean;
  int sgc_degree = 2;

  void validate() const;
};

/// The operator applied before each layer: a sparse normalized adjacency,
/// the identity (no graph), or the rank-one mean field 11^T / N of the
/// complete graph.
class Propagation {
 public:
  enum class Kind { Sparse, Identity, MeanField };

  static Propagation sparse(SparseMatrix a_hat);
  static Propagation identity(Index n);
  static Propagation mean_field(Index n);
  /// Chooses the operator matching a training variant.
  static Propagation for_variant(const Dataset& d, Variant variant);

  Kind kind() const { return kind_; }
  Index size() const { return n_; }
  /// Left-multiplies m by the operator (which is symmetric).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;

 private:
  Propagation(Kind kind, Index n, SparseMatrix a_hat) : kind_(kind), n_(n), a_hat_(std::move(a_hat)) {}
  Kind kind_;
  Index n_;
  SparseMatrix a_hat_;
};

struct GcnModel {
  Eigen::MatrixXd w0;  // C0 x hidden
  Eigen::MatrixXd w1;  // hidden x F

  /// Glorot-uniform initialisation.
  static GcnModel glorot(Index in_features, Index hidden, Index classes, Rng& rng);
};

/// Activations of one forward pass, kept for backpropagation.
struct ForwardPass {
  RowSparse input;           // features after dropout
  Eigen::MatrixXd pre_hidden;  // A X W0
  Eigen::MatrixXd hidden;      // ReLU output after dropout
  Eigen::MatrixXd hidden_keep;  // dropout scale factors of the hidden layer (empty if off)
  Eigen::MatrixXd output;      // softmax probabilities, N x F
};

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

/// softmax(A ReLU(A X W0) W1). With `rng`, inverted dropout at rate
/// `dropout` is applied to the input of each layer.
ForwardPass forward_pass(const GcnModel& model, const Propagation& a_hat, const RowSparse& x, double dropout,
                         Rng* rng);
Eigen::MatrixXd forward(const GcnModel& model, const Propagation& a_hat, const RowSparse& x);

/// Cross-entropy over the masked rows plus l2_weight ||W0||^2 / 2. Mean
/// divides the data term by the number of masked rows. Probabilities are
/// clamped to 1e-12 before the log.
double loss(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, const Mask& mask, const Eigen::MatrixXd& w0,
            double l2_weight, LossReduction reduction = LossReduction::Sum);

struct Gradients {
  Eigen::MatrixXd w0;
  Eigen::MatrixXd w1;
};

/// Exact gradients of `loss` for the activations recorded in `pass`.
Gradients backward(const GcnModel& model, const Propagation& a_hat, const ForwardPass& pass,
                   const Eigen::MatrixXd& y, const Mask& mask, double l2_weight, LossReduction reduction);

/// Gradients with dropout off.
Gradients gradients(const GcnModel& model, const Propagation& a_hat, const RowSparse& x, const Eigen::MatrixXd& y,
                    const Mask& mask, double l2_weight, LossReduction reduction = LossReduction::Sum);

// ---------------------------------------------------------------------------
// Training

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(int epoch)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

struct TrainReport {
  Variant variant = Variant::Gcn;
  std::uint64_t seed = 0;
  int epochs_run = 0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
};

/// Adam state for one parameter matrix.
class Adam {
 public:
  Adam(Index rows, Index cols, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  Eigen::MatrixXd m_, v_;
};

double accuracy(const Eigen::MatrixXd& z, std::span<const int> labels, const Mask& mask);

/// Trains one variant on `split`. Features are row-normalised first;
/// NoGraph/CompleteGraph/NoFeatures substitute the corresponding operator
/// or identity features; Sgc dispatches to train_sgc.
TrainReport train(const Dataset& d, Variant variant, const GcnConfig& config, const SplitSpec& split);
/// As above with the split drawn from config.split / config.split_seed.
TrainReport train(const Dataset& d, Variant variant, const GcnConfig& config);

/// Single linear softmax layer on A^K X (K = degree), same loss, optimiser
/// and early stopping as the GCN; no dropout.
TrainReport train_sgc(const Dataset& d, int degree, const GcnConfig& config, const SplitSpec& split);

}  // namespace gcnalign
