#include "gcnalign/gcn.hpp"

#include <cmath>
#include <limits>

#include "gcnalign/subspaces.hpp"

namespace gcnalign {
namespace {

constexpr double kMinProbability = 1e-12;

RowSparse to_row_sparse(const Eigen::MatrixXd& x) { return x.sparseView().pruned(); }

RowSparse sparse_identity(Index n) {
  RowSparse id(n, n);
  id.setIdentity();
  return id;
}

RowSparse drop_entries(const RowSparse& x, double rate, Rng& rng) {
  RowSparse out = x;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = 1.0 / (1.0 - rate);
  for (Index r = 0; r < out.outerSize(); ++r) {
    for (RowSparse::InnerIterator it(out, r); it; ++it) it.valueRef() = unit(rng) < rate ? 0.0 : it.value() * scale;
  }
  return out;
}

double data_scale(const Mask& mask, LossReduction reduction) {
  if (reduction == LossReduction::Sum) return 1.0;
  const auto m = std::count(mask.begin(), mask.end(), true);
  return m == 0 ? 0.0 : 1.0 / static_cast<double>(m);
}

// dL/dlogits for softmax + cross-entropy, restricted to masked rows.
Eigen::MatrixXd output_error(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, const Mask& mask,
                             LossReduction reduction) {
  const double scale = data_scale(mask, reduction);
  Eigen::MatrixXd err = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  for (Index i = 0; i < z.rows(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) err.row(i) = (z.row(i) - y.row(i)) * scale;
  }
  return err;
}

void check_finite(double value, int epoch) {
  if (!std::isfinite(value)) throw TrainingDiverged(epoch);
}

// Full-batch Adam with early stopping on the validation loss. `step` runs
// one training update and returns the training loss; `evaluate` returns
// current (dropout-off) class probabilities.
template <typename Step, typename Evaluate>
void fit(const GcnConfig& config, const Eigen::MatrixXd& y, const SplitSpec& split, const Eigen::MatrixXd& l2_param,
         TrainReport& report, Step&& step, Evaluate&& evaluate) {
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double train_loss = step();
    check_finite(train_loss, epoch);
    const double val_loss = loss(evaluate(), y, split.val, l2_param, config.l2_weight, config.reduction);
    check_finite(val_loss, epoch);
    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);
    report.epochs_run = epoch + 1;
    if (val_loss < best_val) {
      best_val = val_loss;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
}

void score(const Eigen::MatrixXd& z, std::span<const int> labels, const SplitSpec& split, TrainReport& report) {
  report.train_accuracy = accuracy(z, labels, split.train);
  report.val_accuracy = accuracy(z, labels, split.val);
  report.test_accuracy = accuracy(z, labels, split.test);
}

void check_split(const SplitSpec& split, Index n) {
  const auto size = static_cast<std::size_t>(n);
  if (split.train.size() != size || split.val.size() != size || split.test.size() != size) {
    throw std::invalid_argument("split masks do not match the node count");
  }
}

}  // namespace

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::Gcn: return "gcn";
    case Variant::NoGraph: return "nograph";
    case Variant::NoFeatures: return "nofeatures";
    case Variant::CompleteGraph: return "complete";
    case Variant::Sgc: return "sgc";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::Gcn, Variant::NoGraph, Variant::NoFeatures, Variant::CompleteGraph, Variant::Sgc}) {
    if (name == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void GcnConfig::validate() const {
  if (hidden_units <= 0 || learning_rate <= 0 || max_epochs <= 0 || patience <= 0 || l2_weight < 0) {
    throw std::invalid_argument("GCN hyperparameters must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (sgc_degree < 0) throw std::invalid_argument("SGC degree must be nonnegative");
}

// ---------------------------------------------------------------------------

Propagation Propagation::sparse(SparseMatrix a_hat) {
  const Index n = a_hat.rows();
  return Propagation(Kind::Sparse, n, std::move(a_hat));
}

Propagation Propagation::identity(Index n) { return Propagation(Kind::Identity, n, {}); }

Propagation Propagation::mean_field(Index n) { return Propagation(Kind::MeanField, n, {}); }

Propagation Propagation::for_variant(const Dataset& d, Variant variant) {
  switch (variant) {
    case Variant::NoGraph: return identity(d.num_nodes());
    case Variant::CompleteGraph: return mean_field(d.num_nodes());
    default: return sparse(normalized_adjacency_sparse(d.adjacency));
  }
}

Eigen::MatrixXd Propagation::apply(const Eigen::MatrixXd& m) const {
  if (m.rows() != n_) throw std::invalid_argument("propagation operand has the wrong number of rows");
  switch (kind_) {
    case Kind::Sparse: return a_hat_ * m;
    case Kind::Identity: return m;
    case Kind::MeanField: return m.colwise().mean().replicate(n_, 1);
  }
  return m;
}

GcnModel GcnModel::glorot(Index in_features, Index hidden, Index classes, Rng& rng) {
  auto init = [&rng](Index rows, Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) w(i, j) = dist(rng);
    }
    return w;
  };
  GcnModel model;
  model.w0 = init(in_features, hidden);
  model.w1 = init(hidden, classes);
  return model;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd z = logits;
  for (Index i = 0; i < z.rows(); ++i) {
    z.row(i).array() -= z.row(i).maxCoeff();
    z.row(i) = z.row(i).array().exp().matrix();
    z.row(i) /= z.row(i).sum();
  }
  return z;
}

ForwardPass forward_pass(const GcnModel& model, const Propagation& a_hat, const RowSparse& x, double dropout,
                         Rng* rng) {
  if (x.cols() != model.w0.rows() || model.w0.cols() != model.w1.rows() || x.rows() != a_hat.size()) {
    throw std::invalid_argument("GCN shapes are inconsistent");
  }
  const bool drop = rng != nullptr && dropout > 0.0;
  ForwardPass pass;
  pass.input = drop ? drop_entries(x, dropout, *rng) : x;
  pass.pre_hidden = a_hat.apply(pass.input * model.w0);
  pass.hidden = pass.pre_hidden.cwiseMax(0.0);
  if (drop) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double scale = 1.0 / (1.0 - dropout);
    pass.hidden_keep.resize(pass.hidden.rows(), pass.hidden.cols());
    for (Index j = 0; j < pass.hidden.cols(); ++j) {
      for (Index i = 0; i < pass.hidden.rows(); ++i) pass.hidden_keep(i, j) = unit(*rng) < dropout ? 0.0 : scale;
    }
    pass.hidden = pass.hidden.cwiseProduct(pass.hidden_keep);
  }
  pass.output = softmax_rows(a_hat.apply(pass.hidden * model.w1));
  return pass;
}

Eigen::MatrixXd forward(const GcnModel& model, const Propagation& a_hat, const RowSparse& x) {
  return forward_pass(model, a_hat, x, 0.0, nullptr).output;
}

double loss(const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, const Mask& mask, const Eigen::MatrixXd& w0,
            double l2_weight, LossReduction reduction) {
  if (z.rows() != y.rows() || z.cols() != y.cols() || static_cast<Index>(mask.size()) != z.rows()) {
    throw std::invalid_argument("loss operands have inconsistent shapes");
  }
  double data = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    for (Index f = 0; f < z.cols(); ++f) {
      if (y(i, f) != 0.0) data -= y(i, f) * std::log(std::max(z(i, f), kMinProbability));
    }
  }
  return data * data_scale(mask, reduction) + 0.5 * l2_weight * w0.squaredNorm();
}

Gradients backward(const GcnModel& model, const Propagation& a_hat, const ForwardPass& pass,
                   const Eigen::MatrixXd& y, const Mask& mask, double l2_weight, LossReduction reduction) {
  const Eigen::MatrixXd d_out = a_hat.apply(output_error(pass.output, y, mask, reduction));
  Gradients g;
  g.w1 = pass.hidden.transpose() * d_out;
  Eigen::MatrixXd d_hidden = d_out * model.w1.transpose();
  if (pass.hidden_keep.size() > 0) d_hidden = d_hidden.cwiseProduct(pass.hidden_keep);
  d_hidden = (pass.pre_hidden.array() > 0.0).select(d_hidden, 0.0);
  g.w0 = pass.input.transpose() * a_hat.apply(d_hidden) + l2_weight * model.w0;
  return g;
}

Gradients gradients(const GcnModel& model, const Propagation& a_hat, const RowSparse& x, const Eigen::MatrixXd& y,
                    const Mask& mask, double l2_weight, LossReduction reduction) {
  return backward(model, a_hat, forward_pass(model, a_hat, x, 0.0, nullptr), y, mask, l2_weight, reduction);
}

// ---------------------------------------------------------------------------

Adam::Adam(Index rows, Index cols, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::MatrixXd::Zero(rows, cols)),
      v_(Eigen::MatrixXd::Zero(rows, cols)) {}

void Adam::step(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double step = lr_ * std::sqrt(1.0 - std::pow(beta2_, t_)) / (1.0 - std::pow(beta1_, t_));
  param.array() -= step * m_.array() / (v_.array().sqrt() + eps_);
}

double accuracy(const Eigen::MatrixXd& z, std::span<const int> labels, const Mask& mask) {
  std::size_t total = 0, correct = 0;
  for (Index i = 0; i < z.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    Index predicted = 0;
    z.row(i).maxCoeff(&predicted);
    ++total;
    if (predicted == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainReport train(const Dataset& d, Variant variant, const GcnConfig& config, const SplitSpec& split) {
  if (variant == Variant::Sgc) return train_sgc(d, config.sgc_degree, config, split);
  config.validate();
  check_split(split, d.num_nodes());

  const RowSparse x = variant == Variant::NoFeatures ? sparse_identity(d.num_nodes())
                                                     : to_row_sparse(row_normalize_features(d.features));
  const Propagation a_hat = Propagation::for_variant(d, variant);
  const Eigen::MatrixXd y = one_hot(d.labels, d.num_classes);

  Rng rng(config.seed);
  GcnModel model = GcnModel::glorot(x.cols(), config.hidden_units, d.num_classes, rng);
  Adam adam0(model.w0.rows(), model.w0.cols(), config.learning_rate);
  Adam adam1(model.w1.rows(), model.w1.cols(), config.learning_rate);

  TrainReport report;
  report.variant = variant;
  report.seed = config.seed;
  fit(
      config, y, split, model.w0, report,
      [&] {
        const ForwardPass pass = forward_pass(model, a_hat, x, config.dropout, &rng);
        const double value = loss(pass.output, y, split.train, model.w0, config.l2_weight, config.reduction);
        const Gradients g = backward(model, a_hat, pass, y, split.train, config.l2_weight, config.reduction);
        adam0.step(model.w0, g.w0);
        adam1.step(model.w1, g.w1);
        return value;
      },
      [&] { return forward(model, a_hat, x); });
  score(forward(model, a_hat, x), d.labels, split, report);
  return report;
}

TrainReport train(const Dataset& d, Variant variant, const GcnConfig& config) {
  return train(d, variant, config, build_split(d.labels, d.num_classes, config.split, config.split_seed));
}

TrainReport train_sgc(const Dataset& d, int degree, const GcnConfig& config, const SplitSpec& split) {
  config.validate();
  if (degree < 0) throw std::invalid_argument("SGC degree must be nonnegative");
  check_split(split, d.num_nodes());

  const SparseMatrix a_hat = normalized_adjacency_sparse(d.adjacency);
  Eigen::MatrixXd s = row_normalize_features(d.features);
  for (int k = 0; k < degree; ++k) s = a_hat * s;
  const Eigen::MatrixXd y = one_hot(d.labels, d.num_classes);

  Rng rng(config.seed);
  const double limit = std::sqrt(6.0 / static_cast<double>(s.cols() + d.num_classes));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd w(s.cols(), d.num_classes);
  for (Index j = 0; j < w.cols(); ++j) {
    for (Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  }
  Adam adam(w.rows(), w.cols(), config.learning_rate);

  TrainReport report;
  report.variant = Variant::Sgc;
  report.seed = config.seed;
  auto predict = [&] { return softmax_rows(s * w); };
  fit(
      config, y, split, w, report,
      [&] {
        const Eigen::MatrixXd z = predict();
        const double value = loss(z, y, split.train, w, config.l2_weight, config.reduction);
        const Eigen::MatrixXd grad =
            s.transpose() * output_error(z, y, split.train, config.reduction) + config.l2_weight * w;
        adam.step(w, grad);
        return value;
      },
      predict);
  score(predict(), d.labels, split, report);
  return report;
}

}  // namespace gcnalign
