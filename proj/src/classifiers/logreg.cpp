#include <cmath>

#include "classifiers/detail.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

namespace {

// Row-wise softmax in place; returns the mean cross-entropy against y.
double softmax_cross_entropy(Matrix& logits, std::span<const std::uint32_t> y) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double m = row.maxCoeff();
    row.array() -= m;
    const double lse = std::log(row.array().exp().sum());
    loss += lse - row(y[static_cast<std::size_t>(r)]);
    row = (row.array() - lse).exp().matrix();
  }
  return loss / static_cast<double>(logits.rows());
}

}  // namespace

LogregModel logreg_fit(const LogregParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                       std::size_t num_classes) {
  require(params.l2 >= 0.0, "logreg: l2 must be non-negative");
  require(params.lr > 0.0, "logreg: lr must be positive");
  const auto k = static_cast<Eigen::Index>(num_classes);
  const auto n = static_cast<double>(x.rows());
  LogregModel model;
  model.weights = Matrix::Zero(k, x.cols());
  Eigen::RowVectorXd bias = Eigen::RowVectorXd::Zero(k);

  Matrix onehot = Matrix::Zero(x.rows(), k);
  for (std::size_t i = 0; i < y.size(); ++i) onehot(static_cast<Eigen::Index>(i), y[i]) = 1.0;

  auto objective = [&](Matrix& probs) {
    probs = x * model.weights.transpose();
    probs.rowwise() += bias;
    return softmax_cross_entropy(probs, y) + 0.5 * params.l2 * model.weights.squaredNorm();
  };

  Matrix probs;
  model.loss_history.reserve(params.iters + 1);
  for (std::size_t it = 0; it < params.iters; ++it) {
    model.loss_history.push_back(objective(probs));
    const Matrix diff = probs - onehot;
    const Matrix grad_w = diff.transpose() * x / n + params.l2 * model.weights;
    const Eigen::RowVectorXd grad_b = diff.colwise().sum() / n;
    model.weights -= params.lr * grad_w;
    bias -= params.lr * grad_b;
  }
  model.loss_history.push_back(objective(probs));
  model.bias.assign(bias.data(), bias.data() + k);
  return model;
}

Matrix detail::logreg_scores(const LogregModel& model, const Matrix& x) {
  Matrix logits = x * model.weights.transpose();
  for (Eigen::Index c = 0; c < logits.cols(); ++c) logits.col(c).array() += model.bias[static_cast<std::size_t>(c)];
  return logits;
}

}  // namespace artpipe::classifiers
