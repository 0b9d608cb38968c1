#include <cmath>
#include <limits>
#include <numbers>

#include "classifiers/detail.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

GaussianNbModel gaussian_nb_fit(const GaussianNbParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                                std::size_t num_classes) {
  require(params.var_floor > 0.0, "gaussian_nb: var_floor must be positive");
  const auto d = x.cols();
  const auto k = static_cast<Eigen::Index>(num_classes);
  GaussianNbModel model;
  model.mean = Matrix::Zero(k, d);
  model.variance = Matrix::Ones(k, d);
  model.log_prior.assign(num_classes, -std::numeric_limits<double>::infinity());

  std::vector<std::size_t> count(num_classes, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    model.mean.row(y[i]) += x.row(static_cast<Eigen::Index>(i));
    ++count[y[i]];
  }
  Matrix sq = Matrix::Zero(k, d);
  for (std::size_t c = 0; c < num_classes; ++c)
    if (count[c] > 0) model.mean.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(count[c]);
  for (std::size_t i = 0; i < y.size(); ++i)
    sq.row(y[i]) += (x.row(static_cast<Eigen::Index>(i)) - model.mean.row(y[i])).array().square().matrix();
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (count[c] == 0) continue;
    const auto row = static_cast<Eigen::Index>(c);
    model.variance.row(row) = (sq.row(row) / static_cast<double>(count[c])).array().max(params.var_floor).matrix();
    model.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(y.size()));
  }
  return model;
}

Matrix detail::gaussian_nb_scores(const GaussianNbModel& model, const Matrix& x) {
  const auto k = model.mean.rows();
  Matrix scores(x.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (!std::isfinite(model.log_prior[static_cast<std::size_t>(c)])) {
      scores.col(c).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    const auto var = model.variance.row(c).array();
    const double log_norm = -0.5 * (2.0 * std::numbers::pi * var).log().sum();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double quad = ((x.row(r) - model.mean.row(c)).array().square() / var).sum();
      scores(r, c) = model.log_prior[static_cast<std::size_t>(c)] + log_norm - 0.5 * quad;
    }
  }
  return scores;
}

}  // namespace artpipe::classifiers
