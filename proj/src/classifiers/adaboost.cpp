#include <cmath>
#include <numeric>

#include "classifiers/detail.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

// Multi-class AdaBoost (SAMME) over shallow CART learners.
AdaboostModel adaboost_fit(const AdaboostParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                           std::size_t num_classes) {
  require(params.n_rounds >= 1, "adaboost: n_rounds must be at least 1");
  require(params.stump_depth >= 1, "adaboost: stump_depth must be at least 1");
  const auto n = y.size();
  const auto d = static_cast<std::size_t>(x.cols());
  const double k = static_cast<double>(num_classes);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  CartOptions options{params.stump_depth, 1, 0};

  AdaboostModel model;
  std::vector<char> miss(n);
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    DecisionTree learner = build_cart(x.data(), d, y, w, rows, num_classes, options, nullptr);
    double err = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = detail::leaf_class(learner.leaf_value(x.row(static_cast<Eigen::Index>(i)).data())) != y[i];
      if (miss[i]) err += w[i];
      total += w[i];
    }
    err /= total;
    if (err >= 1.0 - 1.0 / k) {
      if (round == 0)
        fail(ErrorCode::Data, "adaboost: first weak learner is no better than chance (weighted error " +
                                  std::to_string(err) + ")");
      break;
    }
    const double clamped = std::max(err, 1e-10);
    const double alpha = std::log((1.0 - clamped) / clamped) + std::log(k - 1.0);
    model.learners.push_back(std::move(learner));
    model.alphas.push_back(alpha);
    model.errors.push_back(err);
    if (err <= 0.0) break;  // perfect learner; later rounds would see the same weights
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
  }
  return model;
}

Matrix detail::adaboost_scores(const AdaboostModel& model, const Matrix& x, std::size_t num_classes) {
  Matrix scores = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(num_classes));
  for (std::size_t m = 0; m < model.learners.size(); ++m)
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      scores(r, leaf_class(model.learners[m].leaf_value(x.row(r).data()))) += model.alphas[m];
  return scores;
}

}  // namespace artpipe::classifiers
