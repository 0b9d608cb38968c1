#include <cmath>
#include <limits>

#include "classifiers/detail.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"

namespace artpipe::classifiers {

// Softmax gradient boosting with one second-order regression tree per class
// per round; F starts at the log class prior.
GbtModel gbt_fit(const GbtParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                 std::size_t num_classes) {
  require(params.n_rounds >= 1, "gbt: n_rounds must be at least 1");
  require(params.eta >= 0.0 && std::isfinite(params.eta), "gbt: eta must be non-negative");
  require(params.lambda >= 0.0, "gbt: lambda must be non-negative");
  require(params.max_depth >= 1, "gbt: max_depth must be at least 1");
  const auto n = y.size();
  const auto d = static_cast<std::size_t>(x.cols());
  const auto k = num_classes;

  GbtModel model;
  model.eta = params.eta;
  model.base_score.assign(k, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> count(k, 0);
  for (auto label : y) ++count[label];
  for (std::size_t c = 0; c < k; ++c)
    if (count[c] > 0) model.base_score[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));

  Matrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) f.col(static_cast<Eigen::Index>(c)).setConstant(model.base_score[c]);
  Matrix p(f.rows(), f.cols());
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      const double m = f.row(r).maxCoeff();
      p.row(r) = (f.row(r).array() - m).exp().matrix();
      p.row(r) /= p.row(r).sum();
    }
    std::vector<DecisionTree> trees(k);
    parallel_for(k, [&](std::size_t c) {
      std::vector<double> g(n), h(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double pi = p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        g[i] = pi - (y[i] == c ? 1.0 : 0.0);
        h[i] = std::max(pi * (1.0 - pi), 1e-16);
      }
      trees[c] = build_boosting_tree(x.data(), d, g, h, params.lambda, params.max_depth);
    });
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t i = 0; i < n; ++i)
        f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) +=
            params.eta * trees[c].leaf_value(x.row(static_cast<Eigen::Index>(i)).data())[0];
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

Matrix detail::gbt_scores(const GbtModel& model, const Matrix& x, std::size_t num_classes) {
  Matrix scores(x.rows(), static_cast<Eigen::Index>(num_classes));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      double sum = 0.0;
      for (const auto& round : model.rounds) sum += round[c].leaf_value(x.row(r).data())[0];
      scores(r, static_cast<Eigen::Index>(c)) = model.base_score[c] + model.eta * sum;
    }
  }
  return scores;
}

}  // namespace artpipe::classifiers
