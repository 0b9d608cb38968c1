#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifiers/detail.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

namespace artpipe::classifiers {

std::uint32_t detail::leaf_class(const std::vector<double>& value) {
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < value.size(); ++c)
    if (value[c] > value[best]) best = c;
  return best;
}

TreeModel tree_fit(const TreeParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                   std::size_t num_classes) {
  require(params.min_samples_leaf >= 1, "tree: min_samples_leaf must be at least 1");
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  CartOptions options{params.max_depth, params.min_samples_leaf, 0};
  return {build_cart(x.data(), static_cast<std::size_t>(x.cols()), y, {}, rows, num_classes, options, nullptr)};
}

Matrix detail::tree_scores(const DecisionTree& tree, const Matrix& x, std::size_t num_classes) {
  Matrix scores(x.rows(), static_cast<Eigen::Index>(num_classes));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto& value = tree.leaf_value(x.row(r).data());
    for (std::size_t c = 0; c < num_classes; ++c) scores(r, static_cast<Eigen::Index>(c)) = value[c];
  }
  return scores;
}

ForestModel forest_fit(const ForestParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                       std::size_t num_classes, std::uint64_t seed) {
  require(params.n_trees >= 1, "forest: n_trees must be at least 1");
  require(params.min_samples_leaf >= 1, "forest: min_samples_leaf must be at least 1");
  require(params.feature_subsample > 0.0 && params.feature_subsample <= 1.0,
          "forest: feature_subsample must lie in (0, 1]");
  const auto n = y.size();
  const auto d = static_cast<std::size_t>(x.cols());
  const auto per_split = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(params.feature_subsample * static_cast<double>(d))), 1, d);
  CartOptions options{params.max_depth, params.min_samples_leaf, per_split};

  ForestModel model;
  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap)
      for (auto& r : rows) r = uniform_index(rng, n);
    else
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    model.trees[t] = build_cart(x.data(), d, y, {}, rows, num_classes, options, &rng);
  });
  return model;
}

// Mean of the trees' leaf class distributions.
Matrix detail::forest_scores(const ForestModel& model, const Matrix& x, std::size_t num_classes) {
  Matrix scores = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(num_classes));
  for (const auto& tree : model.trees) scores += tree_scores(tree, x, num_classes);
  return scores / static_cast<double>(model.trees.size());
}

}  // namespace artpipe::classifiers
