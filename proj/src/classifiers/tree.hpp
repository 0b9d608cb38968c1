#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "common/rng.hpp"

namespace artpipe::classifiers {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<double> value;  // class frequencies (CART) or a single leaf weight (boosting)

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const std::vector<double>& leaf_value(const double* x) const;
  std::size_t depth() const;
};

struct CartOptions {
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_leaf = 1;
  std::size_t features_per_split = 0;  // 0 = all features
};

/// Splits that beat the incumbent by less than this are treated as ties.
inline constexpr double kSplitTieTolerance = 1e-12;

/// Midpoint of two consecutive distinct sorted values, kept strictly below `hi`.
double split_midpoint(double lo, double hi);

struct SplitCandidate {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

/// Best weighted-Gini split over `rows` (repeats allowed); ties go to the
/// lower feature index, then the lower threshold. feature = -1 if none.
SplitCandidate best_gini_split(const double* x, std::size_t d, std::span<const std::uint32_t> y,
                               std::span<const double> weights, std::span<const std::size_t> rows,
                               std::size_t num_classes, std::span<const std::size_t> features,
                               std::size_t min_samples_leaf);

/// CART classification tree with Gini impurity. `x` is row-major n×d.
/// `rows` lists training rows (repeats act as bootstrap copies); `weights`
/// is empty or per-row weights. `rng` is needed only for feature subsampling.
DecisionTree build_cart(const double* x, std::size_t d, std::span<const std::uint32_t> y,
                        std::span<const double> weights, std::span<const std::size_t> rows, std::size_t num_classes,
                        const CartOptions& options, Rng* rng);

/// Second-order regression tree: leaf weight −G/(H+λ), split gain
/// G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ) (must be positive).
DecisionTree build_boosting_tree(const double* x, std::size_t d, std::span<const double> grad,
                                 std::span<const double> hess, double lambda, std::size_t max_depth);

}  // namespace artpipe::classifiers
