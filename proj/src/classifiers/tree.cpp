#include "classifiers/tree.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"

namespace artpipe::classifiers {

const std::vector<double>& DecisionTree::leaf_value(const double* x) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const auto& n = nodes[node];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[node].value;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    if (!nodes[node].is_leaf()) {
      stack.emplace_back(nodes[node].left, depth + 1);
      stack.emplace_back(nodes[node].right, depth + 1);
    }
  }
  return deepest;
}

double split_midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

namespace {

struct Keyed {
  double value;
  std::size_t row;
};

void sort_by_feature(const double* x, std::size_t d, std::span<const std::size_t> rows, std::size_t feature,
                     std::vector<Keyed>& out) {
  out.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = {x[rows[i] * d + feature], rows[i]};
  std::stable_sort(out.begin(), out.end(), [](const Keyed& a, const Keyed& b) { return a.value < b.value; });
}

}  // namespace

SplitCandidate best_gini_split(const double* x, std::size_t d, std::span<const std::uint32_t> y,
                               std::span<const double> weights, std::span<const std::size_t> rows,
                               std::size_t num_classes, std::span<const std::size_t> features,
                               std::size_t min_samples_leaf) {
  SplitCandidate best;
  const std::size_t m = rows.size();
  if (m < 2 * std::max<std::size_t>(min_samples_leaf, 1)) return best;
  auto weight = [&](std::size_t row) { return weights.empty() ? 1.0 : weights[row]; };

  std::vector<double> total(num_classes, 0.0);
  double total_w = 0.0;
  for (auto r : rows) {
    total[y[r]] += weight(r);
    total_w += weight(r);
  }
  if (!(total_w > 0.0)) return best;
  double total_sq = 0.0;
  for (double c : total) total_sq += c * c;
  const double parent = 1.0 - total_sq / (total_w * total_w);

  std::vector<Keyed> sorted;
  std::vector<double> left(num_classes), right(num_classes);
  for (auto f : features) {
    sort_by_feature(x, d, rows, f, sorted);
    std::fill(left.begin(), left.end(), 0.0);
    right = total;
    double left_w = 0.0, right_w = total_w, left_sq = 0.0, right_sq = total_sq;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      const std::size_t r = sorted[p].row;
      const double w = weight(r);
      const std::uint32_t c = y[r];
      left_sq += (left[c] + w) * (left[c] + w) - left[c] * left[c];
      right_sq += (right[c] - w) * (right[c] - w) - right[c] * right[c];
      left[c] += w;
      right[c] -= w;
      left_w += w;
      right_w -= w;
      if (!(sorted[p].value < sorted[p + 1].value)) continue;
      if (p + 1 < min_samples_leaf || m - p - 1 < min_samples_leaf) continue;
      if (!(left_w > 0.0) || !(right_w > 0.0)) continue;
      const double gini_l = 1.0 - left_sq / (left_w * left_w);
      const double gini_r = 1.0 - right_sq / (right_w * right_w);
      const double decrease = parent - (left_w / total_w) * gini_l - (right_w / total_w) * gini_r;
      if (best.feature < 0 || decrease > best.decrease + kSplitTieTolerance) {
        best.feature = static_cast<std::int32_t>(f);
        best.threshold = split_midpoint(sorted[p].value, sorted[p + 1].value);
        best.decrease = decrease;
      }
    }
  }
  return best;
}

namespace {

struct CartBuilder {
  const double* x;
  std::size_t d;
  std::span<const std::uint32_t> y;
  std::span<const double> weights;
  std::size_t num_classes;
  const CartOptions& options;
  Rng* rng;
  DecisionTree tree;

  std::vector<std::size_t> pick_features() {
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), 0);
    const std::size_t want = options.features_per_split;
    if (want == 0 || want >= d) return all;
    require(rng != nullptr, "feature subsampling needs a random generator");
    for (std::size_t i = 0; i < want; ++i) std::swap(all[i], all[i + uniform_index(*rng, d - i)]);
    all.resize(want);
    std::sort(all.begin(), all.end());
    return all;
  }

  std::uint32_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<double> freq(num_classes, 0.0);
    double total = 0.0;
    for (auto r : rows) {
      const double w = weights.empty() ? 1.0 : weights[r];
      freq[y[r]] += w;
      total += w;
    }
    std::size_t present = 0;
    for (double f : freq) present += f > 0.0;
    if (total > 0.0)
      for (double& f : freq) f /= total;

    const bool depth_capped = options.max_depth && depth >= *options.max_depth;
    if (present > 1 && !depth_capped) {
      const auto features = pick_features();
      const auto split = best_gini_split(x, d, y, weights, rows, num_classes, features, options.min_samples_leaf);
      if (split.feature >= 0) {
        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows)
          (x[r * d + split.feature] <= split.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const auto left = build(std::move(left_rows), depth + 1);
        const auto right = build(std::move(right_rows), depth + 1);
        auto& node = tree.nodes[index];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return index;
      }
    }
    tree.nodes[index].value = std::move(freq);
    return index;
  }
};

struct BoostBuilder {
  const double* x;
  std::size_t d;
  std::span<const double> grad, hess;
  double lambda;
  std::size_t max_depth;
  DecisionTree tree;

  std::uint32_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    double g_sum = 0.0, h_sum = 0.0;
    for (auto r : rows) {
      g_sum += grad[r];
      h_sum += hess[r];
    }
    const double parent = g_sum * g_sum / (h_sum + lambda);

    std::int32_t best_feature = -1;
    double best_threshold = 0.0, best_gain = 0.0;
    if (depth < max_depth && rows.size() >= 2) {
      std::vector<Keyed> sorted;
      for (std::size_t f = 0; f < d; ++f) {
        sort_by_feature(x, d, rows, f, sorted);
        double gl = 0.0, hl = 0.0;
        for (std::size_t p = 0; p + 1 < sorted.size(); ++p) {
          gl += grad[sorted[p].row];
          hl += hess[sorted[p].row];
          if (!(sorted[p].value < sorted[p + 1].value)) continue;
          const double gr = g_sum - gl, hr = h_sum - hl;
          const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
          if (gain > best_gain + kSplitTieTolerance) {
            best_gain = gain;
            best_feature = static_cast<std::int32_t>(f);
            best_threshold = split_midpoint(sorted[p].value, sorted[p + 1].value);
          }
        }
      }
    }
    if (best_feature >= 0) {
      std::vector<std::size_t> left_rows, right_rows;
      for (auto r : rows) (x[r * d + best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
      const auto left = build(std::move(left_rows), depth + 1);
      const auto right = build(std::move(right_rows), depth + 1);
      auto& node = tree.nodes[index];
      node.feature = best_feature;
      node.threshold = best_threshold;
      node.left = left;
      node.right = right;
      return index;
    }
    tree.nodes[index].value = {-g_sum / (h_sum + lambda)};
    return index;
  }
};

}  // namespace

DecisionTree build_cart(const double* x, std::size_t d, std::span<const std::uint32_t> y,
                        std::span<const double> weights, std::span<const std::size_t> rows, std::size_t num_classes,
                        const CartOptions& options, Rng* rng) {
  require(!rows.empty(), "cannot grow a tree on zero samples");
  CartBuilder builder{x, d, y, weights, num_classes, options, rng, {}};
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return std::move(builder.tree);
}

DecisionTree build_boosting_tree(const double* x, std::size_t d, std::span<const double> grad,
                                 std::span<const double> hess, double lambda, std::size_t max_depth) {
  require(grad.size() == hess.size() && !grad.empty(), "boosting tree needs matching gradients");
  BoostBuilder builder{x, d, grad, hess, lambda, max_depth, {}};
  std::vector<std::size_t> rows(grad.size());
  std::iota(rows.begin(), rows.end(), 0);
  builder.build(std::move(rows), 0);
  return std::move(builder.tree);
}

}  // namespace artpipe::classifiers
