#include <algorithm>
#include <numeric>

#include "classifiers/detail.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

KnnModel knn_fit(const KnnParams& params, const Matrix& x, std::span<const std::uint32_t> y) {
  require(params.k >= 1 && params.k % 2 == 1, "knn: k must be an odd integer >= 1, got " + std::to_string(params.k));
  require(params.k <= y.size(), "knn: k = " + std::to_string(params.k) + " exceeds the " + std::to_string(y.size()) +
                                    " training points");
  KnnModel model;
  model.k = params.k;
  model.x = x;
  model.y.assign(y.begin(), y.end());
  return model;
}

// Scores are neighbour vote counts; the class of the single nearest neighbour
// gets an extra half vote so that vote ties resolve toward it.
Matrix detail::knn_scores(const KnnModel& model, const Matrix& x, std::size_t num_classes) {
  const auto n_train = static_cast<std::size_t>(model.x.rows());
  const auto d = static_cast<std::size_t>(model.x.cols());
  const std::size_t k = std::min(model.k, n_train);
  Matrix scores = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(num_classes));
  std::vector<double> dist(n_train);
  std::vector<std::size_t> order(n_train);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double* q = x.row(r).data();
    for (std::size_t t = 0; t < n_train; ++t) {
      const double* p = model.x.row(static_cast<Eigen::Index>(t)).data();
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = p[j] - q[j];
        s += diff * diff;
      }
      dist[t] = s;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto by_distance = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), by_distance);
    for (std::size_t i = 0; i < k; ++i) scores(r, model.y[order[i]]) += 1.0;
    scores(r, model.y[order[0]]) += 0.5;
  }
  return scores;
}

}  // namespace artpipe::classifiers
