#include <cmath>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"
#include "tuning/tuning.hpp"

namespace artpipe::tuning {

CvResult cross_validate(std::span<const std::size_t> fold_of, std::size_t folds, const FoldEvaluator& evaluate) {
  require(folds >= 2, "folds must be at least 2");
  CvResult result;
  result.fold_accuracies.resize(folds);
  parallel_for(folds, [&](std::size_t f) {
    std::vector<std::size_t> train, val;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? val : train).push_back(i);
    if (val.empty()) fail(ErrorCode::Data, "fold " + std::to_string(f) + " is empty");
    try {
      result.fold_accuracies[f] = evaluate(train, val);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("fold " + std::to_string(f) + ": " + e.what(), e.violation());
    } catch (const Error& e) {
      throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.what());
    }
  });
  double sum = 0.0;
  for (double a : result.fold_accuracies) sum += a;
  result.mean = sum / static_cast<double>(folds);
  double sq = 0.0;
  for (double a : result.fold_accuracies) sq += (a - result.mean) * (a - result.mean);
  result.std = std::sqrt(sq / static_cast<double>(folds));
  return result;
}

CvResult cross_validate(const classifiers::ClassifierSpec& spec, const dataset::FeatureMatrix& data,
                        std::size_t folds, std::uint64_t seed) {
  spec.validate();
  data.validate();
  const auto k = data.class_names.size();
  const auto fold_of = stratified_folds(data.labels, k, folds, seed);
  const classifiers::Matrix x = classifiers::to_matrix(data);
  return cross_validate(fold_of, folds, [&](std::span<const std::size_t> train, std::span<const std::size_t> val) {
    classifiers::Matrix xt(static_cast<Eigen::Index>(train.size()), x.cols());
    std::vector<std::uint32_t> yt(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      xt.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(train[i]));
      yt[i] = data.labels[train[i]];
    }
    classifiers::Matrix xv(static_cast<Eigen::Index>(val.size()), x.cols());
    for (std::size_t i = 0; i < val.size(); ++i)
      xv.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(val[i]));
    const std::size_t fold = fold_of[val[0]];
    const auto model = classifiers::fit(spec, xt, yt, k, derive_seed(seed, fold + 1));
    const auto predicted = classifiers::predict(model, xv);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.size(); ++i) correct += predicted[i] == data.labels[val[i]];
    return static_cast<double>(correct) / static_cast<double>(val.size());
  });
}

}  // namespace artpipe::tuning
