#include <cmath>

#include "classifiers/detail.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

Matrix to_matrix(const dataset::FeatureMatrix& features) {
  Matrix m(static_cast<Eigen::Index>(features.n), static_cast<Eigen::Index>(features.d));
  for (std::size_t i = 0; i < features.values.size(); ++i) m.data()[i] = features.values[i];
  return m;
}

ClassifierModel fit(const ClassifierSpec& spec, const Matrix& x, std::span<const std::uint32_t> y,
                    std::size_t num_classes, std::uint64_t seed) {
  spec.validate();
  require(static_cast<std::size_t>(x.rows()) == y.size(), "fit: label count differs from row count");
  require(x.rows() > 0 && x.cols() > 0, "fit: empty training set");
  require(x.allFinite(), "fit: features contain non-finite values");
  std::vector<bool> present(num_classes, false);
  std::size_t distinct = 0;
  for (auto label : y) {
    require(label < num_classes, "fit: label " + std::to_string(label) + " out of range");
    if (!present[label]) {
      present[label] = true;
      ++distinct;
    }
  }
  if (distinct < 2) fail(ErrorCode::Data, "fit: training data must contain at least two classes");

  ClassifierModel model;
  model.num_classes = num_classes;
  model.dim = static_cast<std::size_t>(x.cols());
  switch (spec.kind()) {
    case Kind::Svm: model.state = svm_fit_multiclass(std::get<SvmParams>(spec.params), x, y, num_classes); break;
    case Kind::Knn: model.state = knn_fit(std::get<KnnParams>(spec.params), x, y); break;
    case Kind::GaussianNb:
      model.state = gaussian_nb_fit(std::get<GaussianNbParams>(spec.params), x, y, num_classes);
      break;
    case Kind::Logreg: model.state = logreg_fit(std::get<LogregParams>(spec.params), x, y, num_classes); break;
    case Kind::Tree: model.state = tree_fit(std::get<TreeParams>(spec.params), x, y, num_classes); break;
    case Kind::Forest:
      model.state = forest_fit(std::get<ForestParams>(spec.params), x, y, num_classes, seed);
      break;
    case Kind::Adaboost:
      model.state = adaboost_fit(std::get<AdaboostParams>(spec.params), x, y, num_classes);
      break;
    case Kind::Gbt: model.state = gbt_fit(std::get<GbtParams>(spec.params), x, y, num_classes); break;
  }
  return model;
}

ClassifierModel fit(const ClassifierSpec& spec, const dataset::FeatureMatrix& data, std::uint64_t seed) {
  data.validate();
  return fit(spec, to_matrix(data), data.labels, data.class_names.size(), seed);
}

Matrix predict_scores(const ClassifierModel& model, const Matrix& x) {
  require(static_cast<std::size_t>(x.cols()) == model.dim,
          "predict: feature dimension " + std::to_string(x.cols()) + " differs from the model's " +
              std::to_string(model.dim));
  const auto k = model.num_classes;
  return std::visit(
      [&](const auto& m) -> Matrix {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SvmModel>) return detail::svm_scores(m, x, k);
        else if constexpr (std::is_same_v<M, KnnModel>) return detail::knn_scores(m, x, k);
        else if constexpr (std::is_same_v<M, GaussianNbModel>) return detail::gaussian_nb_scores(m, x);
        else if constexpr (std::is_same_v<M, LogregModel>) return detail::logreg_scores(m, x);
        else if constexpr (std::is_same_v<M, TreeModel>) return detail::tree_scores(m.tree, x, k);
        else if constexpr (std::is_same_v<M, ForestModel>) return detail::forest_scores(m, x, k);
        else if constexpr (std::is_same_v<M, AdaboostModel>) return detail::adaboost_scores(m, x, k);
        else return detail::gbt_scores(m, x, k);
      },
      model.state);
}

std::vector<std::uint32_t> argmax_rows(const Matrix& scores) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(best);
  }
  return out;
}

std::vector<std::uint32_t> predict(const ClassifierModel& model, const Matrix& x) {
  return argmax_rows(predict_scores(model, x));
}

}  // namespace artpipe::classifiers
