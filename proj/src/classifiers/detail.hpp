#pragma once

#include "classifiers/classifiers.hpp"

// Per-kind scoring used by predict_scores.
namespace artpipe::classifiers::detail {

Matrix svm_scores(const SvmModel& model, const Matrix& x, std::size_t num_classes);
Matrix knn_scores(const KnnModel& model, const Matrix& x, std::size_t num_classes);
Matrix gaussian_nb_scores(const GaussianNbModel& model, const Matrix& x);
Matrix logreg_scores(const LogregModel& model, const Matrix& x);
Matrix tree_scores(const DecisionTree& tree, const Matrix& x, std::size_t num_classes);
Matrix forest_scores(const ForestModel& model, const Matrix& x, std::size_t num_classes);
Matrix adaboost_scores(const AdaboostModel& model, const Matrix& x, std::size_t num_classes);
Matrix gbt_scores(const GbtModel& model, const Matrix& x, std::size_t num_classes);

// Leaf distribution argmax, ties toward the lower class.
std::uint32_t leaf_class(const std::vector<double>& value);

}  // namespace artpipe::classifiers::detail
