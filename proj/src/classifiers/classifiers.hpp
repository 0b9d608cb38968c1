#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "classifiers/tree.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::classifiers {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix to_matrix(const dataset::FeatureMatrix& features);

enum class Kind : std::uint32_t { Svm = 0, Knn, GaussianNb, Logreg, Tree, Forest, Adaboost, Gbt };

std::string_view kind_name(Kind kind);
Kind parse_kind(std::string_view name);

enum class KernelType : std::uint32_t { Linear = 0, Rbf, Poly };

/// linear: ⟨a,b⟩; rbf: exp(-γ‖a-b‖²); poly: (γ⟨a,b⟩ + 1)^degree.
struct Kernel {
  KernelType type = KernelType::Rbf;
  double gamma = 1.0;
  int degree = 3;

  double operator()(const double* a, const double* b, std::size_t d) const;
};

struct SvmParams {
  double c = 1.0;
  std::optional<double> gamma;  // empty = "scale": 1 / (d · Var(X))
  KernelType kernel = KernelType::Rbf;
  int degree = 3;
  double tol = 1e-3;
  double max_iter_factor = 100.0;  // iteration cap = factor · n
};

struct KnnParams {
  std::size_t k = 5;
};

struct GaussianNbParams {
  double var_floor = 1e-9;
};

struct LogregParams {
  double l2 = 0.0;
  double lr = 0.1;
  std::size_t iters = 500;
};

struct TreeParams {
  std::optional<std::size_t> max_depth;  // empty = grow until pure
  std::size_t min_samples_leaf = 1;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_leaf = 1;
  double feature_subsample = 0.5;
  bool bootstrap = true;
};

struct AdaboostParams {
  std::size_t n_rounds = 50;
  std::size_t stump_depth = 1;
};

struct GbtParams {
  std::size_t n_rounds = 50;
  double eta = 0.3;
  double lambda = 1.0;
  std::size_t max_depth = 3;
};

/// Hyper-parameters of one classifier; the alternative index is the Kind.
struct ClassifierSpec {
  std::variant<SvmParams, KnnParams, GaussianNbParams, LogregParams, TreeParams, ForestParams, AdaboostParams,
               GbtParams>
      params;

  Kind kind() const { return static_cast<Kind>(params.index()); }
  void validate() const;

  /// Canonical compact JSON, e.g. {"C":1.0,"gamma":"scale","kernel":"rbf","kind":"svm"}.
  std::string to_json() const;
  /// Missing keys take defaults; unknown keys are rejected.
  static ClassifierSpec from_json(std::string_view text);
  static ClassifierSpec defaults(Kind kind);
};

// ---------------------------------------------------------------- SVM

struct SvmBinaryState {
  Kernel kernel;
  Matrix support_vectors;
  std::vector<double> coef;  // α_i y_i per support vector
  double bias = 0.0;

  double decision(const double* x) const;
};

struct SvmBinaryFit {
  SvmBinaryState state;
  std::vector<double> alpha;  // every training point
  std::vector<std::size_t> support_indices;
  double objective = 0.0;     // ½ αᵀQα − Σα
  double violation = 0.0;     // final max KKT violation m(α) − M(α)
  std::size_t iterations = 0;
};

/// Soft-margin dual by SMO with maximal-violating-pair selection. Throws
/// ConvergenceError when the cap is reached first. `y` holds ±1.
SvmBinaryFit svm_fit_binary(const Matrix& x, std::span<const int> y, double c, const Kernel& kernel,
                            double tol = 1e-3, double max_iter_factor = 100.0);

/// KKT residual of one training point under decision value f.
double kkt_violation(double alpha, int y, double f, double c);

double resolve_gamma(const SvmParams& params, const Matrix& x);

struct SvmModel {
  std::vector<SvmBinaryState> machines;  // one per class, or one total for K = 2
};

// ---------------------------------------------------------------- others

struct KnnModel {
  std::size_t k = 1;
  Matrix x;
  std::vector<std::uint32_t> y;
};

struct GaussianNbModel {
  Matrix mean;      // K×d
  Matrix variance;  // K×d
  std::vector<double> log_prior;
};

struct LogregModel {
  Matrix weights;  // K×d
  std::vector<double> bias;
  std::vector<double> loss_history;  // training only, not serialized
};

struct TreeModel {
  DecisionTree tree;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

struct AdaboostModel {
  std::vector<DecisionTree> learners;
  std::vector<double> alphas;
  std::vector<double> errors;  // weighted training error per kept round
};

struct GbtModel {
  double eta = 0.0;
  std::vector<double> base_score;               // K
  std::vector<std::vector<DecisionTree>> rounds;  // rounds × K regression trees
};

struct ClassifierModel {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  std::variant<SvmModel, KnnModel, GaussianNbModel, LogregModel, TreeModel, ForestModel, AdaboostModel, GbtModel>
      state;

  Kind kind() const { return static_cast<Kind>(state.index()); }
};

/// Deterministic per seed. Requires at least two distinct labels < K.
ClassifierModel fit(const ClassifierSpec& spec, const Matrix& x, std::span<const std::uint32_t> y,
                    std::size_t num_classes, std::uint64_t seed);
ClassifierModel fit(const ClassifierSpec& spec, const dataset::FeatureMatrix& data, std::uint64_t seed);

/// n×K uncalibrated scores; higher means more likely.
Matrix predict_scores(const ClassifierModel& model, const Matrix& x);
/// Argmax of predict_scores, ties toward the smaller class index.
std::vector<std::uint32_t> predict(const ClassifierModel& model, const Matrix& x);
std::vector<std::uint32_t> argmax_rows(const Matrix& scores);

SvmModel svm_fit_multiclass(const SvmParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                            std::size_t num_classes);
KnnModel knn_fit(const KnnParams& params, const Matrix& x, std::span<const std::uint32_t> y);
GaussianNbModel gaussian_nb_fit(const GaussianNbParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                                std::size_t num_classes);
LogregModel logreg_fit(const LogregParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                       std::size_t num_classes);
TreeModel tree_fit(const TreeParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                   std::size_t num_classes);
ForestModel forest_fit(const ForestParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                       std::size_t num_classes, std::uint64_t seed);
AdaboostModel adaboost_fit(const AdaboostParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                           std::size_t num_classes);
GbtModel gbt_fit(const GbtParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                 std::size_t num_classes);

/// `.artc`: "ARTC" | u32 version | u32 kind | u32 K | u32 d | payload.
std::vector<char> encode_model(const ClassifierModel& model);
ClassifierModel decode_model(std::span<const char> bytes);
void save_model(const std::string& path, const ClassifierModel& model);
ClassifierModel load_model(const std::string& path);

}  // namespace artpipe::classifiers
