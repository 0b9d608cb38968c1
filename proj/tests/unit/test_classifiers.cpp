#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <filesystem>

#include "classifiers/classifiers.hpp"
#include "common/error.hpp"
#include "unit/oracles.hpp"

using namespace artpipe;
using namespace artpipe::classifiers;

namespace {

struct Data {
  Matrix x;
  std::vector<std::uint32_t> y;
  std::size_t k = 2;
};

double gauss(Rng& rng) {
  // Box-Muller; good enough for test fixtures.
  const double u1 = std::max(uniform01(rng), 1e-300), u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// `k` Gaussian blobs in d dims, unit sigma, centres `spacing` apart on a line.
Data blobs(std::size_t k, std::size_t per_class, std::size_t d, double spacing, std::uint64_t seed) {
  Rng rng(seed);
  Data data;
  data.k = k;
  data.x.resize(static_cast<Eigen::Index>(k * per_class), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto r = static_cast<Eigen::Index>(c * per_class + i);
      for (std::size_t j = 0; j < d; ++j)
        data.x(r, static_cast<Eigen::Index>(j)) = gauss(rng) + (j == 0 ? spacing * static_cast<double>(c) : 0.0);
      data.y.push_back(static_cast<std::uint32_t>(c));
    }
  return data;
}

Data noise_data(std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  Data data;
  data.k = k;
  data.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < data.x.size(); ++i) data.x.data()[i] = uniform(rng, -2, 2);
  for (std::size_t i = 0; i < n; ++i) data.y.push_back(static_cast<std::uint32_t>(i % k));
  return data;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : values) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

double accuracy(const std::vector<std::uint32_t>& pred, const std::vector<std::uint32_t>& y) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += pred[i] == y[i];
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

std::vector<ClassifierSpec> every_kind() {
  std::vector<ClassifierSpec> specs;
  for (std::uint32_t k = 0; k <= static_cast<std::uint32_t>(Kind::Gbt); ++k) {
    auto spec = ClassifierSpec::defaults(static_cast<Kind>(k));
    if (spec.kind() == Kind::Knn) std::get<KnnParams>(spec.params).k = 3;
    if (spec.kind() == Kind::Forest) std::get<ForestParams>(spec.params).n_trees = 15;
    specs.push_back(spec);
  }
  return specs;
}

double linear_f(const SvmBinaryFit& fit, double a, double b) {
  const double p[2] = {a, b};
  return fit.state.decision(p);
}

}  // namespace

// ---------------------------------------------------------------- shared contract

TEST(Fit, EveryKindSeparatesTwoBlobs) {
  const auto data = blobs(2, 10, 2, 6.0, 1);
  for (const auto& spec : every_kind()) {
    const auto model = fit(spec, data.x, data.y, 2, 3);
    EXPECT_EQ(model.kind(), spec.kind());
    EXPECT_EQ(accuracy(predict(model, data.x), data.y), 1.0) << spec.to_json();
  }
}

TEST(Fit, PredictIsArgmaxOfScoresForEveryKind) {
  const auto data = noise_data(40, 3, 3, 2);
  const auto probe = noise_data(60, 3, 3, 3);
  for (const auto& spec : every_kind()) {
    const auto model = fit(spec, data.x, data.y, 3, 5);
    const auto scores = predict_scores(model, probe.x);
    ASSERT_EQ(scores.rows(), 60);
    ASSERT_EQ(scores.cols(), 3);
    const auto pred = predict(model, probe.x);
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      std::uint32_t best = 0;
      for (Eigen::Index c = 1; c < 3; ++c)
        if (scores(i, c) > scores(i, best)) best = static_cast<std::uint32_t>(c);
      EXPECT_EQ(pred[static_cast<std::size_t>(i)], best) << spec.to_json();
    }
  }
}

TEST(Fit, DeterministicPerSeed) {
  const auto data = noise_data(30, 2, 3, 4);
  for (const auto& spec : every_kind()) {
    const auto a = encode_model(fit(spec, data.x, data.y, 3, 9));
    const auto b = encode_model(fit(spec, data.x, data.y, 3, 9));
    EXPECT_EQ(a, b) << spec.to_json();
  }
}

TEST(Fit, RejectsEvenKAndSingleClass) {
  const auto data = blobs(2, 5, 2, 6.0, 1);
  auto knn = ClassifierSpec::defaults(Kind::Knn);
  std::get<KnnParams>(knn.params).k = 4;
  EXPECT_THROW(fit(knn, data.x, data.y, 2, 0), Error);
  std::vector<std::uint32_t> one(data.y.size(), 1);
  try {
    fit(ClassifierSpec::defaults(Kind::Svm), data.x, one, 2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Data);
  }
}

TEST(Fit, RejectsBadShapesAndValues) {
  auto data = blobs(2, 5, 2, 6.0, 1);
  const auto spec = ClassifierSpec::defaults(Kind::Tree);
  std::vector<std::uint32_t> short_y(data.y.begin(), data.y.end() - 1);
  EXPECT_THROW(fit(spec, data.x, short_y, 2, 0), Error);
  auto bad_label = data.y;
  bad_label[0] = 5;
  EXPECT_THROW(fit(spec, data.x, bad_label, 2, 0), Error);
  data.x(0, 0) = std::nan("");
  EXPECT_THROW(fit(spec, data.x, data.y, 2, 0), Error);
  const auto model = fit(spec, blobs(2, 5, 2, 6.0, 1).x, blobs(2, 5, 2, 6.0, 1).y, 2, 0);
  EXPECT_THROW(predict(model, Matrix::Zero(2, 3)), Error);
}

TEST(Predict, ArgmaxAndTies) {
  EXPECT_EQ(argmax_rows(rows({{0.2, 0.5, 0.3}})), (std::vector<std::uint32_t>{1}));
  EXPECT_EQ(argmax_rows(rows({{0.5, 0.5}})), (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(argmax_rows(rows({{-1.0, 3.0, 3.0}})), (std::vector<std::uint32_t>{1}));
}

TEST(Predict, OneNearestNeighbourMemorizes) {
  const auto data = noise_data(50, 4, 5, 6);
  auto spec = ClassifierSpec::defaults(Kind::Knn);
  std::get<KnnParams>(spec.params).k = 1;
  const auto model = fit(spec, data.x, data.y, 5, 0);
  EXPECT_EQ(predict(model, data.x), data.y);
}

// ---------------------------------------------------------------- SVM

TEST(Svm, TwoPointClosedForm) {
  const Matrix x = rows({{0, 0}, {2, 2}});
  const std::vector<int> y{-1, 1};
  const auto fit = svm_fit_binary(x, y, 1.0, {KernelType::Linear, 1.0, 3});
  EXPECT_EQ(fit.support_indices.size(), 2u);
  EXPECT_NEAR(linear_f(fit, 1, 1), 0.0, 1e-6);
  // Closed form: α = 1/4 for both points, w = (1/2, 1/2), b = -1.
  EXPECT_NEAR(fit.alpha[0], 0.25, 1e-6);
  EXPECT_NEAR(fit.alpha[1], 0.25, 1e-6);
  EXPECT_NEAR(linear_f(fit, 0, 0), -1.0, 1e-6);
}

TEST(Svm, XorWithRbfKernel) {
  const Matrix x = rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> y{-1, -1, 1, 1};
  const auto fit = svm_fit_binary(x, y, 10.0, {KernelType::Rbf, 1.0, 3});
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double f = fit.state.decision(x.row(i).data());
    EXPECT_GT(f * y[static_cast<std::size_t>(i)], 0.0) << i;
  }
}

TEST(Svm, ScaledHardMarginMatchesOracleDirection) {
  const Matrix x = rows({{0, 0}, {6, 6}});
  const std::vector<int> y{-1, 1};
  const auto fit = svm_fit_binary(x, y, 1000.0, {KernelType::Linear, 1.0, 3});
  const std::vector<double> flat{0, 0, 6, 6};
  const auto ref = oracle::svm_dual(oracle::gram_linear(flat, 2, 2), y, 1000.0);
  double w_smo[2] = {0, 0}, w_ref[2] = {0, 0};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      w_smo[j] += fit.alpha[i] * y[i] * flat[i * 2 + j];
      w_ref[j] += ref.alpha[i] * y[i] * flat[i * 2 + j];
    }
  const double cosine = (w_smo[0] * w_ref[0] + w_smo[1] * w_ref[1]) /
                        (std::hypot(w_smo[0], w_smo[1]) * std::hypot(w_ref[0], w_ref[1]));
  EXPECT_NEAR(cosine, 1.0, 1e-9);
  EXPECT_NEAR(fit.objective, ref.objective, 1e-4);
  // Direction (1,1) like the unscaled problem; boundary passes through (3,3).
  EXPECT_NEAR(w_smo[0], w_smo[1], 1e-9);
  EXPECT_NEAR(linear_f(fit, 3, 3), 0.0, 1e-6);
}

TEST(Svm, ObjectiveMatchesOracleOnRandomProblems) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 6 + uniform_index(rng, 7), d = 1 + uniform_index(rng, 3);
    std::vector<double> flat(n * d);
    for (auto& v : flat) v = uniform(rng, -1, 1);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1 : -1;
    const Matrix x = Eigen::Map<const Matrix>(flat.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const double c = trial % 2 ? 1.0 : 10.0;
    const auto fit = svm_fit_binary(x, y, c, {KernelType::Rbf, 0.5, 3}, 1e-5);
    const auto ref = oracle::svm_dual(oracle::gram_rbf(flat, n, d, 0.5), y, c);
    EXPECT_NEAR(fit.objective, ref.objective, 1e-4) << trial;
  }
}

TEST(Svm, EqualityConstraintAndKkt) {
  const auto data = blobs(2, 15, 3, 1.5, 7);
  std::vector<int> y;
  for (auto v : data.y) y.push_back(v ? 1 : -1);
  const double c = 1.0;
  const auto fit = svm_fit_binary(data.x, y, c, {KernelType::Rbf, 0.3, 3});
  double balance = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    balance += fit.alpha[i] * y[i];
    EXPECT_GE(fit.alpha[i], 0.0);
    EXPECT_LE(fit.alpha[i], c);
    const double f = fit.state.decision(data.x.row(static_cast<Eigen::Index>(i)).data());
    EXPECT_LE(kkt_violation(fit.alpha[i], y[i], f, c), 1e-3) << i;
  }
  EXPECT_NEAR(balance, 0.0, 1e-8);
  EXPECT_LE(fit.violation, 1e-3);
}

TEST(Svm, DecisionDependsOnlyOnSupportVectors) {
  const auto data = blobs(2, 12, 2, 3.0, 8);
  std::vector<int> y;
  for (auto v : data.y) y.push_back(v ? 1 : -1);
  const Kernel kernel{KernelType::Linear, 1.0, 3};
  const auto full = svm_fit_binary(data.x, y, 1.0, kernel, 1e-8);
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (full.alpha[i] > 0.0) keep.push_back(static_cast<Eigen::Index>(i));
  ASSERT_LT(keep.size(), y.size());
  Matrix sub(static_cast<Eigen::Index>(keep.size()), 2);
  std::vector<int> sub_y;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    sub.row(static_cast<Eigen::Index>(r)) = data.x.row(keep[r]);
    sub_y.push_back(y[static_cast<std::size_t>(keep[r])]);
  }
  const auto reduced = svm_fit_binary(sub, sub_y, 1.0, kernel, 1e-8);
  for (double a = -3; a <= 6; a += 1.5)
    for (double b = -3; b <= 3; b += 1.5) EXPECT_NEAR(linear_f(full, a, b), linear_f(reduced, a, b), 1e-6);
}

TEST(Svm, IterationCapRaisesConvergenceError) {
  const auto data = blobs(2, 20, 2, 0.5, 9);
  std::vector<int> y;
  for (auto v : data.y) y.push_back(v ? 1 : -1);
  try {
    svm_fit_binary(data.x, y, 100.0, {KernelType::Rbf, 1.0, 3}, 1e-12, 0.01);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Convergence);
    EXPECT_GT(e.violation(), 1e-12);
  }
}

TEST(Svm, BinaryLabelsValidated) {
  const Matrix x = rows({{0}, {1}});
  EXPECT_THROW(svm_fit_binary(x, std::vector<int>{1, 2}, 1.0, {}), Error);
  EXPECT_THROW(svm_fit_binary(x, std::vector<int>{1, 1}, 1.0, {}), Error);
}

TEST(Svm, TwoClassMulticlassReducesToOneMachine) {
  const auto data = blobs(2, 10, 2, 2.0, 10);
  SvmParams params;
  params.gamma = 0.5;
  const auto multi = svm_fit_multiclass(params, data.x, data.y, 2);
  ASSERT_EQ(multi.machines.size(), 1u);
  std::vector<int> y;
  for (auto v : data.y) y.push_back(v ? 1 : -1);
  const auto binary = svm_fit_binary(data.x, y, params.c, {KernelType::Rbf, 0.5, 3});
  const auto model = fit(ClassifierSpec{params}, data.x, data.y, 2, 0);
  const auto scores = predict_scores(model, data.x);
  const auto pred = predict(model, data.x);
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const double f = binary.state.decision(data.x.row(i).data());
    EXPECT_NEAR(scores(i, 1), f, 1e-9);
    EXPECT_EQ(scores(i, 0), -scores(i, 1));
    EXPECT_EQ(pred[static_cast<std::size_t>(i)], f > 0 ? 1u : 0u);
  }
}

TEST(Svm, ThreeBlobsOneVsRest) {
  const auto data = blobs(3, 10, 2, 8.0, 11);
  const auto model = fit(ClassifierSpec::defaults(Kind::Svm), data.x, data.y, 3, 0);
  EXPECT_EQ(std::get<SvmModel>(model.state).machines.size(), 3u);
  EXPECT_EQ(accuracy(predict(model, data.x), data.y), 1.0);
}

TEST(Svm, ScaleGammaOnUnitVarianceFeatures) {
  Matrix x(8, 64);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = (i + j) % 2 ? 1.0 : -1.0;
  EXPECT_DOUBLE_EQ(resolve_gamma(SvmParams{}, x), 1.0 / 64.0);
  SvmParams fixed;
  fixed.gamma = 0.7;
  EXPECT_EQ(resolve_gamma(fixed, x), 0.7);
}

TEST(Svm, KernelFormulas) {
  const double a[2] = {1, 2}, b[2] = {3, -1};
  EXPECT_DOUBLE_EQ((Kernel{KernelType::Linear, 1, 3}(a, b, 2)), 1.0);
  EXPECT_DOUBLE_EQ((Kernel{KernelType::Rbf, 0.5, 3}(a, b, 2)), std::exp(-0.5 * 13.0));
  EXPECT_DOUBLE_EQ((Kernel{KernelType::Poly, 0.5, 2}(a, b, 2)), 2.25);
}

// ---------------------------------------------------------------- other kinds

TEST(GaussianNb, SymmetricTieGoesToClassZero) {
  const Matrix x = rows({{-1}, {-3}, {1}, {3}});
  const std::vector<std::uint32_t> y{0, 0, 1, 1};
  const auto model = fit(ClassifierSpec::defaults(Kind::GaussianNb), x, y, 2, 0);
  const auto scores = predict_scores(model, rows({{0}}));
  EXPECT_EQ(scores(0, 0), scores(0, 1));
  EXPECT_EQ(predict(model, rows({{0}}))[0], 0u);
}

TEST(GaussianNb, AffineRescalingKeepsPredictions) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto data = noise_data(15, 3, 3, 100 + trial);
    auto probe = noise_data(20, 3, 3, 200 + trial);
    const auto base = predict(fit(ClassifierSpec::defaults(Kind::GaussianNb), data.x, data.y, 3, 0), probe.x);
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double scale = uniform(rng, 0.2, 5.0) * (uniform01(rng) < 0.5 ? -1 : 1), shift = uniform(rng, -10, 10);
      data.x.col(j) = data.x.col(j).array() * scale + shift;
      probe.x.col(j) = probe.x.col(j).array() * scale + shift;
    }
    const auto moved = predict(fit(ClassifierSpec::defaults(Kind::GaussianNb), data.x, data.y, 3, 0), probe.x);
    EXPECT_EQ(base, moved) << trial;
  }
}

TEST(Logreg, SeparableOneDimensional) {
  const Matrix x = rows({{-2}, {-1.5}, {-1}, {-0.5}, {0.5}, {1}, {1.5}, {2}});
  const std::vector<std::uint32_t> y{0, 0, 0, 0, 1, 1, 1, 1};
  const LogregParams params{0.0, 0.5, 500};
  const auto model = logreg_fit(params, x, y, 2);
  ClassifierModel wrapped{2, 1, model};
  EXPECT_EQ(predict(wrapped, x), y);
  ASSERT_EQ(model.loss_history.size(), 501u);
  for (std::size_t t = 1; t < model.loss_history.size(); ++t)
    EXPECT_LE(model.loss_history[t], model.loss_history[t - 1] + 1e-15) << t;
}

TEST(Logreg, LossMonotoneBelowLipschitzStep) {
  const auto data = noise_data(40, 3, 4, 13);
  // Softmax loss Hessian is bounded by ½·mean‖[x,1]‖² (plus λ).
  double mean_sq = 0.0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) mean_sq += data.x.row(i).squaredNorm() + 1.0;
  mean_sq /= static_cast<double>(data.x.rows());
  const double l2 = 0.1;
  const LogregParams params{l2, 0.9 / (0.5 * mean_sq + l2), 300};
  const auto model = logreg_fit(params, data.x, data.y, 4);
  for (std::size_t t = 1; t < model.loss_history.size(); ++t)
    EXPECT_LE(model.loss_history[t], model.loss_history[t - 1] + 1e-12) << t;
}

TEST(Logreg, StrongPenaltyShrinksToPriors) {
  auto data = noise_data(40, 2, 2, 14);
  for (std::size_t i = 0; i < 30; ++i) data.y[i] = 0;
  for (std::size_t i = 30; i < 40; ++i) data.y[i] = 1;
  const LogregParams params{100.0, 0.005, 6000};
  const auto model = logreg_fit(params, data.x, data.y, 2);
  // Stationary point of mean cross-entropy + (l2/2)|W|^2, with small weights.
  Matrix grad_w = params.l2 * model.weights;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const Eigen::VectorXd z = model.weights * data.x.row(i).transpose() +
                              Eigen::Map<const Eigen::VectorXd>(model.bias.data(), 2);
    Eigen::VectorXd prob = (z.array() - z.maxCoeff()).exp();
    prob /= prob.sum();
    prob(data.y[static_cast<std::size_t>(i)]) -= 1.0;
    grad_w += prob * data.x.row(i) / static_cast<double>(data.x.rows());
  }
  EXPECT_LT(grad_w.norm(), 1e-6);
  EXPECT_LT(model.weights.norm(), 1e-2);
  const double p1 = 1.0 / (1.0 + std::exp(model.bias[0] - model.bias[1]));
  EXPECT_NEAR(p1, 0.25, 0.01);
}

TEST(Knn, ThreeNearestMajority) {
  const Matrix x = rows({{0}, {1}, {10}});
  const std::vector<std::uint32_t> y{0, 0, 1};
  const auto model = fit(ClassifierSpec::from_json(R"({"kind":"knn","k":3})"), x, y, 2, 0);
  EXPECT_EQ(predict(model, rows({{2}}))[0], 0u);
}

TEST(Knn, VoteTieResolvedByNearestNeighbour) {
  // k=3 over three classes: one vote each, nearest is class 2.
  const Matrix x = rows({{0}, {1}, {2}});
  const std::vector<std::uint32_t> y{0, 1, 2};
  const auto model = fit(ClassifierSpec::from_json(R"({"kind":"knn","k":3})"), x, y, 3, 0);
  EXPECT_EQ(predict(model, rows({{1.9}}))[0], 2u);
  EXPECT_EQ(predict(model, rows({{0.1}}))[0], 0u);
}

TEST(Knn, KLargerThanTrainingSetIsRejected) {
  const Matrix x = rows({{0}, {1}, {10}});
  const std::vector<std::uint32_t> y{0, 0, 1};
  EXPECT_THROW(fit(ClassifierSpec::from_json(R"({"kind":"knn","k":5})"), x, y, 2, 0), Error);
}

TEST(Tree, OneDimensionalSplitAtMidpoint) {
  const Matrix x = rows({{0}, {1}, {2}, {3}});
  const std::vector<std::uint32_t> y{0, 0, 1, 1};
  const auto model = tree_fit({}, x, y, 2);
  const auto& root = model.tree.nodes[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_DOUBLE_EQ(root.threshold, 1.5);
  EXPECT_TRUE(model.tree.nodes[root.left].is_leaf());
  EXPECT_TRUE(model.tree.nodes[root.right].is_leaf());
  EXPECT_EQ(model.tree.depth(), 1u);
}

TEST(Tree, PureDataIsASingleLeaf) {
  const Matrix x = rows({{0, 1}, {1, 5}, {2, 2}});
  const std::vector<std::uint32_t> y{1, 1, 1};
  const auto model = tree_fit({}, x, y, 2);
  EXPECT_EQ(model.tree.nodes.size(), 1u);
  EXPECT_EQ(model.tree.depth(), 0u);
}

TEST(Tree, ZeroDepthPredictsMajority) {
  const Matrix x = rows({{0}, {1}, {2}, {3}, {4}});
  const std::vector<std::uint32_t> y{1, 0, 1, 0, 1};
  TreeParams params;
  params.max_depth = 0;
  const auto model = fit(ClassifierSpec{params}, x, y, 2, 0);
  EXPECT_EQ(std::get<TreeModel>(model.state).tree.nodes.size(), 1u);
  EXPECT_EQ(predict(model, x), (std::vector<std::uint32_t>(5, 1)));
}

TEST(Tree, RootSplitMatchesExhaustiveEnumeration) {
  Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + uniform_index(rng, 27), d = 1 + uniform_index(rng, 3), k = 2 + uniform_index(rng, 2);
    std::vector<double> flat(n * d);
    // Coarse values force duplicates and ties.
    for (auto& v : flat) v = static_cast<double>(uniform_index(rng, 6));
    std::vector<std::uint32_t> y(n);
    for (auto& v : y) v = static_cast<std::uint32_t>(uniform_index(rng, k));
    y[0] = 0;
    y[1] = 1;
    const auto ref = oracle::exhaustive_root_split(flat, n, d, y, k);
    const Matrix x = Eigen::Map<const Matrix>(flat.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    TreeParams params;
    params.max_depth = 1;
    const auto model = tree_fit(params, x, y, k);
    const auto& root = model.tree.nodes[0];
    if (ref.feature < 0) {
      EXPECT_TRUE(root.is_leaf()) << trial;
      continue;
    }
    EXPECT_EQ(root.feature, ref.feature) << trial;
    EXPECT_DOUBLE_EQ(root.threshold, ref.threshold) << trial;
  }
}

TEST(Forest, SingleTreeWithoutSamplingEqualsTree) {
  const auto data = noise_data(40, 3, 3, 16);
  const auto probe = noise_data(50, 3, 3, 17);
  ForestParams fp;
  fp.n_trees = 1;
  fp.feature_subsample = 1.0;
  fp.bootstrap = false;
  const auto forest = fit(ClassifierSpec{fp}, data.x, data.y, 3, 4);
  const auto tree = fit(ClassifierSpec{TreeParams{}}, data.x, data.y, 3, 4);
  EXPECT_EQ(predict(forest, probe.x), predict(tree, probe.x));
}

TEST(Forest, SeedChangesBootstrap) {
  const auto data = noise_data(40, 3, 3, 18);
  ForestParams fp;
  fp.n_trees = 5;
  const auto a = encode_model(fit(ClassifierSpec{fp}, data.x, data.y, 3, 1));
  const auto b = encode_model(fit(ClassifierSpec{fp}, data.x, data.y, 3, 2));
  EXPECT_NE(a, b);
}

TEST(Adaboost, FirstLearnerBeatsChanceOnSeparableData) {
  const Matrix x = rows({{0}, {1}, {2}, {3}, {4}, {5}});
  const std::vector<std::uint32_t> y{0, 0, 0, 1, 1, 1};
  const auto model = adaboost_fit({}, x, y, 2);
  ASSERT_FALSE(model.errors.empty());
  EXPECT_LT(model.errors[0], 0.5);
  EXPECT_GT(model.alphas[0], 0.0);
  ClassifierModel wrapped{2, 1, model};
  EXPECT_EQ(predict(wrapped, x), y);
}

TEST(Adaboost, ChanceLevelFirstLearnerIsAnError) {
  const Matrix x = rows({{0}, {0}, {0}, {0}});
  const std::vector<std::uint32_t> y{0, 1, 0, 1};
  try {
    adaboost_fit({}, x, y, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Data);
  }
}

TEST(Gbt, ZeroShrinkagePredictsPriorArgmax) {
  auto data = noise_data(30, 2, 3, 19);
  for (std::size_t i = 0; i < 30; ++i) data.y[i] = i < 5 ? 0 : (i < 20 ? 2 : 1);
  GbtParams params;
  params.eta = 0.0;
  params.n_rounds = 5;
  const auto model = fit(ClassifierSpec{params}, data.x, data.y, 3, 0);
  const auto probe = noise_data(25, 2, 3, 20);
  EXPECT_EQ(predict(model, probe.x), (std::vector<std::uint32_t>(25, 2)));
}

TEST(Gbt, FitsThreeBlobs) {
  const auto data = blobs(3, 12, 2, 6.0, 21);
  const auto model = fit(ClassifierSpec::defaults(Kind::Gbt), data.x, data.y, 3, 0);
  EXPECT_EQ(accuracy(predict(model, data.x), data.y), 1.0);
}

TEST(Fit, AbsentClassIsNeverPredicted) {
  const auto data = blobs(2, 8, 2, 6.0, 22);
  // Labels 0 and 1 only, but three classes declared.
  const auto probe = noise_data(20, 2, 2, 23);
  for (const auto& spec : every_kind()) {
    const auto pred = predict(fit(spec, data.x, data.y, 3, 0), probe.x);
    for (auto p : pred) EXPECT_LT(p, 2u) << spec.to_json();
  }
}

// ---------------------------------------------------------------- serialization

TEST(Serialize, RoundTripIsBitExactForEveryKind) {
  const auto data = noise_data(30, 3, 3, 24);
  const auto probe = noise_data(20, 3, 3, 25);
  const auto dir = std::filesystem::temp_directory_path();
  for (const auto& spec : every_kind()) {
    const auto model = fit(spec, data.x, data.y, 3, 6);
    const auto bytes = encode_model(model);
    const auto back = decode_model(bytes);
    EXPECT_EQ(encode_model(back), bytes) << spec.to_json();
    EXPECT_EQ(back.kind(), model.kind());
    const Matrix a = predict_scores(model, probe.x), b = predict_scores(back, probe.x);
    EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())), 0)
        << spec.to_json();
    const auto path = (dir / ("artpipe_model_" + std::string(kind_name(spec.kind())) + ".artc")).string();
    save_model(path, model);
    EXPECT_EQ(encode_model(load_model(path)), bytes);
  }
}

TEST(Serialize, CorruptionIsAFormatError) {
  const auto data = noise_data(20, 2, 2, 26);
  for (const auto& spec : every_kind()) {
    const auto bytes = encode_model(fit(spec, data.x, data.y, 2, 0));
    auto expect_format = [&](std::vector<char> b, const char* what) {
      try {
        decode_model(b);
        ADD_FAILURE() << what << " " << spec.to_json();
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Format) << what << " " << e.what();
      }
    };
    auto magic = bytes;
    magic[1] = 'Z';
    expect_format(magic, "magic");
    auto cut = bytes;
    cut.pop_back();
    expect_format(cut, "truncated");
    auto extra = bytes;
    extra.push_back(1);
    expect_format(extra, "trailing");
    auto kind = bytes;
    kind[8] = 42;
    expect_format(kind, "kind");
  }
}

// ---------------------------------------------------------------- spec JSON

TEST(SpecJson, CanonicalRoundTrip) {
  for (const auto& spec : every_kind()) {
    const auto text = spec.to_json();
    EXPECT_EQ(ClassifierSpec::from_json(text).to_json(), text);
  }
  EXPECT_EQ(ClassifierSpec::from_json(R"({"kind":"svm"})").to_json(), ClassifierSpec::defaults(Kind::Svm).to_json());
  const auto svm = ClassifierSpec::from_json(R"({"kind":"svm","C":10,"gamma":0.1,"kernel":"poly","degree":2})");
  const auto& p = std::get<SvmParams>(svm.params);
  EXPECT_EQ(p.c, 10.0);
  EXPECT_EQ(p.gamma, 0.1);
  EXPECT_EQ(p.kernel, KernelType::Poly);
  EXPECT_EQ(p.degree, 2);
  EXPECT_NE(svm.to_json().find("\"gamma\":0.1"), std::string::npos);
  EXPECT_NE(ClassifierSpec::defaults(Kind::Svm).to_json().find("\"gamma\":\"scale\""), std::string::npos);
}

TEST(SpecJson, Errors) {
  for (const char* text : {"not json", "[]", R"({"C":1})", R"({"kind":"perceptron"})",
                           R"({"kind":"svm","C":-1})", R"({"kind":"svm","colour":1})", R"({"kind":"knn","k":4})",
                           R"({"kind":"knn","k":2.5})", R"({"kind":"svm","kernel":"sigmoid"})",
                           R"({"kind":"forest","feature_subsample":0})"}) {
    try {
      ClassifierSpec::from_json(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidArgument) << text;
    }
  }
}

TEST(SpecJson, KindNames) {
  for (const char* name : {"svm", "knn", "gaussian_nb", "logreg", "tree", "forest", "adaboost", "gbt"})
    EXPECT_EQ(kind_name(parse_kind(name)), name);
  EXPECT_THROW(parse_kind("svc"), Error);
}
