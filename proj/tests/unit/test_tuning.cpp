#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "tuning/tuning.hpp"

using namespace artpipe;
using namespace artpipe::tuning;
using artpipe::classifiers::ClassifierSpec;
using artpipe::dataset::FeatureMatrix;

namespace {

FeatureMatrix blob_features(std::size_t k, std::size_t per_class, double spacing, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix f;
  f.d = 2;
  for (std::size_t c = 0; c < k; ++c) {
    f.class_names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < per_class; ++i) {
      f.values.push_back(static_cast<float>(spacing * static_cast<double>(c) + uniform(rng, -1, 1)));
      f.values.push_back(static_cast<float>(uniform(rng, -1, 1)));
      f.labels.push_back(static_cast<std::uint32_t>(c));
    }
  }
  f.n = f.labels.size();
  return f;
}

// Checks partition and per-class balance of a fold assignment.
void expect_valid_folds(const std::vector<std::uint32_t>& labels, std::size_t k, std::size_t folds,
                        const std::vector<std::size_t>& fold_of) {
  ASSERT_EQ(fold_of.size(), labels.size());
  std::map<std::uint32_t, std::vector<std::size_t>> per_class;
  std::vector<std::size_t> sizes(folds, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ASSERT_LT(fold_of[i], folds);
    auto& counts = per_class[labels[i]];
    counts.resize(folds, 0);
    ++counts[fold_of[i]];
    ++sizes[fold_of[i]];
  }
  for (const auto& [label, counts] : per_class) {
    ASSERT_LT(label, k);
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    EXPECT_LE(*hi - *lo, 1u) << "class " << label;
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  EXPECT_LE(*hi - *lo, 1u);
}

}  // namespace

// ---------------------------------------------------------------- folds

TEST(Folds, TenBalancedSamplesGiveOnePerClassPerFold) {
  std::vector<std::uint32_t> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto fold_of = stratified_folds(labels, 2, 5, 3);
  for (std::size_t f = 0; f < 5; ++f) {
    std::size_t zeros = 0, ones = 0;
    for (std::size_t i = 0; i < 10; ++i)
      if (fold_of[i] == f) (labels[i] ? ones : zeros)++;
    EXPECT_EQ(zeros, 1u);
    EXPECT_EQ(ones, 1u);
  }
}

TEST(Folds, RandomMultisetsArePartitionedAndStratified) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + uniform_index(rng, 6);
    std::vector<std::uint32_t> labels;
    for (std::uint32_t c = 0; c < k; ++c)
      for (std::size_t i = 0, n = 5 + uniform_index(rng, 20); i < n; ++i) labels.push_back(c);
    std::shuffle(labels.begin(), labels.end(), rng);
    expect_valid_folds(labels, k, 5, stratified_folds(labels, k, 5, rng()));
  }
}

TEST(Folds, DeterministicPerSeed) {
  std::vector<std::uint32_t> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(static_cast<std::uint32_t>(i % 3));
  EXPECT_EQ(stratified_folds(labels, 3, 5, 1), stratified_folds(labels, 3, 5, 1));
  EXPECT_NE(stratified_folds(labels, 3, 5, 1), stratified_folds(labels, 3, 5, 2));
}

TEST(Folds, ClassSmallerThanFoldCountIsAnError) {
  std::vector<std::uint32_t> labels{0, 0, 0, 0, 0, 1, 1, 1};
  try {
    stratified_folds(labels, 2, 5, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Data);
  }
  EXPECT_THROW(stratified_folds(labels, 2, 1, 0), Error);
}

// ---------------------------------------------------------------- cross-validation

TEST(CrossValidate, TrainAndValidationNeverOverlap) {
  std::vector<std::uint32_t> labels;
  for (int i = 0; i < 47; ++i) labels.push_back(static_cast<std::uint32_t>(i % 4));
  const auto fold_of = stratified_folds(labels, 4, 5, 8);
  std::vector<std::set<std::size_t>> seen_val(5);
  std::mutex mu;
  const auto result = cross_validate(fold_of, 5, [&](auto train, auto val) {
    std::set<std::size_t> t(train.begin(), train.end());
    for (auto v : val) EXPECT_EQ(t.count(v), 0u);
    EXPECT_EQ(train.size() + val.size(), labels.size());
    std::lock_guard lock(mu);
    seen_val[fold_of[val[0]]] = std::set<std::size_t>(val.begin(), val.end());
    return 0.5;
  });
  std::set<std::size_t> all;
  for (const auto& s : seen_val) all.insert(s.begin(), s.end());
  EXPECT_EQ(all.size(), labels.size());
  EXPECT_EQ(result.fold_accuracies.size(), 5u);
  EXPECT_DOUBLE_EQ(result.mean, 0.5);
  EXPECT_DOUBLE_EQ(result.std, 0.0);
}

TEST(CrossValidate, MajorityBaselineOnEightyTwentyData) {
  std::vector<std::uint32_t> labels(100, 0);
  for (int i = 0; i < 20; ++i) labels[static_cast<std::size_t>(i * 5)] = 1;
  const auto fold_of = stratified_folds(labels, 2, 5, 2);
  const auto result = cross_validate(fold_of, 5, [&](auto train, auto val) {
    std::size_t ones = 0;
    for (auto i : train) ones += labels[i];
    const std::uint32_t majority = 2 * ones > train.size() ? 1 : 0;
    std::size_t hit = 0;
    for (auto i : val) hit += labels[i] == majority;
    return static_cast<double>(hit) / static_cast<double>(val.size());
  });
  EXPECT_NEAR(result.mean, 0.8, 1e-12);
  for (double a : result.fold_accuracies) EXPECT_NEAR(a, 0.8, 1e-12);
}

TEST(CrossValidate, MeanAndPopulationStd) {
  std::vector<std::size_t> fold_of{0, 1, 2, 3};
  const std::vector<double> acc{0.5, 1.0, 0.75, 0.25};
  const auto result = cross_validate(fold_of, 4, [&](auto, auto val) { return acc[val[0]]; });
  EXPECT_EQ(result.fold_accuracies, acc);
  EXPECT_DOUBLE_EQ(result.mean, 0.625);
  EXPECT_DOUBLE_EQ(result.std, std::sqrt(0.078125));
}

TEST(CrossValidate, DuplicatedDataGivesPerfectOneNearestNeighbour) {
  // Random labels on random points, each row stored twice. Folds are built on
  // the distinct rows and twins are sent to different folds, so every
  // validation point has its exact copy in the training part.
  Rng rng(4);
  const std::size_t distinct = 40;
  FeatureMatrix f;
  f.d = 3;
  f.class_names = {"a", "b", "c"};
  for (std::size_t i = 0; i < distinct; ++i) {
    for (std::size_t j = 0; j < f.d; ++j) f.values.push_back(static_cast<float>(uniform(rng, -1, 1)));
    f.labels.push_back(static_cast<std::uint32_t>(uniform_index(rng, 3)));
  }
  f.labels[0] = 0, f.labels[1] = 1, f.labels[2] = 2;
  FeatureMatrix twice = f;
  twice.values.insert(twice.values.end(), f.values.begin(), f.values.end());
  twice.labels.insert(twice.labels.end(), f.labels.begin(), f.labels.end());
  twice.n = 2 * distinct;
  std::vector<std::size_t> fold_of(twice.n);
  for (std::size_t i = 0; i < distinct; ++i) {
    fold_of[i] = i % 5;
    fold_of[i + distinct] = (i + 1) % 5;
  }
  const auto spec = ClassifierSpec::from_json(R"({"kind":"knn","k":1})");
  const auto result = cross_validate(fold_of, 5, [&](auto train, auto val) {
    const auto tr = twice.subset(train);
    const auto model = classifiers::fit(spec, tr, 0);
    const auto va = twice.subset(val);
    const auto pred = classifiers::predict(model, classifiers::to_matrix(va));
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == va.labels[i];
    return static_cast<double>(hit) / static_cast<double>(pred.size());
  });
  EXPECT_DOUBLE_EQ(result.mean, 1.0);
}

TEST(CrossValidate, DeterministicPerSeed) {
  const auto f = blob_features(3, 15, 1.0, 5);
  const auto spec = ClassifierSpec::from_json(R"({"kind":"forest","n_trees":5})");
  const auto a = cross_validate(spec, f, 5, 11);
  const auto b = cross_validate(spec, f, 5, 11);
  EXPECT_EQ(a.fold_accuracies, b.fold_accuracies);
}

TEST(CrossValidate, FitErrorsNameTheFold) {
  const auto f = blob_features(2, 5, 3.0, 6);
  // Each training part has 8 points, so k=9 cannot be satisfied.
  const auto spec = ClassifierSpec::from_json(R"({"kind":"knn","k":9})");
  try {
    cross_validate(spec, f, 5, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("fold 0"), std::string::npos) << e.what();
  }
}

// ---------------------------------------------------------------- grid search

TEST(Grid, ProductSizeIsEighteen) {
  const char* space = R"({"kind":"svm","params":{"C":[0.1,1,10],"gamma":[0.01,0.1,1],"kernel":["linear","rbf"]}})";
  EXPECT_EQ(grid_configurations(space).size(), 18u);
  std::size_t calls = 0;
  const auto result = grid_search(space, false, [&](const ClassifierSpec&) {
    ++calls;
    return CvResult{{0.5}, 0.5, 0.0};
  });
  EXPECT_EQ(calls, 18u);
  EXPECT_EQ(result.trials.size(), 18u);
  EXPECT_EQ(result.best, 0u);
}

TEST(Grid, LastKeyVariesFastest) {
  const auto configs = grid_configurations(R"({"kind":"svm","params":{"C":[1,2],"kernel":["linear","rbf"]}})");
  ASSERT_EQ(configs.size(), 4u);
  EXPECT_NE(configs[0].find("\"C\":1.0"), std::string::npos) << configs[0];
  EXPECT_NE(configs[0].find("linear"), std::string::npos);
  EXPECT_NE(configs[1].find("\"C\":1.0"), std::string::npos);
  EXPECT_NE(configs[1].find("rbf"), std::string::npos);
}

TEST(Grid, MonotoneScoreReturnsExtremalValue) {
  const auto result = grid_search(R"({"kind":"svm","params":{"C":[0.1,1,10,100]}})", false,
                                  [](const ClassifierSpec& s) {
                                    const double c = std::get<classifiers::SvmParams>(s.params).c;
                                    return CvResult{{c}, std::log10(c), 0.0};
                                  });
  EXPECT_EQ(std::get<classifiers::SvmParams>(result.trials[result.best].spec.params).c, 100.0);
}

TEST(Grid, BestMeanDominatesAndEarliestWinsTies) {
  const auto f = blob_features(3, 10, 1.5, 7);
  const auto result = grid_search(R"({"kind":"knn","params":{"k":[1,3,5,7]}})", f, {});
  for (const auto& t : result.trials) EXPECT_GE(result.trials[result.best].cv.mean, t.cv.mean);
  for (std::size_t i = 0; i < result.best; ++i) EXPECT_LT(result.trials[i].cv.mean, result.trials[result.best].cv.mean);
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    EXPECT_EQ(result.trials[i].id, i);
    EXPECT_EQ(result.trials[i].stage, "grid");
  }
}

TEST(Grid, GradualRefinementStaysInsideNeighbourWindow) {
  // Peak near C = 3.
  auto score = [](const ClassifierSpec& s) {
    const double c = std::get<classifiers::SvmParams>(s.params).c;
    const double m = 1.0 - 0.1 * std::abs(std::log10(c) - std::log10(3.0));
    return CvResult{{m}, m, 0.0};
  };
  const auto result = grid_search(R"({"kind":"svm","params":{"C":[0.1,1,10]}})", true, score);
  std::size_t refined = 0;
  for (const auto& t : result.trials) {
    if (t.stage != "refine") continue;
    ++refined;
    const double c = std::get<classifiers::SvmParams>(t.spec.params).c;
    EXPECT_GE(c, 1.0);
    EXPECT_LE(c, 10.0);
  }
  EXPECT_GT(refined, 0u);
  const double best_c = std::get<classifiers::SvmParams>(result.trials[result.best].spec.params).c;
  EXPECT_GT(best_c, 1.0);
  EXPECT_LT(best_c, 10.0);
  // Coarse points are not repeated.
  std::set<std::string> seen;
  for (const auto& t : result.trials) EXPECT_TRUE(seen.insert(t.spec.to_json()).second);
}

TEST(Grid, SpaceErrors) {
  for (const char* bad : {"nope", R"({"kind":"svm","params":{"C":[]}})", R"({"kind":"svm","extra":1})",
                          R"({"kind":"svm","params":{"C":{"log_uniform":[1,10]}}})",
                          R"({"kind":"svm","params":{"bogus":[1]}})"})
    EXPECT_THROW(grid_configurations(bad), Error) << bad;
}

TEST(Grid, ArrayOfSpacesConcatenates) {
  const auto configs = grid_configurations(
      R"([{"kind":"svm","params":{"C":[1,10]}},{"kind":"knn","params":{"k":[1,3,5]}}])");
  EXPECT_EQ(configs.size(), 5u);
}

// ---------------------------------------------------------------- random search

TEST(Random, BudgetOneIsTheBest) {
  std::size_t calls = 0;
  const auto result = random_search(R"({"kind":"svm","params":{"C":{"log_uniform":[0.01,100]}}})", 1, 3,
                                    [&](const ClassifierSpec&) {
                                      ++calls;
                                      return CvResult{{0.3}, 0.3, 0.0};
                                    });
  EXPECT_EQ(calls, 1u);
  ASSERT_EQ(result.trials.size(), 1u);
  EXPECT_EQ(result.best, 0u);
  EXPECT_EQ(result.trials[0].stage, "random");
}

TEST(Random, LogUniformMedianNearOne) {
  const auto configs = sample_configurations(R"({"kind":"svm","params":{"C":{"log_uniform":[0.001,1000]}}})", 10000, 4);
  std::vector<double> values;
  for (const auto& c : configs) values.push_back(nlohmann::json::parse(c)["C"].get<double>());
  std::nth_element(values.begin(), values.begin() + 5000, values.end());
  EXPECT_GE(values[5000], 0.5);
  EXPECT_LE(values[5000], 2.0);
  for (double v : values) {
    EXPECT_GE(v, 0.001);
    EXPECT_LE(v, 1000.0);
  }
}

TEST(Random, IntRangeAndUniformStayInBounds) {
  const auto configs = sample_configurations(
      R"({"kind":"forest","params":{"n_trees":{"int_range":[2,4]},"feature_subsample":{"uniform":[0.2,0.4]}}})", 300, 1);
  std::set<std::size_t> trees;
  for (const auto& c : configs) {
    const auto j = nlohmann::json::parse(c);
    trees.insert(j["n_trees"].get<std::size_t>());
    EXPECT_GE(j["feature_subsample"].get<double>(), 0.2);
    EXPECT_LE(j["feature_subsample"].get<double>(), 0.4);
  }
  EXPECT_EQ(trees, (std::set<std::size_t>{2, 3, 4}));
}

TEST(Random, SameSeedSameSequence) {
  const char* space = R"({"kind":"svm","params":{"C":{"log_uniform":[0.01,100]},"gamma":[0.1,1]}})";
  EXPECT_EQ(sample_configurations(space, 20, 9), sample_configurations(space, 20, 9));
  EXPECT_NE(sample_configurations(space, 20, 9), sample_configurations(space, 20, 10));
}

// ---------------------------------------------------------------- trial log

TEST(TrialLog, ParsesBackAndRecomputesStatistics) {
  const auto f = blob_features(2, 10, 2.0, 8);
  const auto result = grid_search(R"({"kind":"svm","params":{"C":[0.1,1],"kernel":["linear","rbf"]}})", f, {});
  const auto text = trials_csv(result, false);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "trial_id,kind,params_json,fold_accuracies,mean,std,seconds");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto fields = csv::split_record(line);
    ASSERT_EQ(fields.size(), 7u) << line;
    EXPECT_EQ(fields[0], std::to_string(row));
    EXPECT_EQ(fields[1], "svm");
    EXPECT_EQ(ClassifierSpec::from_json(fields[2]).to_json(), result.trials[row].spec.to_json());
    std::vector<double> folds;
    std::stringstream parts(fields[3]);
    for (std::string p; std::getline(parts, p, ';');) folds.push_back(std::stod(p));
    ASSERT_EQ(folds.size(), 5u);
    double mean = 0.0;
    for (double a : folds) mean += a / 5.0;
    double var = 0.0;
    for (double a : folds) var += (a - mean) * (a - mean) / 5.0;
    EXPECT_NEAR(std::stod(fields[4]), mean, 1e-12);
    EXPECT_NEAR(std::stod(fields[5]), std::sqrt(var), 1e-12);
    EXPECT_TRUE(fields[6].empty());
    ++row;
  }
  EXPECT_EQ(row, 4u);
  EXPECT_EQ(trials_csv(result, false), text);
  EXPECT_NE(trials_csv(result, true), text);
}

// ---------------------------------------------------------------- evaluation

TEST(Evaluate, PerfectPredictionsAreDiagonal) {
  const std::vector<std::uint32_t> y{0, 1, 2, 2, 1, 0};
  const auto r = evaluate_predictions(y, y, {"a", "b", "c"});
  EXPECT_EQ(r.accuracy, 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(r.confusion[i][j], i == j ? 2u : 0u);
  EXPECT_TRUE(r.confused_pairs.empty());
  EXPECT_EQ(r.macro_precision, 1.0);
  EXPECT_EQ(r.macro_recall, 1.0);
}

TEST(Evaluate, ConstantPredictorHasOneColumn) {
  const std::vector<std::uint32_t> y{0, 0, 0, 1, 2};
  const std::vector<std::uint32_t> p(5, 0);
  const auto r = evaluate_predictions(y, p, {"a", "b", "c"});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 1; j < 3; ++j) EXPECT_EQ(r.confusion[i][j], 0u);
  EXPECT_EQ(r.per_class[1].precision, 0.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 0.6);
  EXPECT_EQ(r.per_class[0].recall, 1.0);
}

TEST(Evaluate, TraceOverTotalAndPairOrder) {
  Rng rng(9);
  std::vector<std::uint32_t> y(200), p(200);
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = static_cast<std::uint32_t>(uniform_index(rng, 4));
    p[i] = uniform01(rng) < 0.6 ? y[i] : static_cast<std::uint32_t>(uniform_index(rng, 4));
  }
  const auto r = evaluate_predictions(y, p, {"a", "b", "c", "d"});
  std::size_t trace = 0, total = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      total += r.confusion[i][j];
      if (i == j) trace += r.confusion[i][j];
    }
  EXPECT_EQ(total, 200u);
  EXPECT_EQ(r.accuracy, static_cast<double>(trace) / static_cast<double>(total));
  for (std::size_t k = 1; k < r.confused_pairs.size(); ++k) {
    const auto& a = r.confused_pairs[k - 1];
    const auto& b = r.confused_pairs[k];
    EXPECT_TRUE(a.count > b.count ||
                (a.count == b.count && std::pair(a.true_class, a.predicted_class) < std::pair(b.true_class, b.predicted_class)));
    EXPECT_NE(b.true_class, b.predicted_class);
  }
}

TEST(Evaluate, MirroredConfusionBetweenTwoPainters) {
  // Two painters swapped with each other more than with anyone else.
  const std::vector<std::string> names{"Boris Kustodiev", "Claude Monet", "Ilya Repin"};
  const std::vector<std::uint32_t> y{0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2};
  const std::vector<std::uint32_t> p{0, 2, 2, 0, 1, 1, 0, 2, 0, 2, 2};
  const auto r = evaluate_predictions(y, p, names);
  ASSERT_GE(r.confused_pairs.size(), 2u);
  EXPECT_EQ(r.confused_pairs[0].true_class, 0u);
  EXPECT_EQ(r.confused_pairs[0].predicted_class, 2u);
  EXPECT_EQ(r.confused_pairs[0].count, 2u);
}

TEST(Evaluate, EmptyAndMismatchedInputs) {
  const std::vector<std::uint32_t> none;
  EXPECT_THROW(evaluate_predictions(none, none, {"a"}), Error);
  const std::vector<std::uint32_t> y{0, 1}, p{0};
  EXPECT_THROW(evaluate_predictions(y, p, {"a", "b"}), Error);
}

TEST(Evaluate, ReportFiles) {
  const std::vector<std::uint32_t> y{0, 1, 1}, p{0, 0, 1};
  const auto r = evaluate_predictions(y, p, {"x,y", "z"});
  const auto dir = std::filesystem::temp_directory_path() / "artpipe_eval_files";
  std::filesystem::create_directories(dir);
  write_report_csv((dir / "report.csv").string(), r, "svm", "synthetic");
  write_confusion_csv((dir / "confusion.csv").string(), r);
  write_confused_pairs_csv((dir / "pairs.csv").string(), r);
  auto lines = [](const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  };
  const auto report = lines(dir / "report.csv");
  ASSERT_EQ(report.size(), 4u);
  EXPECT_EQ(report[0], "classifier,dataset,scope,class,support,precision,recall,accuracy");
  EXPECT_EQ(csv::split_record(report[2])[3], "x,y");
  const auto confusion = lines(dir / "confusion.csv");
  ASSERT_EQ(confusion.size(), 3u);
  EXPECT_EQ(confusion[0], "true\\predicted,\"x,y\",z");
  const auto pairs = lines(dir / "pairs.csv");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], "true_class,predicted_class,count,rate");
  EXPECT_EQ(csv::split_record(pairs[1])[3], "0.5");
}
