#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "classifiers/classifiers.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::tuning {

/// Stratified fold index per sample. Each class is shuffled (one Rng(seed),
/// classes in index order) and dealt round-robin; the dealing position
/// carries over from one class to the next so fold sizes differ by at most one.
std::vector<std::size_t> stratified_folds(std::span<const std::uint32_t> labels, std::size_t num_classes,
                                          std::size_t folds, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over folds
};

/// Validation accuracy of one fold given its train and validation indices.
using FoldEvaluator = std::function<double(std::span<const std::size_t> train, std::span<const std::size_t> val)>;

CvResult cross_validate(std::span<const std::size_t> fold_of, std::size_t folds, const FoldEvaluator& evaluate);

/// k-fold accuracy of `spec`; fold f fits with seed derive_seed(seed, f + 1).
/// Fit errors are rethrown with the fold index prepended.
CvResult cross_validate(const classifiers::ClassifierSpec& spec, const dataset::FeatureMatrix& data,
                        std::size_t folds, std::uint64_t seed);

struct Trial {
  std::size_t id = 0;
  std::string stage;  // "grid", "refine" or "random"
  classifiers::ClassifierSpec spec;
  CvResult cv;
  double seconds = 0.0;
};

struct SearchOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  bool gradual = false;  // grid only: refine around the coarse optimum
};

struct SearchResult {
  std::vector<Trial> trials;
  std::size_t best = 0;  // index of the highest mean; earliest trial wins ties
};

/// Search space JSON: an object {"kind": ..., "params": {name: value}} or an
/// array of such objects. In a grid, a list value enumerates candidates and a
/// scalar is fixed. Random search also accepts {"log_uniform": [lo, hi]},
/// {"uniform": [lo, hi]} and {"int_range": [lo, hi]} (inclusive).
SearchResult grid_search(std::string_view space_json, const dataset::FeatureMatrix& data,
                         const SearchOptions& options);
SearchResult random_search(std::string_view space_json, std::size_t budget, const dataset::FeatureMatrix& data,
                           const SearchOptions& options);

/// Scores one configuration; the overloads above run k-fold CV here.
using TrialRunner = std::function<CvResult(const classifiers::ClassifierSpec&)>;
SearchResult grid_search(std::string_view space_json, bool gradual, const TrialRunner& run);
SearchResult random_search(std::string_view space_json, std::size_t budget, std::uint64_t seed,
                           const TrialRunner& run);

/// Canonical spec JSON of every grid configuration in iteration order (the
/// last parameter, in key order, varies fastest).
std::vector<std::string> grid_configurations(std::string_view space_json);
/// `budget` independent draws, deterministic per seed.
std::vector<std::string> sample_configurations(std::string_view space_json, std::size_t budget, std::uint64_t seed);

/// Columns: trial_id,kind,params_json,fold_accuracies,mean,std,seconds.
/// Fold accuracies are ';'-separated. Without timing the seconds column is empty.
void write_trials_csv(const std::string& path, const SearchResult& result, bool include_timing);
std::string trials_csv(const SearchResult& result, bool include_timing);

// ---------------------------------------------------------------- evaluation

struct ClassMetrics {
  std::size_t support = 0;
  std::size_t predicted = 0;
  double precision = 0.0;  // 0 when the class is never predicted
  double recall = 0.0;     // 0 when the class has no support
};

struct ConfusedPair {
  std::size_t true_class = 0;
  std::size_t predicted_class = 0;
  std::size_t count = 0;
};

struct EvaluationReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<ClassMetrics> per_class;
  std::vector<ConfusedPair> confused_pairs;  // count descending, then (true, predicted) ascending
  std::vector<std::uint32_t> predictions;
  std::size_t total = 0;
  double accuracy = 0.0;
  double macro_precision = 0.0;  // over classes with support
  double macro_recall = 0.0;
};

EvaluationReport evaluate_predictions(std::span<const std::uint32_t> truth, std::span<const std::uint32_t> predicted,
                                      const std::vector<std::string>& class_names);
EvaluationReport evaluate(const classifiers::ClassifierModel& model, const dataset::FeatureMatrix& test);

/// report.csv: classifier,dataset,scope,class,support,precision,recall,accuracy
/// with one "overall" row followed by one "class" row per class.
void write_report_csv(const std::string& path, const EvaluationReport& report, std::string_view classifier,
                      std::string_view dataset);
/// confusion.csv: header "true\predicted" then class names; one row per true class.
void write_confusion_csv(const std::string& path, const EvaluationReport& report);
/// confused_pairs.csv: true_class,predicted_class,count,rate (rate = count / support).
void write_confused_pairs_csv(const std::string& path, const EvaluationReport& report);

}  // namespace artpipe::tuning
