#include <algorithm>

#include "common/binary_io.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "tuning/tuning.hpp"

namespace artpipe::tuning {

EvaluationReport evaluate_predictions(std::span<const std::uint32_t> truth, std::span<const std::uint32_t> predicted,
                                      const std::vector<std::string>& class_names) {
  require(truth.size() == predicted.size(), "evaluate: prediction count differs from label count");
  if (truth.empty()) fail(ErrorCode::Data, "evaluate: test set is empty");
  const auto k = class_names.size();
  EvaluationReport report;
  report.class_names = class_names;
  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  report.predictions.assign(predicted.begin(), predicted.end());
  report.total = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] < k && predicted[i] < k, "evaluate: class index out of range");
    ++report.confusion[truth[i]][predicted[i]];
    correct += truth[i] == predicted[i];
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(report.total);

  report.per_class.resize(k);
  std::size_t with_support = 0;
  for (std::size_t c = 0; c < k; ++c) {
    auto& m = report.per_class[c];
    for (std::size_t j = 0; j < k; ++j) {
      m.support += report.confusion[c][j];
      m.predicted += report.confusion[j][c];
    }
    const auto hit = static_cast<double>(report.confusion[c][c]);
    m.precision = m.predicted ? hit / static_cast<double>(m.predicted) : 0.0;
    m.recall = m.support ? hit / static_cast<double>(m.support) : 0.0;
    if (m.support) {
      report.macro_precision += m.precision;
      report.macro_recall += m.recall;
      ++with_support;
    }
  }
  report.macro_precision /= static_cast<double>(with_support);
  report.macro_recall /= static_cast<double>(with_support);

  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && report.confusion[i][j] > 0) report.confused_pairs.push_back({i, j, report.confusion[i][j]});
  std::stable_sort(report.confused_pairs.begin(), report.confused_pairs.end(),
                   [](const ConfusedPair& a, const ConfusedPair& b) { return a.count > b.count; });
  return report;
}

EvaluationReport evaluate(const classifiers::ClassifierModel& model, const dataset::FeatureMatrix& test) {
  if (test.n == 0) fail(ErrorCode::Data, "evaluate: test set is empty");
  test.validate();
  require(test.class_names.size() == model.num_classes,
          "evaluate: test set has " + std::to_string(test.class_names.size()) + " classes, model has " +
              std::to_string(model.num_classes));
  const auto predicted = classifiers::predict(model, classifiers::to_matrix(test));
  return evaluate_predictions(test.labels, predicted, test.class_names);
}

void write_report_csv(const std::string& path, const EvaluationReport& report, std::string_view classifier,
                      std::string_view dataset) {
  using csv::format_number;
  std::string out = "classifier,dataset,scope,class,support,precision,recall,accuracy\n";
  const std::string c(classifier), d(dataset);
  out += csv::join({c, d, "overall", "", std::to_string(report.total), format_number(report.macro_precision),
                    format_number(report.macro_recall), format_number(report.accuracy)}) +
         '\n';
  for (std::size_t k = 0; k < report.class_names.size(); ++k) {
    const auto& m = report.per_class[k];
    out += csv::join({c, d, "class", report.class_names[k], std::to_string(m.support), format_number(m.precision),
                      format_number(m.recall), format_number(m.recall)}) +
           '\n';
  }
  write_file(path, out);
}

void write_confusion_csv(const std::string& path, const EvaluationReport& report) {
  std::vector<std::string> header{"true\\predicted"};
  header.insert(header.end(), report.class_names.begin(), report.class_names.end());
  std::string out = csv::join(header) + '\n';
  for (std::size_t i = 0; i < report.class_names.size(); ++i) {
    std::vector<std::string> row{report.class_names[i]};
    for (auto count : report.confusion[i]) row.push_back(std::to_string(count));
    out += csv::join(row) + '\n';
  }
  write_file(path, out);
}

void write_confused_pairs_csv(const std::string& path, const EvaluationReport& report) {
  std::string out = "true_class,predicted_class,count,rate\n";
  for (const auto& p : report.confused_pairs) {
    const double rate = static_cast<double>(p.count) / static_cast<double>(report.per_class[p.true_class].support);
    out += csv::join({report.class_names[p.true_class], report.class_names[p.predicted_class],
                      std::to_string(p.count), csv::format_number(rate)}) +
           '\n';
  }
  write_file(path, out);
}

}  // namespace artpipe::tuning
