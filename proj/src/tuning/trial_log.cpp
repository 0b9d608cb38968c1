#include "common/binary_io.hpp"
#include "common/csv.hpp"
#include "tuning/tuning.hpp"

namespace artpipe::tuning {

std::string trials_csv(const SearchResult& result, bool include_timing) {
  std::string out = "trial_id,kind,params_json,fold_accuracies,mean,std,seconds\n";
  for (const auto& t : result.trials) {
    std::string folds;
    for (std::size_t f = 0; f < t.cv.fold_accuracies.size(); ++f) {
      if (f) folds += ';';
      folds += csv::format_number(t.cv.fold_accuracies[f]);
    }
    out += csv::join({std::to_string(t.id), std::string(classifiers::kind_name(t.spec.kind())), t.spec.to_json(),
                      folds, csv::format_number(t.cv.mean), csv::format_number(t.cv.std),
                      include_timing ? csv::format_number(t.seconds) : std::string()});
    out += '\n';
  }
  return out;
}

void write_trials_csv(const std::string& path, const SearchResult& result, bool include_timing) {
  const auto text = trials_csv(result, include_timing);
  write_file(path, text);
}

}  // namespace artpipe::tuning
