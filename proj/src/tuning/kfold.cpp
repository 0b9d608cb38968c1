#include "common/error.hpp"
#include "common/rng.hpp"
#include "tuning/tuning.hpp"

namespace artpipe::tuning {

std::vector<std::size_t> stratified_folds(std::span<const std::uint32_t> labels, std::size_t num_classes,
                                          std::size_t folds, std::uint64_t seed) {
  require(folds >= 2, "folds must be at least 2");
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] < num_classes, "label " + std::to_string(labels[i]) + " out of range");
    members[labels[i]].push_back(i);
  }
  for (std::size_t c = 0; c < num_classes; ++c)
    if (!members[c].empty() && members[c].size() < folds)
      fail(ErrorCode::Data, "class " + std::to_string(c) + " has " + std::to_string(members[c].size()) +
                                " samples, fewer than " + std::to_string(folds) + " folds");

  Rng rng(seed);
  std::vector<std::size_t> fold_of(labels.size());
  std::size_t position = 0;
  for (auto& group : members) {
    shuffle(group.begin(), group.end(), rng);
    for (auto index : group) fold_of[index] = position++ % folds;
  }
  return fold_of;
}

}  // namespace artpipe::tuning
