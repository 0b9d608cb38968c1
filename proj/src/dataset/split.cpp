#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::dataset {

void SplitSpec::validate() const {
  for (double f : {train_fraction, val_fraction, test_fraction})
    require(f > 0.0 && f < 1.0, "split fractions must lie in (0, 1)");
  require(std::abs(train_fraction + val_fraction + test_fraction - 1.0) <= 1e-9, "split fractions must sum to 1");
}

SplitCounts allocate_split(std::size_t count, const SplitSpec& spec) {
  const double quota[3] = {count * spec.train_fraction, count * spec.val_fraction, count * spec.test_fraction};
  std::size_t alloc[3];
  double remainder[3];
  std::size_t assigned = 0;
  for (int p = 0; p < 3; ++p) {
    alloc[p] = static_cast<std::size_t>(std::floor(quota[p]));
    remainder[p] = quota[p] - static_cast<double>(alloc[p]);
    assigned += alloc[p];
  }
  int order[3] = {0, 1, 2};
  std::stable_sort(order, order + 3, [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) ++alloc[order[k % 3]];
  return {alloc[0], alloc[1], alloc[2]};
}

std::vector<SplitPart> assign_split(std::span<const std::uint32_t> labels, std::size_t class_count,
                                    const SplitSpec& spec) {
  spec.validate();
  std::vector<std::vector<std::size_t>> members(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] < class_count, "label out of range");
    members[labels[i]].push_back(i);
  }
  Rng rng(spec.seed);
  std::vector<SplitPart> parts(labels.size(), SplitPart::Train);
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& idx = members[c];
    require(idx.size() >= 3, "class " + std::to_string(c) + " has fewer than 3 images; cannot split");
    shuffle(idx.begin(), idx.end(), rng);
    const auto counts = allocate_split(idx.size(), spec);
    for (std::size_t k = counts.train; k < counts.train + counts.val; ++k) parts[idx[k]] = SplitPart::Val;
    for (std::size_t k = counts.train + counts.val; k < idx.size(); ++k) parts[idx[k]] = SplitPart::Test;
  }
  return parts;
}

Splits stratified_split(const ImageSet& set, const SplitSpec& spec) {
  set.validate();
  Splits out;
  out.assignment = assign_split(set.labels, set.class_names.size(), spec);
  std::vector<std::size_t> idx[3];
  for (std::size_t i = 0; i < out.assignment.size(); ++i)
    idx[static_cast<int>(out.assignment[i])].push_back(i);
  out.train = set.subset(idx[0]);
  out.val = set.subset(idx[1]);
  out.test = set.subset(idx[2]);
  return out;
}

}  // namespace artpipe::dataset
