#pragma once

// Brute-force reference implementations used to check the library. They are
// written independently of the library code and favour clarity over speed.

#include <cstdint>
#include <vector>

namespace oracle {

struct DualSolution {
  std::vector<double> alpha;
  double objective = 0.0;  // ½ αᵀQα − Σα
};

/// Soft-margin SVM dual by accelerated projected gradient. The projection
/// onto {0 ≤ α ≤ C, yᵀα = 0} is found by bisection on the multiplier of the
/// equality constraint. `kernel` is the n×n Gram matrix, row-major.
DualSolution svm_dual(const std::vector<double>& kernel, const std::vector<int>& y, double c);

std::vector<double> gram_linear(const std::vector<double>& x, std::size_t n, std::size_t d);
std::vector<double> gram_rbf(const std::vector<double>& x, std::size_t n, std::size_t d, double gamma);

struct RootSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini
};

/// Tries every feature and every midpoint between consecutive distinct
/// values; lowest weighted child Gini wins, ties to the lower feature then
/// the lower threshold.
RootSplit exhaustive_root_split(const std::vector<double>& x, std::size_t n, std::size_t d,
                                const std::vector<std::uint32_t>& y, std::size_t num_classes);

}  // namespace oracle
