#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <memory>
#include <unordered_map>

#include "classifiers/detail.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"

namespace artpipe::classifiers {

double Kernel::operator()(const double* a, const double* b, std::size_t d) const {
  switch (type) {
    case KernelType::Linear: {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
      return s;
    }
    case KernelType::Rbf: {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
      }
      return std::exp(-gamma * s);
    }
    case KernelType::Poly: {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
      return std::pow(gamma * s + 1.0, degree);
    }
  }
  return 0.0;
}

double SvmBinaryState::decision(const double* x) const {
  double f = bias;
  const auto d = static_cast<std::size_t>(support_vectors.cols());
  for (std::size_t s = 0; s < coef.size(); ++s) f += coef[s] * kernel(support_vectors.row(s).data(), x, d);
  return f;
}

double kkt_violation(double alpha, int y, double f, double c) {
  const double margin = y * f - 1.0;
  if (alpha <= 0.0) return std::max(0.0, -margin);
  if (alpha >= c) return std::max(0.0, margin);
  return std::abs(margin);
}

double resolve_gamma(const SvmParams& params, const Matrix& x) {
  if (params.gamma) return *params.gamma;
  if (x.size() == 0) return 1.0;
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

namespace {

constexpr std::size_t kFullKernelLimit = 4096;             // rows; n² doubles precomputed below this
constexpr std::size_t kCacheBytes = std::size_t{128} << 20;  // lazy row cache budget
constexpr double kTau = 1e-12;

// Kernel rows over the training set: a full precomputed matrix for small n,
// otherwise an LRU cache of computed rows.
class KernelSource {
 public:
  KernelSource(const Matrix& x, const Kernel& kernel) : x_(x), kernel_(kernel), n_(x.rows()) {
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_(x_.row(i).data(), x_.row(i).data(), x_.cols());
    if (n_ <= kFullKernelLimit) {
      full_ = Matrix(n_, n_);
      const Matrix gram = x_ * x_.transpose();
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) full_(i, j) = from_gram(gram, i, j);
    } else {
      capacity_ = std::max<std::size_t>(2, kCacheBytes / (n_ * sizeof(double)));
    }
  }

  bool is_full() const { return full_.size() > 0; }
  double diag(std::size_t i) const { return diag_[i]; }

  const double* row(std::size_t i) {
    if (is_full()) return full_.row(i).data();
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second.data();
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    std::vector<double> r(n_);
    for (std::size_t j = 0; j < n_; ++j) r[j] = kernel_(x_.row(i).data(), x_.row(j).data(), x_.cols());
    lru_.emplace_front(i, std::move(r));
    index_[i] = lru_.begin();
    return lru_.front().second.data();
  }

 private:
  double from_gram(const Matrix& gram, std::size_t i, std::size_t j) const {
    switch (kernel_.type) {
      case KernelType::Linear:
        return gram(i, j);
      case KernelType::Rbf:
        return std::exp(-kernel_.gamma * std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j)));
      case KernelType::Poly:
        return std::pow(kernel_.gamma * gram(i, j) + 1.0, kernel_.degree);
    }
    return 0.0;
  }

  const Matrix& x_;
  Kernel kernel_;
  std::size_t n_;
  std::vector<double> diag_;
  Matrix full_;
  std::size_t capacity_ = 0;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> index_;
};

SvmBinaryFit solve(KernelSource& kernel, const Matrix& x, std::span<const int> y, double c, const Kernel& kparams,
                   double tol, double max_iter_factor) {
  const std::size_t n = y.size();
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c; };

  const auto cap = static_cast<std::size_t>(std::max(1.0, max_iter_factor * static_cast<double>(n)));
  std::size_t iter = 0;
  double violation = std::numeric_limits<double>::infinity();
  double g_max = -std::numeric_limits<double>::infinity(), g_min = std::numeric_limits<double>::infinity();
  for (;; ++iter) {
    std::ptrdiff_t i = -1, j = -1;
    g_max = -std::numeric_limits<double>::infinity();
    g_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    violation = (i < 0 || j < 0) ? 0.0 : g_max - g_min;
    if (violation < tol) break;
    if (iter >= cap)
      throw ConvergenceError("SMO did not converge within " + std::to_string(cap) +
                                 " iterations; final KKT violation " + std::to_string(violation),
                             violation);

    // Second-order choice of j: largest guaranteed decrease of the dual objective.
    const auto a = static_cast<std::size_t>(i);
    const double* ka = kernel.row(a);
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (!in_low(t) || v >= g_max) continue;
      const double gap = g_max - v;
      double curv = kernel.diag(a) + kernel.diag(t) - 2.0 * ka[t];
      if (curv <= 0.0) curv = kTau;
      const double gain = gap * gap / curv;
      if (gain > best_gain) {
        best_gain = gain;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    const auto b = static_cast<std::size_t>(j);
    const double* kb = kernel.row(b);
    ka = kernel.row(a);
    const double qab = y[a] * y[b] * ka[b];
    const double old_a = alpha[a], old_b = alpha[b];
    if (y[a] != y[b]) {
      double quad = kernel.diag(a) + kernel.diag(b) + 2.0 * qab;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[a] - grad[b]) / quad;
      const double diff = alpha[a] - alpha[b];
      alpha[a] += delta;
      alpha[b] += delta;
      if (diff > 0.0) {
        if (alpha[b] < 0.0) {
          alpha[b] = 0.0;
          alpha[a] = diff;
        }
      } else if (alpha[a] < 0.0) {
        alpha[a] = 0.0;
        alpha[b] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[a] > c) {
          alpha[a] = c;
          alpha[b] = c - diff;
        }
      } else if (alpha[b] > c) {
        alpha[b] = c;
        alpha[a] = c + diff;
      }
    } else {
      double quad = kernel.diag(a) + kernel.diag(b) - 2.0 * qab;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[a] - grad[b]) / quad;
      const double sum = alpha[a] + alpha[b];
      alpha[a] -= delta;
      alpha[b] += delta;
      if (sum > c) {
        if (alpha[a] > c) {
          alpha[a] = c;
          alpha[b] = sum - c;
        }
      } else if (alpha[b] < 0.0) {
        alpha[b] = 0.0;
        alpha[a] = sum;
      }
      if (sum > c) {
        if (alpha[b] > c) {
          alpha[b] = c;
          alpha[a] = sum - c;
        }
      } else if (alpha[a] < 0.0) {
        alpha[a] = 0.0;
        alpha[b] = sum;
      }
    }
    const double da = (alpha[a] - old_a) * y[a], db = (alpha[b] - old_b) * y[b];
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ka[t] * da + kb[t] * db);
  }

  // Bias: mean of −y·G over free vectors, else the middle of [M, m].
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0 && alpha[t] < c) {
      free_sum += -y[t] * grad[t];
      ++free_count;
    }
  double bias;
  if (free_count > 0)
    bias = free_sum / static_cast<double>(free_count);
  else if (std::isfinite(g_max) && std::isfinite(g_min))
    bias = 0.5 * (g_max + g_min);
  else
    bias = std::isfinite(g_max) ? g_max : g_min;

  SvmBinaryFit fit;
  fit.alpha = alpha;
  fit.violation = violation;
  fit.iterations = iter;
  double objective = 0.0;
  for (std::size_t t = 0; t < n; ++t) objective += 0.5 * alpha[t] * (grad[t] - 1.0);
  fit.objective = objective;
  fit.state.kernel = kparams;
  fit.state.bias = bias;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0) fit.support_indices.push_back(t);
  fit.state.support_vectors = Matrix(fit.support_indices.size(), x.cols());
  for (std::size_t s = 0; s < fit.support_indices.size(); ++s) {
    fit.state.support_vectors.row(s) = x.row(fit.support_indices[s]);
    fit.state.coef.push_back(alpha[fit.support_indices[s]] * y[fit.support_indices[s]]);
  }
  return fit;
}

void check_binary_problem(const Matrix& x, std::span<const int> y, double c) {
  require(static_cast<std::size_t>(x.rows()) == y.size(), "svm: label count differs from row count");
  require(c > 0.0 && std::isfinite(c), "svm: C must be positive");
  bool pos = false, neg = false;
  for (int v : y) {
    require(v == 1 || v == -1, "svm: binary labels must be +1 or -1");
    (v > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) fail(ErrorCode::Data, "svm: binary problem needs both +1 and -1 labels");
}

}  // namespace

SvmBinaryFit svm_fit_binary(const Matrix& x, std::span<const int> y, double c, const Kernel& kernel, double tol,
                            double max_iter_factor) {
  check_binary_problem(x, y, c);
  require(tol > 0.0, "svm: tolerance must be positive");
  KernelSource source(x, kernel);
  return solve(source, x, y, c, kernel, tol, max_iter_factor);
}

SvmModel svm_fit_multiclass(const SvmParams& params, const Matrix& x, std::span<const std::uint32_t> y,
                            std::size_t num_classes) {
  Kernel kernel;
  kernel.type = params.kernel;
  kernel.degree = params.degree;
  kernel.gamma = resolve_gamma(params, x);
  require(kernel.gamma > 0.0 && std::isfinite(kernel.gamma), "svm: gamma must be positive");

  std::vector<bool> present(num_classes, false);
  for (auto label : y) present[label] = true;

  const std::size_t machines = num_classes == 2 ? 1 : num_classes;
  auto shared = std::make_unique<KernelSource>(x, kernel);
  const bool share = shared->is_full();

  SvmModel model;
  model.machines.resize(machines);
  parallel_for(machines, [&](std::size_t m) {
    const std::uint32_t positive = num_classes == 2 ? 1 : static_cast<std::uint32_t>(m);
    if (!present[positive]) {
      // No positive examples: the machine always votes "rest".
      model.machines[m].kernel = kernel;
      model.machines[m].support_vectors = Matrix(0, x.cols());
      model.machines[m].bias = -std::numeric_limits<double>::infinity();
      return;
    }
    std::vector<int> labels(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) labels[t] = y[t] == positive ? 1 : -1;
    check_binary_problem(x, labels, params.c);
    std::unique_ptr<KernelSource> own;
    KernelSource* source = shared.get();
    if (!share) {
      own = std::make_unique<KernelSource>(x, kernel);
      source = own.get();
    }
    model.machines[m] = solve(*source, x, labels, params.c, kernel, params.tol, params.max_iter_factor).state;
  });
  return model;
}

// One-vs-rest decision values; with two classes the single machine gives [-f, f].
Matrix detail::svm_scores(const SvmModel& model, const Matrix& x, std::size_t num_classes) {
  Matrix scores(x.rows(), static_cast<Eigen::Index>(num_classes));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (model.machines.size() == 1 && num_classes == 2) {
      const double f = model.machines[0].decision(x.row(r).data());
      scores(r, 0) = -f;
      scores(r, 1) = f;
      continue;
    }
    for (std::size_t m = 0; m < model.machines.size(); ++m)
      scores(r, static_cast<Eigen::Index>(m)) = model.machines[m].decision(x.row(r).data());
  }
  return scores;
}

}  // namespace artpipe::classifiers
