#include <algorithm>
#include <cmath>

#include "backbone/backbone.hpp"
#include "common/error.hpp"

namespace artpipe::backbone {

std::vector<double> softmax_rows(std::span<const double> logits, std::size_t k) {
  require(k > 0 && logits.size() % k == 0, "softmax: logits are not n×K");
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < logits.size() / k; ++i) {
    const double* z = logits.data() + i * k;
    const double top = *std::max_element(z, z + k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += p[i * k + j] = std::exp(z[j] - top);
    for (std::size_t j = 0; j < k; ++j) p[i * k + j] /= sum;
  }
  return p;
}

LossResult label_smoothing_loss(std::span<const double> logits, std::span<const std::uint32_t> labels,
                                std::size_t k, double epsilon) {
  require(epsilon >= 0.0 && epsilon < 1.0, "label smoothing must lie in [0, 1)");
  require(k >= 1 && logits.size() == labels.size() * k, "loss: logits are not n×K");
  const std::size_t n = labels.size();
  LossResult out;
  out.grad_logits.assign(logits.size(), 0.0);
  if (n == 0) return out;
  const double off = epsilon / static_cast<double>(k);
  const double on = 1.0 - epsilon + off;
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= k) fail(ErrorCode::InvalidArgument, "label " + std::to_string(labels[i]) + " >= K at row " +
                                                             std::to_string(i));
    const double* z = logits.data() + i * k;
    const double top = *std::max_element(z, z + k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += std::exp(z[j] - top);
    const double log_norm = top + std::log(sum);
    // -Σ q_j log p_j = logsumexp(z) - Σ q_j z_j, since Σ q_j = 1.
    double dot = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double q = j == labels[i] ? on : off;
      dot += q * z[j];
      out.grad_logits[i * k + j] = (std::exp(z[j] - log_norm) - q) * inv_n;
    }
    total += log_norm - dot;
  }
  out.loss = total * inv_n;
  return out;
}

}  // namespace artpipe::backbone
