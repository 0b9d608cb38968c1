#include <algorithm>
#include <cmath>

#include "backbone/backbone.hpp"
#include "backbone/network.hpp"
#include "common/error.hpp"

namespace artpipe::backbone {

namespace {

constexpr double kRelativeFloor = 1e-8;
constexpr int kMaxStepReductions = 4;

// Which side of every ReLU and pooling switch each unit sits on; central
// differences are only meaningful while this pattern stays fixed.
template <typename T>
void append_pattern(const detail::Workspace<T>& ws, std::vector<std::uint32_t>& out) {
  for (const auto& a : ws.activ)
    for (T v : a) out.push_back(v > T(0));
  for (const auto& am : ws.argmax) out.insert(out.end(), am.begin(), am.end());
  for (T v : ws.hidden_pre) out.push_back(v > T(0));
}

struct Evaluation {
  double loss = 0.0;
  std::vector<std::uint32_t> pattern;
};

}  // namespace

double gradient_check(const BackboneModel& model, std::span<const dataset::Image> batch,
                      std::span<const std::uint32_t> labels, const GradientCheckOptions& options) {
  const auto& config = model.config;
  config.validate();
  require(batch.size() == labels.size() && !batch.empty(), "gradient check needs a non-empty labeled batch");
  require(options.step > 0.0, "finite-difference step must be positive");
  const detail::Network<double> net(config);
  auto params = detail::convert_groups<double>(model.groups);
  const std::size_t n = batch.size(), k = config.num_classes;

  std::vector<std::vector<double>> inputs;
  for (const auto& img : batch) {
    require(img.height == config.input_height && img.width == config.input_width, "batch shape mismatch");
    inputs.push_back(detail::image_as<double>(img));
  }
  std::vector<std::vector<double>> masks(n);
  if (options.train_mode && config.dropout_rate > 0.0) {
    Rng rng(options.dropout_seed);
    for (auto& m : masks) m = detail::draw_dropout<double>(config.feature_dim(), config.dropout_rate, rng);
  }

  std::vector<detail::Workspace<double>> ws(n);
  auto evaluate = [&](bool keep_pattern) {
    Evaluation e;
    std::vector<double> logits(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      ws[i].dropout_scale = masks[i];
      net.forward(params, inputs[i], ws[i]);
      std::copy(ws[i].logits.begin(), ws[i].logits.end(), logits.begin() + i * k);
      if (keep_pattern) append_pattern(ws[i], e.pattern);
    }
    e.loss = label_smoothing_loss(logits, labels, k, options.label_smoothing).loss;
    return std::pair{e, logits};
  };

  // Analytic gradient of the mean batch loss.
  auto [base, logits] = evaluate(true);
  const auto loss = label_smoothing_loss(logits, labels, k, options.label_smoothing);
  std::vector<std::vector<double>> analytic(params.size());
  for (std::size_t g = 0; g < params.size(); ++g) analytic[g].assign(params[g].size(), 0.0);
  auto sample_grads = params;
  for (std::size_t i = 0; i < n; ++i) {
    net.forward(params, inputs[i], ws[i]);
    net.backward(params, ws[i], std::span(loss.grad_logits.data() + i * k, k), sample_grads, 0);
    for (std::size_t g = 0; g < params.size(); ++g)
      for (std::size_t p = 0; p < params[g].size(); ++p) analytic[g][p] += sample_grads[g][p];
  }
  if (options.tamper) options.tamper(analytic);

  double worst = 0.0;
  for (std::size_t g = 0; g < params.size(); ++g)
    for (std::size_t p = 0; p < params[g].size(); ++p) {
      const double saved = params[g][p];
      double step = options.step, numeric = 0.0;
      for (int attempt = 0; attempt <= kMaxStepReductions; ++attempt, step *= 0.1) {
        params[g][p] = saved + step;
        const auto plus = evaluate(true).first;
        params[g][p] = saved - step;
        const auto minus = evaluate(true).first;
        params[g][p] = saved;
        numeric = (plus.loss - minus.loss) / (2.0 * step);
        if (plus.pattern == base.pattern && minus.pattern == base.pattern) break;
      }
      const double a = analytic[g][p];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kRelativeFloor});
      worst = std::max(worst, rel);
    }
  return worst;
}

}  // namespace artpipe::backbone
