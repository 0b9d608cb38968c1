#include "backbone/backbone.hpp"

#include <cmath>

#include "backbone/network.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"

namespace artpipe::backbone {

namespace detail {

std::vector<BlockShape> block_shapes(const BackboneConfig& config) {
  std::vector<BlockShape> shapes;
  std::size_t cin = 3, h = config.input_height, w = config.input_width;
  for (auto width : config.block_widths) {
    shapes.push_back({cin, width, h, w, h / 2, w / 2});
    cin = width;
    h /= 2;
    w /= 2;
  }
  return shapes;
}

}  // namespace detail

void BackboneConfig::validate() const {
  require(!block_widths.empty(), "backbone needs at least one conv block");
  for (auto w : block_widths) require(w > 0, "block widths must be positive");
  require(num_classes >= 2, "backbone needs at least two classes");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout rate must lie in [0, 1)");
  require(block_widths.size() < 32, "too many conv blocks");
  const std::size_t min_side = std::size_t{1} << block_widths.size();
  require(input_height >= min_side && input_width >= min_side,
          "input " + std::to_string(input_height) + "x" + std::to_string(input_width) + " is smaller than " +
              std::to_string(min_side) + "x" + std::to_string(min_side) + ": " +
              std::to_string(block_widths.size()) + " pooling stages would shrink it below 1x1");
}

std::size_t BackboneConfig::parameter_count() const {
  std::size_t total = 0, cin = 3;
  for (auto w : block_widths) {
    total += w * cin * 9 + w;
    cin = w;
  }
  if (head_hidden == 0) return total + num_classes * cin + num_classes;
  return total + head_hidden * cin + head_hidden + num_classes * head_hidden + num_classes;
}

BackboneModel build_backbone(const BackboneConfig& config, std::uint64_t seed) {
  config.validate();
  BackboneModel model;
  model.config = config;
  model.rng.seed(seed);
  Rng init(derive_seed(seed, 0x1417));

  auto fill = [&](std::vector<float>& g, std::size_t offset, std::size_t count, std::size_t fan_in, double gain) {
    const double bound = std::sqrt(gain / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) g[offset + i] = static_cast<float>(uniform(init, -bound, bound));
  };

  std::size_t cin = 3;
  for (auto width : config.block_widths) {
    std::vector<float> g(width * cin * 9 + width, 0.0f);
    fill(g, 0, width * cin * 9, cin * 9, 6.0);
    model.groups.push_back(std::move(g));
    cin = width;
  }
  const std::size_t d = cin, k = config.num_classes;
  if (config.head_hidden == 0) {
    std::vector<float> g(k * d + k, 0.0f);
    fill(g, 0, k * d, d, 3.0);
    model.groups.push_back(std::move(g));
  } else {
    const std::size_t h = config.head_hidden;
    std::vector<float> g(h * d + h + k * h + k, 0.0f);
    fill(g, 0, h * d, d, 6.0);
    fill(g, h * d + h, k * h, h, 3.0);
    model.groups.push_back(std::move(g));
  }
  model.freeze_mask.assign(model.groups.size(), false);
  return model;
}

namespace {

void check_batch(const BackboneConfig& config, std::span<const dataset::Image> batch) {
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& img = batch[i];
    if (img.height != config.input_height || img.width != config.input_width ||
        img.data.size() != 3 * img.height * img.width)
      fail(ErrorCode::InvalidArgument, "image " + std::to_string(i) + " is " + std::to_string(img.height) + "x" +
                                           std::to_string(img.width) + ", backbone expects " +
                                           std::to_string(config.input_height) + "x" +
                                           std::to_string(config.input_width));
  }
}

ForwardResult run_forward(const BackboneModel& model, std::span<const dataset::Image> batch,
                          const std::vector<std::vector<float>>* dropout) {
  check_batch(model.config, batch);
  const detail::Network<float> net(model.config);
  ForwardResult out;
  out.n = batch.size();
  out.d = model.config.feature_dim();
  out.k = model.config.num_classes;
  out.features.resize(out.n * out.d);
  out.logits.resize(out.n * out.k);
  parallel_for(batch.size(), [&](std::size_t i) {
    detail::Workspace<float> ws;
    if (dropout) ws.dropout_scale = (*dropout)[i];
    const auto pixels = detail::image_as<float>(batch[i]);
    net.forward(model.groups, pixels, ws);
    for (std::size_t j = 0; j < out.d; ++j) out.features[i * out.d + j] = ws.gap[j];
    for (std::size_t j = 0; j < out.k; ++j) out.logits[i * out.k + j] = ws.logits[j];
  });
  return out;
}

std::vector<dataset::Image> prepare(const BackboneModel& model, const dataset::ImageSet& images) {
  if (!model.normalizer) return images.images;
  std::vector<dataset::Image> out;
  out.reserve(images.size());
  for (const auto& img : images.images) out.push_back(model.normalizer->apply(img));
  return out;
}

}  // namespace

ForwardResult forward(BackboneModel& model, std::span<const dataset::Image> batch, bool train_mode) {
  if (!train_mode || model.config.dropout_rate == 0.0) return run_forward(model, batch, nullptr);
  std::vector<std::vector<float>> masks;
  masks.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    masks.push_back(detail::draw_dropout<float>(model.config.feature_dim(), model.config.dropout_rate, model.rng));
  return run_forward(model, batch, &masks);
}

ForwardResult forward_eval(const BackboneModel& model, std::span<const dataset::Image> batch) {
  return run_forward(model, batch, nullptr);
}

dataset::FeatureMatrix extract_features(const BackboneModel& model, const dataset::ImageSet& images) {
  const auto prepared = prepare(model, images);
  const auto result = forward_eval(model, prepared);
  dataset::FeatureMatrix m;
  m.n = result.n;
  m.d = result.d;
  m.values.assign(result.features.begin(), result.features.end());
  m.labels = images.labels;
  m.class_names = images.class_names;
  m.validate();
  return m;
}

std::vector<std::uint32_t> predict_head(const BackboneModel& model, const dataset::ImageSet& images) {
  const auto prepared = prepare(model, images);
  const auto result = forward_eval(model, prepared);
  std::vector<std::uint32_t> labels(result.n);
  for (std::size_t i = 0; i < result.n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < result.k; ++j)
      if (result.logits[i * result.k + j] > result.logits[i * result.k + best]) best = j;
    labels[i] = static_cast<std::uint32_t>(best);
  }
  return labels;
}

}  // namespace artpipe::backbone
