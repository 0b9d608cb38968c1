#include <cmath>
#include <limits>
#include <numeric>

#include "backbone/backbone.hpp"
#include "backbone/network.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"

namespace artpipe::backbone {

void TrainConfig::validate(std::size_t group_count) const {
  require(batch_size >= 1, "batch size must be at least 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning rate must be positive");
  require(label_smoothing >= 0.0 && label_smoothing < 1.0, "label smoothing must lie in [0, 1)");
  require(frozen_layers + warmup_layers <= group_count,
          "frozen layers (" + std::to_string(frozen_layers) + ") + warm-up layers (" + std::to_string(warmup_layers) +
              ") exceed the model's " + std::to_string(group_count) + " layer groups");
  augment.validate();
}

std::vector<bool> trainable_groups(const TrainConfig& cfg, std::size_t group_count, std::size_t epoch) {
  std::vector<bool> mask(group_count, false);
  const std::size_t first =
      epoch < cfg.warmup_epochs ? group_count - std::min(cfg.warmup_layers, group_count) : cfg.frozen_layers;
  for (std::size_t g = first; g < group_count; ++g) mask[g] = true;
  return mask;
}

namespace {

std::size_t argmax_row(const float* z, std::size_t k) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (z[j] > z[best]) best = j;
  return best;
}

double head_accuracy(const BackboneModel& model, const dataset::ImageSet& set) {
  if (set.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const auto result = forward_eval(model, set.images);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < result.n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < result.k; ++j)
      if (result.logits[i * result.k + j] > result.logits[i * result.k + best]) best = j;
    correct += best == set.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(result.n);
}

}  // namespace

TrainHistory train(BackboneModel& model, const dataset::ImageSet& train_set, const dataset::ImageSet* val_set,
                   const TrainConfig& cfg, const EpochCallback& on_epoch) {
  const auto& config = model.config;
  config.validate();
  const std::size_t groups = config.group_count();
  cfg.validate(groups);
  require(train_set.size() > 0, "empty training set");
  train_set.validate(false);
  require(train_set.height == config.input_height && train_set.width == config.input_width,
          "training images do not match the backbone input size");
  for (auto label : train_set.labels) require(label < config.num_classes, "training label exceeds num_classes");

  const detail::Network<float> net(config);
  const std::size_t n = train_set.size(), k = config.num_classes;
  const std::size_t batch_cap = std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(derive_seed(cfg.seed, 1));

  std::vector<std::vector<std::vector<float>>> sample_grads(batch_cap, model.groups);
  std::vector<float> sample_logits(batch_cap * k);
  std::vector<double> sample_loss(batch_cap);
  std::vector<std::vector<float>> total(groups);

  TrainHistory history;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto trainable = trainable_groups(cfg, groups, epoch);
    std::size_t lowest = groups;
    for (std::size_t g = groups; g-- > 0;) {
      model.freeze_mask[g] = !trainable[g];
      if (trainable[g]) lowest = g;
    }
    shuffle(order.begin(), order.end(), order_rng);
    const std::uint64_t epoch_seed = derive_seed(cfg.seed, 2 + epoch);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += batch_cap) {
      const std::size_t m = std::min(batch_cap, n - start);
      const float inv_m = 1.0f / static_cast<float>(m);
      parallel_for(m, [&](std::size_t j) {
        const std::size_t idx = order[start + j];
        Rng rng(derive_seed(epoch_seed, start + j));
        detail::Workspace<float> ws;
        const auto image = dataset::augment(train_set.images[idx], cfg.augment, rng);
        if (config.dropout_rate > 0.0)
          ws.dropout_scale = detail::draw_dropout<float>(config.feature_dim(), config.dropout_rate, rng);
        net.forward(model.groups, detail::image_as<float>(image), ws);

        std::vector<double> z(ws.logits.begin(), ws.logits.end());
        const std::uint32_t label = train_set.labels[idx];
        const auto loss = label_smoothing_loss(z, std::span(&label, 1), k, cfg.label_smoothing);
        sample_loss[j] = loss.loss;
        std::copy(ws.logits.begin(), ws.logits.end(), sample_logits.begin() + j * k);
        if (lowest < groups) {
          std::vector<float> d_logits(k);
          for (std::size_t c = 0; c < k; ++c) d_logits[c] = static_cast<float>(loss.grad_logits[c]) * inv_m;
          net.backward(model.groups, ws, d_logits, sample_grads[j], lowest);
        }
      });

      for (std::size_t j = 0; j < m; ++j) {
        loss_sum += sample_loss[j];
        correct += argmax_row(sample_logits.data() + j * k, k) == train_set.labels[order[start + j]];
      }
      // Fixed-order reduction keeps updates independent of the worker count.
      for (std::size_t g = lowest; g < groups; ++g) {
        total[g].assign(model.groups[g].size(), 0.0f);
        for (std::size_t j = 0; j < m; ++j) {
          const auto& sg = sample_grads[j][g];
          for (std::size_t p = 0; p < sg.size(); ++p) total[g][p] += sg[p];
        }
        const float lr = static_cast<float>(cfg.learning_rate);
        auto& params = model.groups[g];
        for (std::size_t p = 0; p < params.size(); ++p) params[p] -= lr * total[g][p];
      }
    }

    history.train_loss.push_back(loss_sum / static_cast<double>(n));
    history.train_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(n));
    history.val_accuracy.push_back(val_set ? head_accuracy(model, *val_set)
                                           : std::numeric_limits<double>::quiet_NaN());
    if (on_epoch) on_epoch(epoch, history, model);
  }
  return history;
}

TrainHistory fit_backbone(BackboneModel& model, const dataset::ImageSet& train_set,
                          const dataset::ImageSet* val_set, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  require(train_set.size() > 0, "empty training set");
  model.normalizer = dataset::fit_normalizer(train_set);
  auto normalize = [&](const dataset::ImageSet& set) {
    dataset::ImageSet out = set;
    for (auto& img : out.images) img = model.normalizer->apply(img);
    return out;
  };
  const auto train_norm = normalize(train_set);
  if (!val_set) return train(model, train_norm, nullptr, cfg, on_epoch);
  const auto val_norm = normalize(*val_set);
  return train(model, train_norm, &val_norm, cfg, on_epoch);
}

}  // namespace artpipe::backbone
