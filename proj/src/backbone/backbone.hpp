#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::backbone {

struct BackboneConfig {
  std::vector<std::size_t> block_widths{16, 32, 64};
  std::size_t head_hidden = 0;  // 0 = single linear head
  double dropout_rate = 0.0;
  std::size_t num_classes = 2;
  std::size_t input_height = 256;
  std::size_t input_width = 256;

  void validate() const;
  /// Conv blocks plus the head.
  std::size_t group_count() const { return block_widths.size() + 1; }
  std::size_t feature_dim() const { return block_widths.back(); }
  std::size_t parameter_count() const;

  bool operator==(const BackboneConfig&) const = default;
};

/// Conv blocks `[3×3 conv → ReLU → 2×2 max-pool]`, global average pooling,
/// optional dropout, then the head. One parameter group per block plus one
/// for the head; each group is a flat float vector (weights then biases).
struct BackboneModel {
  BackboneConfig config;
  std::vector<std::vector<float>> groups;
  std::vector<bool> freeze_mask;
  Rng rng;
  std::optional<dataset::Normalizer> normalizer;
};

BackboneModel build_backbone(const BackboneConfig& config, std::uint64_t seed);

struct ForwardResult {
  std::size_t n = 0, d = 0, k = 0;
  std::vector<double> features;  // n×d, GAP output before dropout
  std::vector<double> logits;    // n×K
};

/// Runs prepared (already normalized) images. Train mode applies dropout
/// drawn from `model.rng`; eval mode is deterministic.
ForwardResult forward(BackboneModel& model, std::span<const dataset::Image> batch, bool train_mode);
ForwardResult forward_eval(const BackboneModel& model, std::span<const dataset::Image> batch);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_logits;  // n×K, gradient of the mean loss
};

/// Mean cross-entropy against targets with 1-ε on the true class plus ε/K
/// spread over all classes.
LossResult label_smoothing_loss(std::span<const double> logits, std::span<const std::uint32_t> labels,
                                std::size_t num_classes, double epsilon);

/// Row-wise softmax of an n×K matrix.
std::vector<double> softmax_rows(std::span<const double> logits, std::size_t num_classes);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  double learning_rate = 0.01;
  double label_smoothing = 0.015;
  std::size_t frozen_layers = 2;
  std::size_t warmup_layers = 4;
  std::size_t warmup_epochs = 5;
  std::uint64_t seed = 0;
  dataset::AugmentPolicy augment{};

  void validate(std::size_t group_count) const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> train_accuracy;
  std::vector<double> val_accuracy;  // NaN when no validation set was given

  std::size_t epochs() const { return train_loss.size(); }
};

/// Groups updated in `epoch` (0-based): the top `warmup_layers` groups during
/// warm-up, afterwards every group above the bottom `frozen_layers`.
std::vector<bool> trainable_groups(const TrainConfig& cfg, std::size_t group_count, std::size_t epoch);

using EpochCallback = std::function<void(std::size_t epoch, const TrainHistory& so_far, const BackboneModel&)>;

/// Mini-batch SGD on the label-smoothing loss. `train_set` and `val_set` hold
/// normalized images; augmentation from `cfg.augment` is applied per sample.
TrainHistory train(BackboneModel& model, const dataset::ImageSet& train_set, const dataset::ImageSet* val_set,
                   const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Fits the normalizer on raw `train_set`, stores it in the model, and trains
/// on normalized copies of both sets.
TrainHistory fit_backbone(BackboneModel& model, const dataset::ImageSet& train_set,
                          const dataset::ImageSet* val_set, const TrainConfig& cfg,
                          const EpochCallback& on_epoch = {});

/// GAP features of raw images (the model's normalizer is applied if set).
dataset::FeatureMatrix extract_features(const BackboneModel& model, const dataset::ImageSet& images);

/// Argmax of the softmax head on raw images (normalizer applied if set).
std::vector<std::uint32_t> predict_head(const BackboneModel& model, const dataset::ImageSet& images);

using GradientTamper = std::function<void(std::vector<std::vector<double>>& grads)>;

struct GradientCheckOptions {
  double step = 1e-5;
  double label_smoothing = 0.0;
  bool train_mode = false;    // when set, one fixed dropout mask is drawn from `dropout_seed`
  std::uint64_t dropout_seed = 0;
  GradientTamper tamper;      // applied to analytic gradients before comparison
};

/// Largest relative error between the analytic double-precision gradient of
/// the batch loss and central finite differences, over every parameter.
double gradient_check(const BackboneModel& model, std::span<const dataset::Image> batch,
                      std::span<const std::uint32_t> labels, const GradientCheckOptions& options = {});

/// `.artb`: "ARTB" | u32 version | config | normalizer | per-group f32 payloads.
std::vector<char> encode_checkpoint(const BackboneModel& model);
BackboneModel decode_checkpoint(std::span<const char> bytes);
void save_checkpoint(const std::string& path, const BackboneModel& model);
BackboneModel load_checkpoint(const std::string& path);

}  // namespace artpipe::backbone
