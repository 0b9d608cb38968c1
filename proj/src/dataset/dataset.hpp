#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common/rng.hpp"

namespace artpipe::dataset {

/// 3×H×W image, channel-major, values nominally in [0, 1].
struct Image {
  static constexpr std::size_t channels = 3;

  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Image() = default;
  Image(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), data(channels * h * w, fill) {}

  double& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
  std::size_t plane() const { return height * width; }

  bool operator==(const Image&) const = default;
};

/// Labeled images grouped by artist class.
struct ImageSet {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::string> class_names;
  std::vector<Image> images;
  std::vector<std::uint32_t> labels;
  std::vector<std::string> source_paths;

  std::size_t size() const { return images.size(); }
  std::vector<std::size_t> class_counts() const;

  /// Throws InvalidArgument when sizes, labels or shapes are inconsistent.
  /// With `require_all_classes` every class must own at least one image.
  void validate(bool require_all_classes = true) const;

  /// Rows `indices` in the given order; class table is shared.
  ImageSet subset(std::span<const std::size_t> indices) const;
};

struct IngestOptions {
  std::size_t min_count = 270;
  std::size_t height = 256;
  std::size_t width = 256;
};

/// Reads `<root>/<artist>/<image>.{png,jpg,jpeg,bmp}`. Classes with fewer than
/// `min_count` images are dropped, the rest sorted by name; images are
/// bilinearly resized and scaled to [0, 1].
ImageSet ingest_directory(const std::string& root, const IngestOptions& options = {});

struct SplitSpec {
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SplitPart : std::uint8_t { Train = 0, Val = 1, Test = 2 };

/// Per-class allocation of `count` items: floors of the quotas plus the
/// leftover items handed out by largest fractional remainder (ties go to
/// train, then val). Every part stays within one item of its quota.
struct SplitCounts {
  std::size_t train = 0, val = 0, test = 0;
};
SplitCounts allocate_split(std::size_t count, const SplitSpec& spec);

/// Split membership for each label. Deterministic per seed.
std::vector<SplitPart> assign_split(std::span<const std::uint32_t> labels, std::size_t class_count,
                                    const SplitSpec& spec);

struct Splits {
  ImageSet train, val, test;
  std::vector<SplitPart> assignment;
};

/// Stratified train/val/test split. Every class needs at least 3 images.
Splits stratified_split(const ImageSet& set, const SplitSpec& spec);

struct AugmentPolicy {
  std::size_t crop_padding = 4;
  double flip_probability = 0.5;
  bool enabled = true;

  void validate() const;
};

struct AugmentDraw {
  std::size_t offset_y = 0;
  std::size_t offset_x = 0;
  bool flip = false;
};

/// Samples crop offsets in [0, 2·padding] and the flip coin.
AugmentDraw draw_augmentation(const AugmentPolicy& policy, Rng& rng);
/// Reflect-pads by `crop_padding`, crops back to H×W at the drawn offset,
/// then mirrors horizontally if requested.
Image apply_augmentation(const Image& image, const AugmentPolicy& policy, const AugmentDraw& draw);
Image augment(const Image& image, const AugmentPolicy& policy, Rng& rng);

struct Normalizer {
  double mean[3] = {0, 0, 0};
  double std[3] = {1, 1, 1};

  Image apply(const Image& image) const;
  Image invert(const Image& image) const;
  void validate() const;
};

/// Per-channel mean and population standard deviation over all pixels.
Normalizer fit_normalizer(std::span<const Image> images);
inline Normalizer fit_normalizer(const ImageSet& train) { return fit_normalizer(train.images); }

struct FeatureMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<float> values;  // row-major n×d
  std::vector<std::uint32_t> labels;
  std::vector<std::string> class_names;

  std::span<const float> row(std::size_t i) const { return {values.data() + i * d, d}; }
  /// Throws on size mismatch, out-of-range labels or non-finite values.
  void validate() const;
  FeatureMatrix subset(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureMatrix&) const = default;
};

/// `.artf`: "ARTF" | u32 version=1 | u64 n | u64 d | u32 class_count |
/// (u16 len + UTF-8 name)×class_count | u32 label×n | f32 value×(n·d).
std::vector<char> encode_features(const FeatureMatrix& features);
FeatureMatrix decode_features(std::span<const char> bytes);
void write_features(const std::string& path, const FeatureMatrix& features);
FeatureMatrix read_features(const std::string& path);

/// CSV with header `label,f0,...,f{d-1}`. Labels that are all non-negative
/// integers are used as class indices; otherwise they are class names,
/// indexed in lexicographic order.
FeatureMatrix import_features_csv(const std::string& path);

/// `.arti` image archive used between CLI stages.
void write_image_archive(const std::string& path, const ImageSet& set);
ImageSet read_image_archive(const std::string& path);

struct SyntheticOptions {
  std::size_t classes = 20;
  std::size_t per_class = 100;
  std::size_t size = 64;
  double noise = 0.08;
  std::uint64_t seed = 7;
};

/// Procedural "painters": each class has a fixed three-colour palette and a
/// distinct stripe frequency; each image draws a random stripe orientation,
/// phase and a palette blob, plus Gaussian pixel noise. Pixels are rounded to
/// 8-bit levels like decoded image files.
ImageSet synthetic_painters(const SyntheticOptions& options);

/// Writes a synthetic set as PNG files in the ingest directory layout.
void write_image_directory(const ImageSet& set, const std::string& root);

}  // namespace artpipe::dataset
