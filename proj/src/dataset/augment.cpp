#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::dataset {

namespace {

// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<std::ptrdiff_t>(n) ? i : period - i);
}

}  // namespace

void AugmentPolicy::validate() const {
  require(flip_probability >= 0.0 && flip_probability <= 1.0, "flip_probability must lie in [0, 1]");
}

AugmentDraw draw_augmentation(const AugmentPolicy& policy, Rng& rng) {
  AugmentDraw draw;
  const std::size_t span = 2 * policy.crop_padding + 1;
  draw.offset_y = uniform_index(rng, span);
  draw.offset_x = uniform_index(rng, span);
  draw.flip = uniform01(rng) < policy.flip_probability;
  return draw;
}

Image apply_augmentation(const Image& image, const AugmentPolicy& policy, const AugmentDraw& draw) {
  if (!policy.enabled) return image;
  const auto pad = static_cast<std::ptrdiff_t>(policy.crop_padding);
  Image out(image.height, image.width);
  for (std::size_t c = 0; c < Image::channels; ++c)
    for (std::size_t y = 0; y < image.height; ++y) {
      const std::size_t sy = reflect(static_cast<std::ptrdiff_t>(y + draw.offset_y) - pad, image.height);
      for (std::size_t x = 0; x < image.width; ++x) {
        const std::size_t cx = draw.flip ? image.width - 1 - x : x;
        const std::size_t sx = reflect(static_cast<std::ptrdiff_t>(cx + draw.offset_x) - pad, image.width);
        out.at(c, y, x) = image.at(c, sy, sx);
      }
    }
  return out;
}

Image augment(const Image& image, const AugmentPolicy& policy, Rng& rng) {
  if (!policy.enabled) return image;
  return apply_augmentation(image, policy, draw_augmentation(policy, rng));
}

}  // namespace artpipe::dataset
