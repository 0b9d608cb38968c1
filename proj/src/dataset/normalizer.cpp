#include <cmath>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::dataset {

void Normalizer::validate() const {
  for (int c = 0; c < 3; ++c)
    require(std::isfinite(mean[c]) && std::isfinite(std[c]) && std[c] > 0.0,
            "normalizer channel " + std::to_string(c) + " needs a finite mean and positive std");
}

Image Normalizer::apply(const Image& image) const {
  Image out = image;
  const std::size_t plane = image.plane();
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < plane; ++k) {
      double& v = out.data[c * plane + k];
      v = (v - mean[c]) / std[c];
    }
  return out;
}

Image Normalizer::invert(const Image& image) const {
  Image out = image;
  const std::size_t plane = image.plane();
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < plane; ++k) {
      double& v = out.data[c * plane + k];
      v = v * std[c] + mean[c];
    }
  return out;
}

Normalizer fit_normalizer(std::span<const Image> images) {
  require(!images.empty(), "cannot fit a normalizer on an empty set");
  static const char* names[3] = {"red", "green", "blue"};
  Normalizer norm;
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& img : images) {
      const std::size_t plane = img.plane();
      for (std::size_t k = 0; k < plane; ++k) sum += img.data[c * plane + k];
      count += plane;
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (const auto& img : images) {
      const std::size_t plane = img.plane();
      for (std::size_t k = 0; k < plane; ++k) {
        const double dv = img.data[c * plane + k] - mean;
        sq += dv * dv;
      }
    }
    const double sd = std::sqrt(sq / static_cast<double>(count));
    if (!(sd > 0.0))
      fail(ErrorCode::Data, std::string("channel ") + std::to_string(c) + " (" + names[c] +
                                ") is constant over the training set; std = 0");
    norm.mean[c] = mean;
    norm.std[c] = sd;
  }
  return norm;
}

}  // namespace artpipe::dataset
