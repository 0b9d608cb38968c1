#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <opencv2/imgcodecs.hpp>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::dataset {

ImageSet synthetic_painters(const SyntheticOptions& o) {
  require(o.classes >= 2, "need at least two synthetic classes");
  require(o.per_class >= 1 && o.size >= 4, "bad synthetic set size");
  ImageSet set;
  set.height = set.width = o.size;
  const double size = static_cast<double>(o.size);

  for (std::size_t c = 0; c < o.classes; ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "painter_%02zu", c);
    set.class_names.emplace_back(name);

    Rng palette_rng(derive_seed(o.seed, c));
    double palette[3][3];
    for (auto& colour : palette)
      for (double& v : colour) v = uniform(palette_rng, 0.1, 0.9);
    const double frequency = 2.0 + 0.75 * static_cast<double>(c);  // cycles per image width

    for (std::size_t k = 0; k < o.per_class; ++k) {
      Rng rng(derive_seed(o.seed, 1'000'003 * (c + 1) + k));
      const double theta = uniform(rng, 0.0, std::numbers::pi);
      const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double blob_x = uniform(rng, 0.2, 0.8) * size;
      const double blob_y = uniform(rng, 0.2, 0.8) * size;
      const double blob_r = uniform(rng, 0.1, 0.25) * size;
      const double cs = std::cos(theta), sn = std::sin(theta);

      Image img(o.size, o.size);
      for (std::size_t y = 0; y < o.size; ++y)
        for (std::size_t x = 0; x < o.size; ++x) {
          const double u = (static_cast<double>(x) * cs + static_cast<double>(y) * sn) / size;
          const double s = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * frequency * u + phase);
          const double dx = static_cast<double>(x) - blob_x, dy = static_cast<double>(y) - blob_y;
          const double blob = std::exp(-(dx * dx + dy * dy) / (2.0 * blob_r * blob_r));
          for (std::size_t ch = 0; ch < 3; ++ch) {
            const double stripes = s * palette[0][ch] + (1.0 - s) * palette[1][ch];
            double v = (1.0 - blob) * stripes + blob * palette[2][ch] + o.noise * standard_normal(rng);
            v = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
            img.at(ch, y, x) = static_cast<double>(static_cast<float>(v / 255.0));
          }
        }
      set.images.push_back(std::move(img));
      set.labels.push_back(static_cast<std::uint32_t>(c));
      set.source_paths.push_back(set.class_names.back() + "/" + std::to_string(k) + ".png");
    }
  }
  return set;
}

void write_image_directory(const ImageSet& set, const std::string& root) {
  namespace fs = std::filesystem;
  set.validate(false);
  for (const auto& name : set.class_names) fs::create_directories(fs::path(root) / name);
  std::vector<std::size_t> next(set.class_names.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& img = set.images[i];
    cv::Mat bgr(static_cast<int>(img.height), static_cast<int>(img.width), CV_8UC3);
    for (std::size_t y = 0; y < img.height; ++y)
      for (std::size_t x = 0; x < img.width; ++x) {
        auto& px = bgr.at<cv::Vec3b>(static_cast<int>(y), static_cast<int>(x));
        for (int ch = 0; ch < 3; ++ch)
          px[2 - ch] = static_cast<unsigned char>(std::lround(std::clamp(img.at(ch, y, x), 0.0, 1.0) * 255.0));
      }
    char file[32];
    std::snprintf(file, sizeof file, "%05zu.png", next[set.labels[i]]++);
    const auto path = (fs::path(root) / set.class_names[set.labels[i]] / file).string();
    if (!cv::imwrite(path, bgr)) fail(ErrorCode::Io, "cannot write " + path);
  }
}

}  // namespace artpipe::dataset
