#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "dataset/dataset.hpp"

namespace fs = std::filesystem;

namespace artpipe::dataset {

std::vector<std::size_t> ImageSet::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (auto label : labels)
    if (label < counts.size()) ++counts[label];
  return counts;
}

void ImageSet::validate(bool require_all_classes) const {
  require(labels.size() == images.size(), "image set: label count differs from image count");
  require(source_paths.empty() || source_paths.size() == images.size(),
          "image set: source path count differs from image count");
  for (std::size_t i = 0; i < images.size(); ++i) {
    require(labels[i] < class_names.size(), "image set: label out of range at index " + std::to_string(i));
    const auto& img = images[i];
    require(img.height == height && img.width == width &&
                img.data.size() == Image::channels * height * width,
            "image set: image " + std::to_string(i) + " does not match the set's shape");
  }
  if (require_all_classes) {
    const auto counts = class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
      require(counts[c] > 0, "image set: class '" + class_names[c] + "' has no images");
  }
}

ImageSet ImageSet::subset(std::span<const std::size_t> indices) const {
  ImageSet out;
  out.height = height;
  out.width = width;
  out.class_names = class_names;
  out.images.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    out.images.push_back(images.at(i));
    out.labels.push_back(labels.at(i));
    if (!source_paths.empty()) out.source_paths.push_back(source_paths[i]);
  }
  return out;
}

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

Image load_image(const std::string& path, std::size_t height, std::size_t width) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) fail(ErrorCode::Format, "unreadable or corrupt image: " + path);
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  cv::Mat scaled;
  rgb.convertTo(scaled, CV_32FC3, 1.0 / 255.0);
  cv::Mat resized;
  if (static_cast<std::size_t>(scaled.rows) == height && static_cast<std::size_t>(scaled.cols) == width)
    resized = scaled;
  else
    cv::resize(scaled, resized, cv::Size(static_cast<int>(width), static_cast<int>(height)), 0, 0,
               cv::INTER_LINEAR);
  Image img(height, width);
  for (std::size_t y = 0; y < height; ++y) {
    const auto* row = resized.ptr<cv::Vec3f>(static_cast<int>(y));
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        img.at(c, y, x) = std::clamp(static_cast<double>(row[x][static_cast<int>(c)]), 0.0, 1.0);
  }
  return img;
}

}  // namespace

ImageSet ingest_directory(const std::string& root, const IngestOptions& options) {
  require(options.min_count >= 1, "min_count must be at least 1");
  require(options.height >= 1 && options.width >= 1, "target size must be positive");
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::Io, "not a directory: " + root);

  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    std::vector<std::string> files;
    for (const auto& f : fs::directory_iterator(entry.path()))
      if (f.is_regular_file() && is_image_file(f.path())) files.push_back(f.path().string());
    std::sort(files.begin(), files.end());
    by_class.emplace(entry.path().filename().string(), std::move(files));
  }
  if (by_class.empty()) fail(ErrorCode::Data, "no classes: " + root + " has no artist subdirectories");

  ImageSet set;
  set.height = options.height;
  set.width = options.width;
  for (auto& [name, files] : by_class) {
    if (files.size() < options.min_count) continue;
    const auto label = static_cast<std::uint32_t>(set.class_names.size());
    set.class_names.push_back(name);
    for (auto& f : files) {
      set.source_paths.push_back(std::move(f));
      set.labels.push_back(label);
    }
  }
  if (set.class_names.empty())
    fail(ErrorCode::Data, "no classes with at least " + std::to_string(options.min_count) + " images in " + root);

  set.images.resize(set.source_paths.size());
  parallel_for(set.images.size(), [&](std::size_t i) {
    set.images[i] = load_image(set.source_paths[i], options.height, options.width);
  });
  return set;
}

}  // namespace artpipe::dataset
