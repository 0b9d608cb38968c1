#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::dataset {

namespace {
constexpr std::string_view kMagic = "ARTI";
constexpr std::uint32_t kVersion = 1;
}  // namespace

// "ARTI" | u32 version | u32 H | u32 W | u32 class_count | names (u16 + bytes)
// | u64 n | per image: u32 label, u32-prefixed source path, f32 × 3HW.
void write_image_archive(const std::string& path, const ImageSet& set) {
  set.validate(false);
  ByteWriter w;
  w.raw(kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(set.height));
  w.u32(static_cast<std::uint32_t>(set.width));
  w.u32(static_cast<std::uint32_t>(set.class_names.size()));
  for (const auto& name : set.class_names) w.short_string(name);
  w.u64(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    w.u32(set.labels[i]);
    w.string(set.source_paths.empty() ? std::string() : set.source_paths[i]);
    for (double v : set.images[i].data) w.f32(static_cast<float>(v));
  }
  write_file(path, w.bytes());
}

ImageSet read_image_archive(const std::string& path) {
  const auto bytes = read_file(path);
  ByteReader in(bytes, path);
  expect_header(in, kMagic, kVersion);
  ImageSet set;
  set.height = in.u32();
  set.width = in.u32();
  const std::uint32_t classes = in.u32();
  for (std::uint32_t c = 0; c < classes; ++c) set.class_names.push_back(in.short_string());
  const std::uint64_t n = in.u64();
  const std::size_t pixels = Image::channels * set.height * set.width;
  if (pixels == 0 || n > in.remaining() / (pixels * 4)) in.corrupt("truncated payload");
  std::vector<float> buffer(pixels);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t label = in.u32();
    if (label >= classes) in.corrupt("label out of range at image " + std::to_string(i));
    set.labels.push_back(label);
    set.source_paths.push_back(in.string());
    in.array(std::span<float>(buffer));
    Image img(set.height, set.width);
    for (std::size_t k = 0; k < pixels; ++k) img.data[k] = buffer[k];
    set.images.push_back(std::move(img));
  }
  in.expect_end();
  return set;
}

}  // namespace artpipe::dataset
