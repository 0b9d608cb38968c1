#include "backbone/backbone.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace artpipe::backbone {

namespace {
constexpr std::string_view kMagic = "ARTB";
constexpr std::uint32_t kVersion = 1;
}  // namespace

// Config block: u32 block count, u32 widths, u32 head_hidden, f64 dropout,
// u32 num_classes, u32 H, u32 W. Then u8 has_normalizer + 6×f64, u32 group
// count and per group u64 length + f32 payload.
std::vector<char> encode_checkpoint(const BackboneModel& model) {
  const auto& c = model.config;
  c.validate();
  ByteWriter w;
  w.raw(kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(c.block_widths.size()));
  for (auto width : c.block_widths) w.u32(static_cast<std::uint32_t>(width));
  w.u32(static_cast<std::uint32_t>(c.head_hidden));
  w.f64(c.dropout_rate);
  w.u32(static_cast<std::uint32_t>(c.num_classes));
  w.u32(static_cast<std::uint32_t>(c.input_height));
  w.u32(static_cast<std::uint32_t>(c.input_width));
  w.u8(model.normalizer ? 1 : 0);
  const dataset::Normalizer norm = model.normalizer.value_or(dataset::Normalizer{});
  for (double v : norm.mean) w.f64(v);
  for (double v : norm.std) w.f64(v);
  w.u32(static_cast<std::uint32_t>(model.groups.size()));
  for (const auto& g : model.groups) {
    w.u64(g.size());
    w.array(std::span<const float>(g));
  }
  return w.bytes();
}

BackboneModel decode_checkpoint(std::span<const char> bytes) {
  ByteReader in(bytes, "backbone checkpoint");
  expect_header(in, kMagic, kVersion);
  BackboneConfig c;
  const std::uint32_t blocks = in.u32();
  if (blocks == 0 || blocks > 31) in.corrupt("bad block count");
  c.block_widths.clear();
  for (std::uint32_t b = 0; b < blocks; ++b) c.block_widths.push_back(in.u32());
  c.head_hidden = in.u32();
  c.dropout_rate = in.f64();
  c.num_classes = in.u32();
  c.input_height = in.u32();
  c.input_width = in.u32();
  try {
    c.validate();
  } catch (const Error& e) {
    in.corrupt(std::string("invalid config: ") + e.what());
  }
  BackboneModel model = build_backbone(c, 0);
  const bool has_norm = in.u8() != 0;
  dataset::Normalizer norm;
  for (double& v : norm.mean) v = in.f64();
  for (double& v : norm.std) v = in.f64();
  if (has_norm) model.normalizer = norm;
  const std::uint32_t groups = in.u32();
  if (groups != model.groups.size()) in.corrupt("group count does not match the config");
  for (auto& g : model.groups) {
    if (in.u64() != g.size()) in.corrupt("group size does not match the config");
    in.array(std::span<float>(g));
  }
  in.expect_end();
  return model;
}

void save_checkpoint(const std::string& path, const BackboneModel& model) {
  write_file(path, encode_checkpoint(model));
}

BackboneModel load_checkpoint(const std::string& path) {
  try {
    return decode_checkpoint(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace artpipe::backbone
