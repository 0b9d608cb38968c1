#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "common/binary_io.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace artpipe::dataset {

namespace {
constexpr std::string_view kMagic = "ARTF";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void FeatureMatrix::validate() const {
  require(values.size() == n * d, "feature matrix: value count is not n*d");
  require(labels.size() == n, "feature matrix: label count is not n");
  for (std::size_t i = 0; i < n; ++i)
    require(labels[i] < class_names.size(), "feature matrix: label out of range at row " + std::to_string(i));
  for (std::size_t k = 0; k < values.size(); ++k)
    require(std::isfinite(values[k]), "feature matrix: non-finite value at row " + std::to_string(k / d));
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.n = indices.size();
  out.d = d;
  out.class_names = class_names;
  out.values.reserve(out.n * d);
  out.labels.reserve(out.n);
  for (auto i : indices) {
    const auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(labels.at(i));
  }
  return out;
}

std::vector<char> encode_features(const FeatureMatrix& m) {
  m.validate();
  ByteWriter w;
  w.raw(kMagic);
  w.u32(kVersion);
  w.u64(m.n);
  w.u64(m.d);
  w.u32(static_cast<std::uint32_t>(m.class_names.size()));
  for (const auto& name : m.class_names) w.short_string(name);
  w.array(std::span<const std::uint32_t>(m.labels));
  w.array(std::span<const float>(m.values));
  return w.bytes();
}

FeatureMatrix decode_features(std::span<const char> bytes) {
  ByteReader in(bytes, "feature file");
  expect_header(in, kMagic, kVersion);
  FeatureMatrix m;
  m.n = in.u64();
  m.d = in.u64();
  const std::uint32_t classes = in.u32();
  m.class_names.reserve(classes);
  for (std::uint32_t c = 0; c < classes; ++c) m.class_names.push_back(in.short_string());
  // Guard the allocation below against absurd headers.
  if (m.n > in.remaining() / 4 || (m.d != 0 && m.n * m.d > in.remaining() / 4)) in.corrupt("truncated payload");
  m.labels.resize(m.n);
  in.array(std::span<std::uint32_t>(m.labels));
  m.values.resize(m.n * m.d);
  in.array(std::span<float>(m.values));
  in.expect_end();
  for (std::size_t i = 0; i < m.n; ++i)
    if (m.labels[i] >= classes) in.corrupt("label out of range at row " + std::to_string(i));
  m.validate();
  return m;
}

void write_features(const std::string& path, const FeatureMatrix& m) { write_file(path, encode_features(m)); }

FeatureMatrix read_features(const std::string& path) {
  try {
    return decode_features(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

FeatureMatrix import_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Format, path + ": empty CSV");
  const auto header = csv::split_record(line);
  if (header.size() < 2 || header[0] != "label")
    fail(ErrorCode::Format, path + ": header must be label,f0,...,f{d-1}");
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j)
    if (header[j + 1] != "f" + std::to_string(j))
      fail(ErrorCode::Format, path + ": header column " + std::to_string(j + 1) + " should be f" + std::to_string(j));

  std::vector<std::string> raw_labels;
  FeatureMatrix m;
  m.d = d;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_record(line);
    if (fields.size() != d + 1)
      fail(ErrorCode::Format, path + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(d + 1));
    raw_labels.push_back(fields[0]);
    for (std::size_t j = 0; j < d; ++j) {
      const auto& f = fields[j + 1];
      float v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
        fail(ErrorCode::Format, path + ": line " + std::to_string(line_no) + " column " + std::to_string(j + 1) +
                                    " is not a finite number");
      m.values.push_back(v);
    }
  }
  m.n = raw_labels.size();

  bool numeric = true;
  std::uint32_t max_label = 0;
  for (const auto& s : raw_labels) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      numeric = false;
      break;
    }
    max_label = std::max(max_label, v);
  }
  if (numeric) {
    for (const auto& s : raw_labels) m.labels.push_back(static_cast<std::uint32_t>(std::stoul(s)));
    if (m.n > 0)
      for (std::uint32_t c = 0; c <= max_label; ++c) m.class_names.push_back(std::to_string(c));
  } else {
    std::set<std::string> names(raw_labels.begin(), raw_labels.end());
    m.class_names.assign(names.begin(), names.end());
    std::map<std::string, std::uint32_t> index;
    for (std::uint32_t c = 0; c < m.class_names.size(); ++c) index[m.class_names[c]] = c;
    for (const auto& s : raw_labels) m.labels.push_back(index[s]);
  }
  m.validate();
  return m;
}

}  // namespace artpipe::dataset
