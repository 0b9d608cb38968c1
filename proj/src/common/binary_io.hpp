#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace artpipe {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

/// Append-only little-endian encoder.
class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void u8(std::uint8_t v) { put(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(v); }
  void f64(double v) { put(v); }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  template <typename T>
  void array(std::span<const T> values) {
    const auto* p = reinterpret_cast<const char*>(values.data());
    bytes_.insert(bytes_.end(), p, p + values.size_bytes());
  }

  /// u16 length prefix + bytes; throws if longer than 65535.
  void short_string(std::string_view s);
  /// u32 length prefix + bytes.
  void string(std::string_view s);

  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

/// Bounds-checked little-endian decoder. Every overrun throws a Format error
/// mentioning `context`.
class ByteReader {
 public:
  ByteReader(std::span<const char> bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }
  std::string raw(std::size_t n);
  std::string short_string();
  std::string string();

  template <typename T>
  void array(std::span<T> out) {
    need(out.size_bytes());
    std::memcpy(out.data(), bytes_.data() + pos_, out.size_bytes());
    pos_ += out.size_bytes();
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  /// Throws unless all input was consumed.
  void expect_end() const;
  [[noreturn]] void corrupt(const std::string& what) const;

 private:
  void need(std::size_t n) const;

  std::span<const char> bytes_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::vector<char> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const char> bytes);

/// Reads a 4-byte magic and u32 version, throwing Format errors on mismatch.
void expect_header(ByteReader& in, std::string_view magic, std::uint32_t version);

}  // namespace artpipe
