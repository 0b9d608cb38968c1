#include "common/binary_io.hpp"

#include <fstream>
#include <limits>

#include "common/error.hpp"

namespace artpipe {

void ByteWriter::short_string(std::string_view s) {
  require(s.size() <= std::numeric_limits<std::uint16_t>::max(), "string longer than 65535 bytes");
  u16(static_cast<std::uint16_t>(s.size()));
  raw(s);
}

void ByteWriter::string(std::string_view s) {
  require(s.size() <= std::numeric_limits<std::uint32_t>::max(), "string too long");
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s);
}

void ByteReader::need(std::size_t n) const {
  if (n > remaining()) fail(ErrorCode::Format, context_ + ": truncated payload");
}

std::string ByteReader::raw(std::size_t n) {
  need(n);
  std::string s(bytes_.data() + pos_, n);
  pos_ += n;
  return s;
}

std::string ByteReader::short_string() { return raw(u16()); }
std::string ByteReader::string() { return raw(u32()); }

void ByteReader::expect_end() const {
  if (remaining() != 0) fail(ErrorCode::Format, context_ + ": trailing bytes after payload");
}

void ByteReader::corrupt(const std::string& what) const { fail(ErrorCode::Format, context_ + ": " + what); }

std::vector<char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

void expect_header(ByteReader& in, std::string_view magic, std::uint32_t version) {
  const std::string got = in.raw(magic.size());
  if (got != magic) in.corrupt("bad magic (expected \"" + std::string(magic) + "\")");
  const std::uint32_t v = in.u32();
  if (v != version)
    in.corrupt("version mismatch (file " + std::to_string(v) + ", supported " + std::to_string(version) + ")");
}

}  // namespace artpipe
