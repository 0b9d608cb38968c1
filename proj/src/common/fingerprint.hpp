#pragma once

#include <span>
#include <string>

namespace artpipe {

/// Lowercase hex SHA-256 of a byte buffer.
std::string sha256_hex(std::span<const char> bytes);
std::string sha256_file(const std::string& path);

}  // namespace artpipe
