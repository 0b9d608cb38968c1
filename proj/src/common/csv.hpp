#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace artpipe::csv {

/// Splits one RFC 4180 record (no embedded newlines).
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string quote(std::string_view field);

/// Shortest round-trip decimal representation.
std::string format_number(double value);

std::string join(const std::vector<std::string>& fields);

}  // namespace artpipe::csv
