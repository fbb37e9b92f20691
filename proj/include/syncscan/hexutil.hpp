#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace syncscan {

std::string to_hex(std::span<const uint8_t> bytes);

// Accepts upper or lower case; throws InvalidArgument on odd length or
// non-hex characters.
std::vector<uint8_t> from_hex(std::string_view hex);

} // namespace syncscan
