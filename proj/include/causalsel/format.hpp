#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace causalsel {

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t value);
// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace causalsel
