#pragma once

#include <cstdint>
#include <string_view>

namespace twinphoton {

/// Stable 64-bit stream seed derived from a root seed and a stream name.
/// Independent of platform, iteration order and std::hash.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

/// Same, for numbered streams (Monte-Carlo sample index).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

}  // namespace twinphoton
