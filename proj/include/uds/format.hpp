#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace uds {

/// Shortest round-trip decimal form of `v`. Infinities print as "inf" /
/// "-inf" and NaN as "nan" so CSV files stay byte-stable across runs.
[[nodiscard]] inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

}  // namespace uds
