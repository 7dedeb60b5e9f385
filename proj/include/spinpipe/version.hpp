#pragma once
// Library version and the configuration fingerprint stamped into every output.

#include <cstdint>
#include <string>
#include <string_view>

namespace spinpipe {

inline constexpr std::string_view version_string = "0.1.0";

// FNV-1a, 64-bit.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace spinpipe
