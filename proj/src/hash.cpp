#include "hybrid_tetris/hash.hpp"

#include <stdexcept>

namespace hybrid_tetris {

std::string to_hex(std::uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::uint64_t from_hex(std::string_view text) {
    if (text.empty() || text.size() > 16) {
        throw std::invalid_argument("hex digest must have 1..16 digits");
    }
    std::uint64_t value = 0;
    for (const char ch : text) {
        int digit = 0;
        if (ch >= '0' && ch <= '9') {
            digit = ch - '0';
        } else if (ch >= 'a' && ch <= 'f') {
            digit = ch - 'a' + 10;
        } else if (ch >= 'A' && ch <= 'F') {
            digit = ch - 'A' + 10;
        } else {
            throw std::invalid_argument("invalid hex digit");
        }
        value = (value << 4) | static_cast<std::uint64_t>(digit);
    }
    return value;
}

}  // namespace hybrid_tetris
