#include "micronap/mac_address.hpp"

#include <cctype>
#include <cstdio>

namespace micronap {

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view s) {
    if (s.size() != 17) return std::nullopt;
    std::array<std::uint8_t, 6> b{};
    for (int i = 0; i < 6; ++i) {
        const int hi = hex_nibble(s[static_cast<std::size_t>(i) * 3]);
        const int lo = hex_nibble(s[static_cast<std::size_t>(i) * 3 + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        if (i < 5 && s[static_cast<std::size_t>(i) * 3 + 2] != ':') return std::nullopt;
        b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return MacAddress(b);
}

bool MacAddress::broadcast() const {
    for (auto v : b_)
        if (v != 0xff) return false;
    return true;
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", b_[0], b_[1], b_[2], b_[3],
                  b_[4], b_[5]);
    return buf;
}

} // namespace micronap
