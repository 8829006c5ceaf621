#ifndef MICRONAP_MAC_ADDRESS_HPP
#define MICRONAP_MAC_ADDRESS_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace micronap {

// 48-bit IEEE MAC address. Kept as a value type so ledgers and maps can key
// on it directly.
class MacAddress {
  public:
    constexpr MacAddress() = default;
    explicit constexpr MacAddress(const std::array<std::uint8_t, 6>& b) : b_(b) {}

    // Parses "aa:bb:cc:dd:ee:ff" (case-insensitive). Returns nullopt on any
    // malformation; callers decide whether that skips a record or fails a file.
    static std::optional<MacAddress> parse(std::string_view s);

    // Group bit of the first octet. Broadcast is the all-ones special case.
    bool multicast() const { return (b_[0] & 0x01) != 0; }
    bool broadcast() const;

    std::string to_string() const;

    const std::array<std::uint8_t, 6>& bytes() const { return b_; }

    auto operator<=>(const MacAddress&) const = default;

  private:
    std::array<std::uint8_t, 6> b_{};
};

} // namespace micronap

template <> struct std::hash<micronap::MacAddress> {
    std::size_t operator()(const micronap::MacAddress& m) const noexcept {
        std::uint64_t v = 0;
        std::memcpy(&v, m.bytes().data(), 6);
        return std::hash<std::uint64_t>{}(v);
    }
};

#endif
