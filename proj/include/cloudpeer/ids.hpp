#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace cloudpeer {

// Unsigned 160-bit integer with wrap-around arithmetic, stored as five
// big-endian 32-bit limbs. Identifier spaces narrower than 160 bits keep
// their values masked to the low `bits`.
class U160 {
public:
    static constexpr int kBits = 160;

    constexpr U160() = default;

    static U160 from_u64(std::uint64_t v);
    static U160 from_bytes(const std::array<std::uint8_t, 20>& bytes);
    static U160 from_hex(std::string_view hex);
    static U160 pow2(int k);

    // 2^bits - 1; bits in [1, 160].
    static U160 mask(int bits);

    bool bit(int k) const;
    bool is_zero() const;

    // Low `bits` bits.
    U160 masked(int bits) const;
    U160 shifted_right(int n) const;

    // Lowercase hex, ceil(bits/4) digits.
    std::string hex(int bits = kBits) const;

    friend U160 operator+(const U160& a, const U160& b);
    friend U160 operator-(const U160& a, const U160& b);
    friend bool operator==(const U160&, const U160&) = default;
    friend std::strong_ordering operator<=>(const U160& a, const U160& b) { return a.limbs_ <=> b.limbs_; }

private:
    std::array<std::uint32_t, 5> limbs_{};
};

// Position of a Cloud peer in the circular identifier space.
struct NodeId {
    U160 value;

    friend bool operator==(const NodeId&, const NodeId&) = default;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Key of an object (query, index cell) in the same identifier space.
struct OverlayKey {
    U160 value;

    friend bool operator==(const OverlayKey&, const OverlayKey&) = default;
    friend auto operator<=>(const OverlayKey&, const OverlayKey&) = default;
};

inline OverlayKey key_of(const NodeId& id) { return OverlayKey{id.value}; }

// min(|a-b|, 2^bits - |a-b|).
U160 circular_distance(const U160& a, const U160& b, int bits);

// Distance travelling from `from` in increasing direction to `to`, mod 2^bits.
U160 clockwise_distance(const U160& from, const U160& to, int bits);

// Digit `index` (0 = most significant) of a `bits`-wide value in base 2^bits_per_digit.
unsigned digit_at(const U160& v, int bits, int bits_per_digit, int index);

// Number of leading base-2^bits_per_digit digits shared by a and b.
int shared_prefix_length(const U160& a, const U160& b, int bits, int bits_per_digit);

} // namespace cloudpeer
