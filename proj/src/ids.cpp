#include "cloudpeer/ids.hpp"

#include "cloudpeer/errors.hpp"

namespace cloudpeer {

U160 U160::from_u64(std::uint64_t v)
{
    U160 out;
    out.limbs_[4] = static_cast<std::uint32_t>(v);
    out.limbs_[3] = static_cast<std::uint32_t>(v >> 32);
    return out;
}

U160 U160::from_bytes(const std::array<std::uint8_t, 20>& bytes)
{
    U160 out;
    for (int i = 0; i < 5; ++i)
        out.limbs_[i] = (std::uint32_t{bytes[4 * i]} << 24) | (std::uint32_t{bytes[4 * i + 1]} << 16) |
                        (std::uint32_t{bytes[4 * i + 2]} << 8) | std::uint32_t{bytes[4 * i + 3]};
    return out;
}

U160 U160::from_hex(std::string_view hex)
{
    if (hex.empty() || hex.size() > 40)
        throw InvalidArgument("hex identifier must have 1..40 digits");
    U160 out;
    for (char ch : hex) {
        unsigned d;
        if (ch >= '0' && ch <= '9')
            d = static_cast<unsigned>(ch - '0');
        else if (ch >= 'a' && ch <= 'f')
            d = static_cast<unsigned>(ch - 'a' + 10);
        else if (ch >= 'A' && ch <= 'F')
            d = static_cast<unsigned>(ch - 'A' + 10);
        else
            throw InvalidArgument("invalid hex digit in identifier");
        std::uint32_t carry = d;
        for (int i = 4; i >= 0; --i) {
            const std::uint32_t next = out.limbs_[i] >> 28;
            out.limbs_[i] = (out.limbs_[i] << 4) | carry;
            carry = next;
        }
    }
    return out;
}

U160 U160::pow2(int k)
{
    if (k < 0 || k >= kBits)
        throw InvalidArgument("pow2 exponent out of range");
    U160 out;
    out.limbs_[4 - k / 32] = std::uint32_t{1} << (k % 32);
    return out;
}

U160 U160::mask(int bits)
{
    if (bits < 1 || bits > kBits)
        throw InvalidArgument("mask width out of range");
    U160 out;
    for (int k = 0; k < bits; ++k)
        out.limbs_[4 - k / 32] |= std::uint32_t{1} << (k % 32);
    return out;
}

bool U160::bit(int k) const
{
    return (limbs_[4 - k / 32] >> (k % 32)) & 1u;
}

bool U160::is_zero() const
{
    for (auto l : limbs_)
        if (l != 0)
            return false;
    return true;
}

U160 U160::masked(int bits) const
{
    if (bits >= kBits)
        return *this;
    const U160 m = mask(bits);
    U160 out;
    for (int i = 0; i < 5; ++i)
        out.limbs_[i] = limbs_[i] & m.limbs_[i];
    return out;
}

U160 U160::shifted_right(int n) const
{
    U160 out;
    if (n >= kBits)
        return out;
    const int limb_shift = n / 32;
    const int bit_shift = n % 32;
    for (int i = 4; i >= 0; --i) {
        const int src = i - limb_shift;
        if (src < 0)
            continue;
        std::uint64_t v = limbs_[src] >> bit_shift;
        if (bit_shift != 0 && src - 1 >= 0)
            v |= static_cast<std::uint64_t>(limbs_[src - 1]) << (32 - bit_shift);
        out.limbs_[i] = static_cast<std::uint32_t>(v);
    }
    return out;
}

std::string U160::hex(int bits) const
{
    static constexpr char digits[] = "0123456789abcdef";
    const int n = (bits + 3) / 4;
    std::string out(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
        const int nibble = n - 1 - i;
        const std::uint32_t limb = limbs_[4 - nibble / 8];
        out[static_cast<std::size_t>(i)] = digits[(limb >> (4 * (nibble % 8))) & 0xF];
    }
    return out;
}

U160 operator+(const U160& a, const U160& b)
{
    U160 out;
    std::uint64_t carry = 0;
    for (int i = 4; i >= 0; --i) {
        const std::uint64_t s = std::uint64_t{a.limbs_[i]} + b.limbs_[i] + carry;
        out.limbs_[i] = static_cast<std::uint32_t>(s);
        carry = s >> 32;
    }
    return out;
}

U160 operator-(const U160& a, const U160& b)
{
    U160 out;
    std::int64_t borrow = 0;
    for (int i = 4; i >= 0; --i) {
        std::int64_t d = std::int64_t{a.limbs_[i]} - b.limbs_[i] - borrow;
        borrow = d < 0 ? 1 : 0;
        if (d < 0)
            d += std::int64_t{1} << 32;
        out.limbs_[i] = static_cast<std::uint32_t>(d);
    }
    return out;
}

U160 clockwise_distance(const U160& from, const U160& to, int bits)
{
    return (to - from).masked(bits);
}

U160 circular_distance(const U160& a, const U160& b, int bits)
{
    const U160 d1 = clockwise_distance(a, b, bits);
    const U160 d2 = clockwise_distance(b, a, bits);
    return d1 < d2 ? d1 : d2;
}

unsigned digit_at(const U160& v, int bits, int bits_per_digit, int index)
{
    const int top = bits - 1 - index * bits_per_digit;
    unsigned d = 0;
    for (int k = 0; k < bits_per_digit; ++k)
        d = (d << 1) | (v.bit(top - k) ? 1u : 0u);
    return d;
}

int shared_prefix_length(const U160& a, const U160& b, int bits, int bits_per_digit)
{
    const int digits = bits / bits_per_digit;
    for (int i = 0; i < digits; ++i)
        if (digit_at(a, bits, bits_per_digit, i) != digit_at(b, bits, bits_per_digit, i))
            return i;
    return digits;
}

} // namespace cloudpeer
