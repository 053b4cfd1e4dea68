#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace cloudpeer {

using Sha1Digest = std::array<std::uint8_t, 20>;

// Incremental SHA-1 (FIPS 180-4). Used for identifier derivation and trace hashing,
// not for anything security sensitive.
class Sha1 {
public:
    Sha1();

    void update(std::span<const std::uint8_t> data);
    void update(std::string_view text);
    Sha1Digest finish();

private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 5> h_;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t total_bytes_ = 0;
};

Sha1Digest sha1(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);

} // namespace cloudpeer
