#include "rocketlite/crc64.hpp"

#include <array>

namespace rkl {

namespace {

// ECMA-182 polynomial, bit-reflected.
constexpr std::uint64_t kPolyReflected = 0xC96C5795D7870F42ULL;

constexpr std::array<std::uint64_t, 256> make_table() {
    std::array<std::uint64_t, 256> table{};
    for (std::uint32_t b = 0; b < 256; ++b) {
        std::uint64_t crc = b;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 1) ? (crc >> 1) ^ kPolyReflected : crc >> 1;
        table[b] = crc;
    }
    return table;
}

constexpr auto kTable = make_table();

}  // namespace

std::uint64_t crc64_init() { return ~0ULL; }

std::uint64_t crc64_update(std::uint64_t state, const void* data, std::size_t size) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < size; ++i)
        state = kTable[(state ^ p[i]) & 0xFF] ^ (state >> 8);
    return state;
}

std::uint64_t crc64_final(std::uint64_t state) { return ~state; }

std::uint64_t crc64(const void* data, std::size_t size) {
    return crc64_final(crc64_update(crc64_init(), data, size));
}

std::uint64_t crc64(std::string_view text) { return crc64(text.data(), text.size()); }

}  // namespace rkl
