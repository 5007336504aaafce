#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace rkl {

// CRC-64/XZ (ECMA-182 polynomial, reflected, init/xorout all-ones).
// crc64("123456789") == 0x995DC9BBDF1939FA.
std::uint64_t crc64(const void* data, std::size_t size);
std::uint64_t crc64(std::string_view text);

// Streaming form: begin with crc64_init(), fold chunks, finish with
// crc64_final().
std::uint64_t crc64_init();
std::uint64_t crc64_update(std::uint64_t state, const void* data, std::size_t size);
std::uint64_t crc64_final(std::uint64_t state);

}  // namespace rkl
