#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rocketlite/kernels.hpp"
#include "rocketlite/quantize.hpp"
#include "rocketlite/ridge.hpp"

namespace rkl {

struct ModelBundle {
    std::uint32_t version = 1;
    KernelSet kernels;
    LinearClassifier classifier;
    bool quantized = false;
    QuantizedModel qmodel;      // meaningful only when quantized
    std::string config_text;    // canonical training configuration
    std::uint64_t config_digest = 0;

    bool operator==(const ModelBundle&) const = default;
};

// Bundle file: magic "RKLM", u32 version, section table, CRC-64 digest over
// everything before the digest. Round-trips are bit-exact; unknown versions
// and any digest mismatch are rejected.
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

// Serialized form without touching the filesystem (used by digesting and
// fuzz tests).
std::vector<std::uint8_t> encode_bundle(const ModelBundle& bundle);
ModelBundle decode_bundle(std::span<const std::uint8_t> bytes);

// Compilable C source with the quantized parameters as static const arrays;
// byte-stable for a given bundle. Requires a quantized bundle.
std::string export_static_arrays(const ModelBundle& bundle);

// Golden vectors: magic "RKLV", length-prefixed records of raw input,
// clamped-scaled input, integer feature counts, t^q, integer scores and k*.
void emit_golden_vectors(const ModelBundle& bundle, std::span<const Window> windows,
                         const std::string& path);

struct GoldenReplayReport {
    int total = 0;
    int mismatches = 0;
};

// Re-runs the quantized path on each stored input and compares every stored
// stage bit-for-bit.
GoldenReplayReport replay_golden_vectors(const ModelBundle& bundle, const std::string& path);

struct MemoryReport {
    std::int64_t parameter_bytes = 0;
    std::int64_t working_buffer_bytes = 0;
    std::map<std::string, std::int64_t> parameter_breakdown;
    std::map<std::string, std::int64_t> working_breakdown;
};

// Analytic footprint of the quantized inference path as firmware would hold
// it: flash-resident parameters and peak RAM working buffers.
MemoryReport estimate_memory(const ModelBundle& bundle);

}  // namespace rkl
