#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrtc/bitstream.hpp"

namespace hrtc {

// Group-partitioned integer coding: runs of consecutive values share one bit
// width, chosen as the width of the largest member. Group boundaries are
// picked by dynamic programming to minimize total bits. Each group costs an
// 11-bit header (5-bit width code, 6-bit count-1) plus count*width payload.
//
// Width codes 0..30 mean that width; code 31 means width 32. Groups whose
// widest value needs 31 bits are stored at width 32.
struct CodecGroup {
    std::uint8_t width = 0;  // 0..30 or 32
    std::uint8_t count = 0;  // 1..64

    friend bool operator==(const CodecGroup&, const CodecGroup&) = default;
};

inline constexpr unsigned kGroupHeaderBits = 11;
inline constexpr unsigned kMaxGroupCount = 64;

// Storage width for one value (31 is promoted to 32).
unsigned value_width(std::uint32_t v);

// Bit-minimal partition of `values` into groups of at most 64.
std::vector<CodecGroup> optimal_partition(std::span<const std::uint32_t> values);

std::size_t encoded_bits(std::span<const CodecGroup> groups);

void encode_stream(BitWriter& out, std::span<const std::uint32_t> values);
std::vector<std::uint32_t> decode_stream(BitReader& in, std::size_t n_values);

// Fixed-width packing used for key frames: no headers, no grouping.
void pack_fixed(BitWriter& out, std::span<const std::uint64_t> values, unsigned width);
std::vector<std::uint64_t> unpack_fixed(BitReader& in, std::size_t n, unsigned width);

// Chunk payload: n support vectors laid out double-ended so value deltas and
// durations group with their own kind: dq_n..dq_1 (zigzagged), dt_1..dt_n.
std::vector<std::uint8_t> encode_chunk(std::span<const std::int64_t> dqs,
                                       std::span<const std::uint32_t> dts);
void decode_chunk(std::span<const std::uint8_t> payload, std::size_t n,
                  std::vector<std::int64_t>& dqs, std::vector<std::uint32_t>& dts);

}  // namespace hrtc
