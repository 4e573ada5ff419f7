#include "hrtc/codec.hpp"

#include <bit>
#include <limits>

#include "hrtc/quantizer.hpp"

namespace hrtc {

unsigned value_width(std::uint32_t v) {
    const unsigned w = static_cast<unsigned>(std::bit_width(v));
    return w == 31 ? 32 : w;
}

std::vector<CodecGroup> optimal_partition(std::span<const std::uint32_t> values) {
    const std::size_t n = values.size();
    if (n == 0) return {};
    if (n > (std::size_t{1} << 31)) {
        throw usage_error("codec: input too long");
    }
    // cost[i] = minimal bits for the suffix starting at i; best[i] = group
    // length taken there. Scanning at most 64 candidates per position.
    std::vector<std::uint64_t> cost(n + 1, 0);
    std::vector<std::uint8_t> best(n, 1);
    for (std::size_t i = n; i-- > 0;) {
        std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
        std::uint32_t run_max = 0;
        const std::size_t max_len = std::min<std::size_t>(kMaxGroupCount, n - i);
        for (std::size_t len = 1; len <= max_len; ++len) {
            run_max |= values[i + len - 1];
            const std::uint64_t c =
                kGroupHeaderBits + len * value_width(run_max) + cost[i + len];
            if (c < best_cost) {
                best_cost = c;
                best[i] = static_cast<std::uint8_t>(len);
            }
        }
        cost[i] = best_cost;
    }
    std::vector<CodecGroup> groups;
    for (std::size_t i = 0; i < n;) {
        const std::uint8_t len = best[i];
        std::uint32_t run_max = 0;
        for (std::size_t j = 0; j < len; ++j) run_max |= values[i + j];
        groups.push_back({static_cast<std::uint8_t>(value_width(run_max)), len});
        i += len;
    }
    return groups;
}

std::size_t encoded_bits(std::span<const CodecGroup> groups) {
    std::size_t bits = 0;
    for (const auto& g : groups) {
        bits += kGroupHeaderBits + static_cast<std::size_t>(g.count) * g.width;
    }
    return bits;
}

void encode_stream(BitWriter& out, std::span<const std::uint32_t> values) {
    const auto groups = optimal_partition(values);
    std::size_t pos = 0;
    for (const auto& g : groups) {
        const unsigned code = g.width == 32 ? 31u : g.width;
        out.put(code, 5);
        out.put(static_cast<unsigned>(g.count) - 1u, 6);
        for (std::size_t j = 0; j < g.count; ++j) {
            out.put(values[pos + j], g.width);
        }
        pos += g.count;
    }
}

std::vector<std::uint32_t> decode_stream(BitReader& in, std::size_t n_values) {
    std::vector<std::uint32_t> values;
    values.reserve(n_values);
    while (values.size() < n_values) {
        if (in.bits_left() < kGroupHeaderBits) {
            throw data_error("codec: truncated group header");
        }
        const unsigned code = static_cast<unsigned>(in.get(5));
        const unsigned count = static_cast<unsigned>(in.get(6)) + 1u;
        const unsigned width = code == 31 ? 32u : code;
        if (values.size() + count > n_values) {
            throw data_error("codec: group overruns the declared value count");
        }
        if (in.bits_left() < static_cast<std::size_t>(count) * width) {
            throw data_error("codec: truncated group payload");
        }
        for (unsigned j = 0; j < count; ++j) {
            values.push_back(static_cast<std::uint32_t>(in.get(width)));
        }
    }
    return values;
}

void pack_fixed(BitWriter& out, std::span<const std::uint64_t> values, unsigned width) {
    if (width < 1 || width > 64) {
        throw usage_error("pack_fixed: width must be in 1..64");
    }
    const std::uint64_t limit =
        width == 64 ? std::numeric_limits<std::uint64_t>::max()
                    : (std::uint64_t{1} << width) - 1ull;
    for (const std::uint64_t v : values) {
        if (v > limit) {
            throw data_error("pack_fixed: value does not fit the declared width");
        }
        out.put(v, width);
    }
}

std::vector<std::uint64_t> unpack_fixed(BitReader& in, std::size_t n, unsigned width) {
    if (width < 1 || width > 64) {
        throw usage_error("unpack_fixed: width must be in 1..64");
    }
    std::vector<std::uint64_t> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(in.get(width));
    }
    return values;
}

std::vector<std::uint8_t> encode_chunk(std::span<const std::int64_t> dqs,
                                       std::span<const std::uint32_t> dts) {
    if (dqs.size() != dts.size()) {
        throw usage_error("encode_chunk: mismatched delta arrays");
    }
    const std::size_t n = dqs.size();
    std::vector<std::uint32_t> values(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t zz = zigzag(dqs[i]);
        if (zz > std::numeric_limits<std::uint32_t>::max()) {
            throw range_error("encode_chunk: value delta exceeds 32-bit codec range");
        }
        values[n - 1 - i] = static_cast<std::uint32_t>(zz);
        values[n + i] = dts[i];
    }
    BitWriter out;
    encode_stream(out, values);
    return out.take();
}

void decode_chunk(std::span<const std::uint8_t> payload, std::size_t n,
                  std::vector<std::int64_t>& dqs, std::vector<std::uint32_t>& dts) {
    BitReader in(payload);
    const auto values = decode_stream(in, 2 * n);
    dqs.resize(n);
    dts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        dqs[i] = unzigzag(values[n - 1 - i]);
        dts[i] = values[n + i];
    }
}

}  // namespace hrtc
