#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hrtc/errors.hpp"

namespace hrtc {

// LSB-first bit packing into little-endian bytes: the first bit written is
// the lowest bit of the first byte.
class BitWriter {
  public:
    void put(std::uint64_t v, unsigned n) {
        while (n > 32) {
            put32(static_cast<std::uint32_t>(v), 32);
            v >>= 32;
            n -= 32;
        }
        put32(static_cast<std::uint32_t>(v), n);
    }

    // Pad with zero bits to the next byte boundary.
    void align() {
        if (nbits_ > 0) {
            bytes_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ = 0;
            nbits_ = 0;
        }
    }

    std::size_t bit_count() const { return bytes_.size() * 8 + nbits_; }

    std::vector<std::uint8_t> take() {
        align();
        return std::move(bytes_);
    }

  private:
    void put32(std::uint32_t v, unsigned n) {
        if (n == 0) return;
        if (n < 32) v &= (1u << n) - 1u;
        acc_ |= static_cast<std::uint64_t>(v) << nbits_;
        nbits_ += n;
        while (nbits_ >= 8) {
            bytes_.push_back(static_cast<std::uint8_t>(acc_));
            acc_ >>= 8;
            nbits_ -= 8;
        }
    }

    std::vector<std::uint8_t> bytes_;
    std::uint64_t acc_ = 0;
    unsigned nbits_ = 0;
};

class BitReader {
  public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t get(unsigned n) {
        std::uint64_t v = 0;
        unsigned got = 0;
        while (got < n) {
            const unsigned take = std::min(n - got, 32u);
            v |= static_cast<std::uint64_t>(get32(take)) << got;
            got += take;
        }
        return v;
    }

    std::size_t bits_left() const { return (bytes_.size() - pos_) * 8 + nbits_; }

  private:
    std::uint32_t get32(unsigned n) {
        if (n == 0) return 0;
        while (nbits_ < n) {
            if (pos_ >= bytes_.size()) {
                throw data_error("bitstream: truncated input");
            }
            acc_ |= static_cast<std::uint64_t>(bytes_[pos_++]) << nbits_;
            nbits_ += 8;
        }
        const std::uint32_t v =
            static_cast<std::uint32_t>(acc_ & ((n < 32 ? (1ull << n) : 0x100000000ull) - 1ull));
        acc_ >>= n;
        nbits_ -= n;
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::uint64_t acc_ = 0;
    unsigned nbits_ = 0;
};

}  // namespace hrtc
