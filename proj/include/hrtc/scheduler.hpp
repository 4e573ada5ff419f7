#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hrtc/container.hpp"
#include "hrtc/segmenter.hpp"

namespace hrtc {

enum class Kernel { division_free, reference };

struct CompressOptions {
    ErrorBudget budget;
    std::uint32_t block_size = 2048;
    std::uint32_t chunk_len = 1024;  // support vectors per chunk
    Kernel kernel = Kernel::division_free;
};

// Declared coordinate range of one dimension; fixes the key-frame width.
struct DimBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Streaming single-pass compressor. Frames go in one at a time; whole blocks
/// (key frame + chunks) come out append-only. Support vectors from all
/// dimensions are interleaved in (start time, dimension) order via two
/// priority queues, so no per-vector dimension index is stored.
class Compressor {
  public:
    Compressor(ByteSink& sink, std::uint64_t frames, std::span<const DimBounds> bounds,
               const CompressOptions& options);
    ~Compressor();

    Compressor(const Compressor&) = delete;
    Compressor& operator=(const Compressor&) = delete;

    void add_frame(std::span<const double> coords);
    void finish();

    std::uint64_t frames_added() const;
    std::uint64_t bytes_written() const;
    std::uint64_t support_vectors_emitted() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

using FrameSink = std::function<void(std::uint64_t t, std::span<const double>)>;

/// Block-wise decoder: replays the scheduler's interleaving in reverse and
/// interpolates every frame from the active segment of each dimension.
class Decompressor {
  public:
    explicit Decompressor(const ContainerReader& reader);

    // Decode every block in order; emits exactly header().frames frames.
    void run(const FrameSink& sink) const;

    // Decode one block (random access); emits that block's frames.
    void decode_block(std::size_t index, const FrameSink& sink) const;

  private:
    const ContainerReader& reader_;
};

// Compress a full in-memory trajectory; convenience for tests and tools.
std::vector<std::uint8_t> compress_frames(std::span<const double> data, std::uint32_t nd,
                                          std::span<const DimBounds> bounds,
                                          const CompressOptions& options);

// Decompress a full in-memory container.
std::vector<double> decompress_bytes(std::span<const std::uint8_t> bytes, std::uint32_t& nd,
                                     std::uint64_t& frames);

}  // namespace hrtc
