#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrtc/io.hpp"

namespace hrtc {

// On-disk layout, all integers little-endian, version 1:
//
//   header   "HRTC" u8:version u32:nd u64:frames f64:eps_q f64:eps_f
//            u32:block_size u32:chunk_len  nd x { f64:origin u8:key_width }
//   block    u32:frame_count
//            key frame: per-dimension quantized offsets from the quantized
//              origin, packed LSB-first at key_width bits each
//            chunks: { u32:byte_len u32:n u32:crc32 payload } ...
//            u32 0xFFFFFFFF  (end-of-block marker)
//   footer   u64:block_offset x block_count  u64:block_count  "HRTF"
//
// The footer is read from the end of the file and gives O(1) seeking; when it
// is missing or damaged the reader rebuilds the block index by a sequential
// scan and reports that it did so.

struct DimInfo {
    double origin = 0.0;
    std::uint8_t key_width = 1;
};

struct FileHeader {
    std::uint32_t nd = 0;
    std::uint64_t frames = 0;
    double eps_q = 0.0;
    double eps_f = 0.0;
    std::uint32_t block_size = 0;
    std::uint32_t chunk_len = 0;
    std::vector<DimInfo> dims;
};

struct ChunkRecord {
    std::uint32_t n = 0;  // support vectors in this chunk
    std::vector<std::uint8_t> payload;
};

struct BlockData {
    std::uint32_t frame_count = 0;
    std::vector<std::int64_t> keyframe;  // absolute grid values per dimension
    std::vector<ChunkRecord> chunks;
};

// Key-frame bit width for a bounding-box edge: ceil(log2(edge / (2 eps_q))),
// at least 1.
unsigned keyframe_width(double edge, double eps_q);

class ContainerWriter {
  public:
    ContainerWriter(ByteSink& sink, const FileHeader& header);

    void begin_block(std::uint32_t frame_count, std::span<const std::int64_t> keyframe_q);
    void write_chunk(std::uint32_t n, std::span<const std::uint8_t> payload);
    void end_block();
    void finish();

    std::uint64_t bytes_written() const { return sink_.size(); }

  private:
    ByteSink& sink_;
    FileHeader header_;
    std::vector<std::int64_t> origin_q_;
    std::vector<std::uint64_t> block_offsets_;
    std::uint64_t frames_written_ = 0;
    bool in_block_ = false;
    bool finished_ = false;
};

class ContainerReader {
  public:
    explicit ContainerReader(const ByteSource& source);

    const FileHeader& header() const { return header_; }
    std::size_t block_count() const { return block_offsets_.size(); }
    BlockData read_block(std::size_t index) const;

    // False when the footer was unusable and the index came from a scan.
    bool footer_ok() const { return footer_ok_; }

  private:
    void scan_blocks(std::uint64_t first_block);

    const ByteSource& source_;
    FileHeader header_;
    std::vector<std::int64_t> origin_q_;
    std::vector<std::uint64_t> block_offsets_;
    bool footer_ok_ = true;
};

}  // namespace hrtc
