#include "hrtc/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "hrtc/bitstream.hpp"
#include "hrtc/quantizer.hpp"

namespace hrtc {

namespace {

constexpr char kMagic[4] = {'H', 'R', 'T', 'C'};
constexpr char kFooterMagic[4] = {'H', 'R', 'T', 'F'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint32_t kEndOfBlock = 0xFFFFFFFFu;
constexpr std::uint32_t kMaxChunkBytes = 1u << 30;

void put_u8(std::vector<std::uint8_t>& b, std::uint8_t v) { b.push_back(v); }

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& b, double v) {
    put_u64(b, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t chunk_crc(std::span<const std::uint8_t> payload) {
    uLong c = crc32(0L, Z_NULL, 0);
    c = crc32(c, payload.data(), static_cast<uInt>(payload.size()));
    return static_cast<std::uint32_t>(c);
}

// Cursor over a ByteSource with bounds-checked little-endian reads.
struct Cursor {
    const ByteSource& src;
    std::uint64_t pos = 0;

    void read(std::span<std::uint8_t> out) {
        src.read_at(pos, out);
        pos += out.size();
    }
    std::uint8_t u8() {
        std::uint8_t v;
        read({&v, 1});
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t raw[4];
        read(raw);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(raw[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint8_t raw[8];
        read(raw);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};


std::vector<std::int64_t> quantized_origins(const FileHeader& h) {
    std::vector<std::int64_t> q(h.nd);
    for (std::uint32_t k = 0; k < h.nd; ++k) {
        q[k] = quantize(h.dims[k].origin, h.eps_q);
    }
    return q;
}

void validate_header(const FileHeader& h) {
    if (h.nd == 0 || h.dims.size() != h.nd) {
        throw usage_error("container: header needs one DimInfo per dimension");
    }
    if (h.frames == 0) throw usage_error("container: frame count must be >= 1");
    if (h.block_size < 2) throw usage_error("container: block size must be >= 2");
    if (h.chunk_len < 1) throw usage_error("container: chunk length must be >= 1");
    if (!(std::isfinite(h.eps_q) && h.eps_q > 0.0) || !(std::isfinite(h.eps_f) && h.eps_f >= 0.0)) {
        throw usage_error("container: invalid error bounds");
    }
    for (const auto& d : h.dims) {
        if (d.key_width < 1 || d.key_width > 64 || !std::isfinite(d.origin)) {
            throw usage_error("container: invalid dimension info");
        }
    }
}

}  // namespace

unsigned keyframe_width(double edge, double eps_q) {
    if (!(std::isfinite(edge) && edge >= 0.0)) {
        throw usage_error("keyframe_width: bounding-box edge must be finite");
    }
    const double ratio = edge / (2.0 * eps_q);
    if (!(ratio > 1.0)) return 1;
    const unsigned w = static_cast<unsigned>(std::ceil(std::log2(ratio)));
    return std::min(std::max(w, 1u), 64u);
}

ContainerWriter::ContainerWriter(ByteSink& sink, const FileHeader& header)
    : sink_(sink), header_(header) {
    validate_header(header_);
    origin_q_ = quantized_origins(header_);
    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kMagic, kMagic + 4);
    put_u8(buf, kVersion);
    put_u32(buf, header_.nd);
    put_u64(buf, header_.frames);
    put_f64(buf, header_.eps_q);
    put_f64(buf, header_.eps_f);
    put_u32(buf, header_.block_size);
    put_u32(buf, header_.chunk_len);
    for (const auto& d : header_.dims) {
        put_f64(buf, d.origin);
        put_u8(buf, d.key_width);
    }
    sink_.write(buf);
}

void ContainerWriter::begin_block(std::uint32_t frame_count,
                                  std::span<const std::int64_t> keyframe_q) {
    if (finished_ || in_block_) throw usage_error("container: begin_block out of order");
    if (frame_count < 1 || frame_count > header_.block_size) {
        throw usage_error("container: bad block frame count");
    }
    if (keyframe_q.size() != header_.nd) {
        throw usage_error("container: key frame arity mismatch");
    }
    block_offsets_.push_back(sink_.size());
    std::vector<std::uint8_t> buf;
    put_u32(buf, frame_count);
    BitWriter bits;
    for (std::uint32_t k = 0; k < header_.nd; ++k) {
        const unsigned w = header_.dims[k].key_width;
        const std::int64_t offset = keyframe_q[k] - origin_q_[k];
        const std::int64_t limit = w >= 63 ? std::int64_t(-1) >> 1
                                           : (std::int64_t{1} << w) - 1;
        if (offset < 0 || offset > limit) {
            throw data_error("container: key-frame value outside declared bounds");
        }
        bits.put(static_cast<std::uint64_t>(offset), w);
    }
    const auto packed = bits.take();
    buf.insert(buf.end(), packed.begin(), packed.end());
    sink_.write(buf);
    frames_written_ += frame_count;
    in_block_ = true;
}

void ContainerWriter::write_chunk(std::uint32_t n, std::span<const std::uint8_t> payload) {
    if (!in_block_) throw usage_error("container: chunk outside a block");
    if (n == 0 || payload.size() > kMaxChunkBytes) {
        throw usage_error("container: bad chunk");
    }
    std::vector<std::uint8_t> buf;
    put_u32(buf, static_cast<std::uint32_t>(payload.size()));
    put_u32(buf, n);
    put_u32(buf, chunk_crc(payload));
    sink_.write(buf);
    sink_.write(payload);
}

void ContainerWriter::end_block() {
    if (!in_block_) throw usage_error("container: end_block without begin_block");
    std::vector<std::uint8_t> buf;
    put_u32(buf, kEndOfBlock);
    sink_.write(buf);
    in_block_ = false;
}

void ContainerWriter::finish() {
    if (in_block_ || finished_) throw usage_error("container: finish out of order");
    if (frames_written_ != header_.frames) {
        throw data_error("container: frame count mismatch at finish");
    }
    std::vector<std::uint8_t> buf;
    for (const std::uint64_t off : block_offsets_) put_u64(buf, off);
    put_u64(buf, block_offsets_.size());
    buf.insert(buf.end(), kFooterMagic, kFooterMagic + 4);
    sink_.write(buf);
    finished_ = true;
}

ContainerReader::ContainerReader(const ByteSource& source) : source_(source) {
    Cursor c{source_};
    char magic[4];
    c.read({reinterpret_cast<std::uint8_t*>(magic), 4});
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw data_error("container: bad magic");
    }
    const std::uint8_t version = c.u8();
    if (version != kVersion) {
        throw data_error("container: unsupported version");
    }
    header_.nd = c.u32();
    header_.frames = c.u64();
    header_.eps_q = c.f64();
    header_.eps_f = c.f64();
    header_.block_size = c.u32();
    header_.chunk_len = c.u32();
    if (header_.nd == 0 || header_.nd > (1u << 24)) {
        throw data_error("container: implausible dimension count");
    }
    header_.dims.resize(header_.nd);
    for (auto& d : header_.dims) {
        d.origin = c.f64();
        d.key_width = c.u8();
    }
    try {
        validate_header(header_);
    } catch (const usage_error& e) {
        throw data_error(std::string("container: ") + e.what());
    }
    origin_q_ = quantized_origins(header_);

    const std::uint64_t first_block = c.pos;
    // Footer: counted block offsets, count, magic, read from the back.
    const std::uint64_t total = source_.size();
    bool ok = total >= first_block + 12;
    std::uint64_t count = 0;
    if (ok) {
        Cursor tail{source_, total - 12};
        count = tail.u64();
        char fmagic[4];
        tail.read({reinterpret_cast<std::uint8_t*>(fmagic), 4});
        ok = std::memcmp(fmagic, kFooterMagic, 4) == 0 &&
             count <= (total - first_block - 12) / 8;
    }
    if (ok) {
        Cursor foot{source_, total - 12 - count * 8};
        std::uint64_t prev = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t off = foot.u64();
            if (off < first_block || off >= total || (i > 0 && off <= prev)) {
                ok = false;
                break;
            }
            block_offsets_.push_back(off);
            prev = off;
        }
    }
    if (!ok) {
        block_offsets_.clear();
        footer_ok_ = false;
        scan_blocks(first_block);
    }
}

// Rebuild the block index by walking block structures from the front. Stops
// at the first spot that no longer parses as a block.
void ContainerReader::scan_blocks(std::uint64_t first_block) {
    std::uint64_t kf_bits = 0;
    for (const auto& d : header_.dims) kf_bits += d.key_width;
    const std::uint64_t kf_bytes = (kf_bits + 7) / 8;
    const std::uint64_t total = source_.size();
    std::uint64_t pos = first_block;
    std::uint64_t frames_seen = 0;
    while (frames_seen < header_.frames) {
        if (pos + 4 + kf_bytes > total) return;
        Cursor c{source_, pos};
        const std::uint32_t fc = c.u32();
        if (fc < 1 || fc > header_.block_size) return;
        c.pos += kf_bytes;
        for (;;) {
            if (c.pos + 4 > total) return;
            const std::uint32_t len = c.u32();
            if (len == kEndOfBlock) break;
            if (len > kMaxChunkBytes || c.pos + 8 + len > total) return;
            c.pos += 8 + len;
        }
        block_offsets_.push_back(pos);
        frames_seen += fc;
        pos = c.pos;
    }
}

BlockData ContainerReader::read_block(std::size_t index) const {
    if (index >= block_offsets_.size()) {
        throw usage_error("container: block index out of range");
    }
    const std::string where = " (block " + std::to_string(index) + ")";
    Cursor c{source_, block_offsets_[index]};
    BlockData block;
    block.frame_count = c.u32();
    if (block.frame_count < 1 || block.frame_count > header_.block_size) {
        throw data_error("container: corrupt block frame count" + where);
    }
    std::uint64_t kf_bits = 0;
    for (const auto& d : header_.dims) kf_bits += d.key_width;
    std::vector<std::uint8_t> kf((kf_bits + 7) / 8);
    c.read(kf);
    BitReader bits(kf);
    block.keyframe.resize(header_.nd);
    for (std::uint32_t k = 0; k < header_.nd; ++k) {
        const std::uint64_t u = bits.get(header_.dims[k].key_width);
        block.keyframe[k] = origin_q_[k] + static_cast<std::int64_t>(u);
    }
    for (;;) {
        const std::uint32_t len = c.u32();
        if (len == kEndOfBlock) break;
        if (len > kMaxChunkBytes) {
            throw data_error("container: corrupt chunk length" + where);
        }
        ChunkRecord chunk;
        chunk.n = c.u32();
        const std::uint32_t crc = c.u32();
        chunk.payload.resize(len);
        c.read(chunk.payload);
        if (chunk.n == 0) {
            throw data_error("container: corrupt chunk header" + where);
        }
        if (chunk_crc(chunk.payload) != crc) {
            throw data_error("container: chunk checksum mismatch" + where);
        }
        block.chunks.push_back(std::move(chunk));
    }
    return block;
}

}  // namespace hrtc
