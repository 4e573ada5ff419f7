#include "hrtc/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <variant>

#include "hrtc/codec.hpp"

namespace hrtc {

namespace {

struct ExpectedEntry {
    std::uint64_t t = 0;
    std::uint32_t k = 0;

    friend bool operator>(const ExpectedEntry& a, const ExpectedEntry& b) {
        return a.t != b.t ? a.t > b.t : a.k > b.k;
    }
};

struct KnownEntry {
    std::uint64_t t = 0;
    std::uint32_t k = 0;
    SupportVector sv;

    friend bool operator>(const KnownEntry& a, const KnownEntry& b) {
        return a.t != b.t ? a.t > b.t : a.k > b.k;
    }
};

template <class T>
using MinQueue = std::priority_queue<T, std::vector<T>, std::greater<T>>;

}  // namespace

struct Compressor::Impl {
    template <class K>
    using Segments = std::vector<K>;

    CompressOptions options;
    SegmenterConfig seg_cfg;
    std::uint32_t nd = 0;
    std::uint64_t frames_total = 0;
    std::uint64_t t = 0;  // next frame index
    ContainerWriter writer;
    std::variant<Segments<ExtremaSegmenter>, Segments<ConeSegmenter>> segments;
    std::vector<std::uint64_t> seg_start;  // open segment start time per dim
    MinQueue<ExpectedEntry> expected;
    MinQueue<KnownEntry> known;
    std::vector<std::int64_t> pending_dq;  // chunk under construction
    std::vector<std::uint32_t> pending_dt;
    std::vector<std::int64_t> quantized;     // scratch, one frame
    std::vector<SupportVector> sv_scratch;  // scratch, segments completed per step
    std::uint64_t sv_count = 0;

    Impl(ByteSink& sink, std::uint64_t frames, std::span<const DimBounds> bounds,
         const CompressOptions& opts)
        : options(opts),
          seg_cfg(SegmenterConfig::make(opts.budget, opts.block_size)),
          nd(static_cast<std::uint32_t>(bounds.size())),
          frames_total(frames),
          writer(sink, make_header(frames, bounds, opts)) {
        if (opts.kernel == Kernel::division_free) {
            segments.emplace<Segments<ExtremaSegmenter>>(nd, ExtremaSegmenter(seg_cfg));
        } else {
            segments.emplace<Segments<ConeSegmenter>>(nd, ConeSegmenter(seg_cfg));
        }
        seg_start.resize(nd, 0);
        quantized.resize(nd, 0);
        pending_dq.reserve(opts.chunk_len);
        pending_dt.reserve(opts.chunk_len);
    }

    static FileHeader make_header(std::uint64_t frames, std::span<const DimBounds> bounds,
                                  const CompressOptions& opts) {
        if (bounds.empty()) throw usage_error("compress: need at least one dimension");
        if (frames == 0) throw usage_error("compress: need at least one frame");
        FileHeader h;
        h.nd = static_cast<std::uint32_t>(bounds.size());
        h.frames = frames;
        h.eps_q = opts.budget.eps_q;
        h.eps_f = opts.budget.eps_f;
        h.block_size = opts.block_size;
        h.chunk_len = opts.chunk_len;
        h.dims.resize(h.nd);
        for (std::uint32_t k = 0; k < h.nd; ++k) {
            if (!(bounds[k].hi >= bounds[k].lo)) {
                throw usage_error("compress: invalid bounds for dimension " +
                                  std::to_string(k));
            }
            h.dims[k].origin = bounds[k].lo;
            // Width from the quantized bounds; quantize is monotone, so every
            // in-range key-frame offset fits by construction. This can exceed
            // keyframe_width(hi - lo) by one bit when rounding straddles the
            // box edge.
            const std::int64_t span = quantize(bounds[k].hi, opts.budget.eps_q) -
                                      quantize(bounds[k].lo, opts.budget.eps_q);
            const unsigned w = std::max<unsigned>(
                1u, static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(span))));
            h.dims[k].key_width = static_cast<std::uint8_t>(std::min(w, 64u));
        }
        return h;
    }

    void append_output(const KnownEntry& e) {
        pending_dq.push_back(e.sv.delta_q);
        pending_dt.push_back(e.sv.delta_t);
        ++sv_count;
        // Each support vector occupies two output slots.
        if (2 * pending_dq.size() >= 2 * static_cast<std::size_t>(options.chunk_len)) {
            flush_chunk();
        }
    }

    void flush_chunk() {
        if (pending_dq.empty()) return;
        const auto payload = encode_chunk(pending_dq, pending_dt);
        writer.write_chunk(static_cast<std::uint32_t>(pending_dq.size()), payload);
        pending_dq.clear();
        pending_dt.clear();
    }

    // Move every known segment whose turn has come into the output buffer.
    void drain() {
        while (!known.empty() && !expected.empty()) {
            const KnownEntry& kn = known.top();
            const ExpectedEntry& ex = expected.top();
            if (kn.t != ex.t || kn.k != ex.k) break;
            const KnownEntry e = kn;
            known.pop();
            expected.pop();
            expected.push({e.t + e.sv.delta_t, e.k});
            append_output(e);
        }
    }

    template <class K>
    void consume(Segments<K>& segs, std::span<const double> coords) {
        const double eps_q = options.budget.eps_q;
        if (t % options.block_size == 0) {
            if (t > 0) close_block(segs);
            for (std::uint32_t k = 0; k < nd; ++k) {
                quantized[k] = quantize(coords[k], eps_q);
            }
            const std::uint32_t frame_count = static_cast<std::uint32_t>(
                std::min<std::uint64_t>(options.block_size, frames_total - t));
            writer.begin_block(frame_count, quantized);
            while (!expected.empty()) expected.pop();
            for (std::uint32_t k = 0; k < nd; ++k) {
                segs[k].reset(quantized[k]);
                seg_start[k] = t;
                expected.push({t, k});
            }
        } else {
            for (std::uint32_t k = 0; k < nd; ++k) {
                const std::int64_t x_sub = quantize(coords[k], seg_cfg.sub_eps);
                sv_scratch.clear();
                segs[k].add(x_sub, sv_scratch);
                for (const SupportVector& sv : sv_scratch) {
                    known.push({seg_start[k], k, sv});
                    seg_start[k] += sv.delta_t;
                }
            }
            drain();
        }
        ++t;
    }

    // End of a block: flush every open segment, drain them all (sorted by
    // construction of the known queue), close the chunk and the block.
    template <class K>
    void close_block(Segments<K>& segs) {
        for (std::uint32_t k = 0; k < nd; ++k) {
            sv_scratch.clear();
            segs[k].finish(sv_scratch);
            for (const SupportVector& sv : sv_scratch) {
                known.push({seg_start[k], k, sv});
                seg_start[k] += sv.delta_t;
            }
        }
        while (!known.empty()) {
            append_output(known.top());
            known.pop();
        }
        flush_chunk();
        writer.end_block();
    }

    void finish() {
        if (t == 0) throw data_error("compress: empty input");
        if (t != frames_total) {
            throw data_error("compress: expected " + std::to_string(frames_total) +
                             " frames, got " + std::to_string(t));
        }
        std::visit([this](auto& segs) { close_block(segs); }, segments);
        writer.finish();
    }
};

Compressor::Compressor(ByteSink& sink, std::uint64_t frames, std::span<const DimBounds> bounds,
                       const CompressOptions& options)
    : impl_(std::make_unique<Impl>(sink, frames, bounds, options)) {}

Compressor::~Compressor() = default;

void Compressor::add_frame(std::span<const double> coords) {
    if (coords.size() != impl_->nd) {
        throw data_error("compress: frame arity mismatch");
    }
    if (impl_->t >= impl_->frames_total) {
        throw data_error("compress: more frames than declared");
    }
    std::visit([&](auto& segs) { impl_->consume(segs, coords); }, impl_->segments);
}

void Compressor::finish() { impl_->finish(); }

std::uint64_t Compressor::frames_added() const { return impl_->t; }

std::uint64_t Compressor::bytes_written() const { return impl_->writer.bytes_written(); }

std::uint64_t Compressor::support_vectors_emitted() const { return impl_->sv_count; }

namespace {

// Sequential view over a block's chunks, decoded one chunk at a time.
class SupportVectorFeed {
  public:
    SupportVectorFeed(const BlockData& block, std::size_t block_index)
        : block_(block), where_(" (block " + std::to_string(block_index) + ")") {}

    bool next(std::int64_t& dq, std::uint32_t& dt) {
        while (pos_ >= dqs_.size()) {
            if (chunk_ >= block_.chunks.size()) return false;
            const ChunkRecord& c = block_.chunks[chunk_++];
            decode_chunk(c.payload, c.n, dqs_, dts_);
            pos_ = 0;
        }
        dq = dqs_[pos_];
        dt = dts_[pos_];
        ++pos_;
        return true;
    }

    bool exhausted() {
        return pos_ >= dqs_.size() && chunk_ >= block_.chunks.size();
    }

    const std::string& where() const { return where_; }

  private:
    const BlockData& block_;
    std::string where_;
    std::size_t chunk_ = 0;
    std::size_t pos_ = 0;
    std::vector<std::int64_t> dqs_;
    std::vector<std::uint32_t> dts_;
};

struct ActiveSegment {
    SupportVector sv;       // current segment of this dimension
    std::uint64_t t_start;  // absolute frame index of the segment start
    std::int64_t p;         // grid value at the segment start
};

}  // namespace

Decompressor::Decompressor(const ContainerReader& reader) : reader_(reader) {}

void Decompressor::decode_block(std::size_t index, const FrameSink& sink) const {
    const FileHeader& h = reader_.header();
    const BlockData block = reader_.read_block(index);
    const std::uint64_t t0 = static_cast<std::uint64_t>(index) * h.block_size;
    if (t0 >= h.frames ||
        block.frame_count != std::min<std::uint64_t>(h.block_size, h.frames - t0)) {
        throw data_error("decompress: block frame count inconsistent with header (block " +
                         std::to_string(index) + ")");
    }
    const std::uint64_t t_end = t0 + block.frame_count;  // one past the last frame
    SupportVectorFeed feed(block, index);

    std::vector<ActiveSegment> active(h.nd);
    MinQueue<ExpectedEntry> expected;
    for (std::uint32_t k = 0; k < h.nd; ++k) {
        active[k] = {SupportVector{0, 0}, t0, block.keyframe[k]};
        expected.push({t0, k});
    }

    std::vector<double> frame(h.nd);
    for (std::uint64_t t = t0; t < t_end; ++t) {
        // Segments can only start strictly before the block's last frame.
        while (t + 1 < t_end && !expected.empty() && expected.top().t == t) {
            const std::uint32_t k = expected.top().k;
            expected.pop();
            std::int64_t dq = 0;
            std::uint32_t dt = 0;
            if (!feed.next(dq, dt)) {
                throw data_error("decompress: ran out of support vectors" + feed.where());
            }
            if (dt < 1 || t + dt > t_end - 1) {
                throw data_error("decompress: segment duration desynchronized" +
                                 feed.where());
            }
            ActiveSegment& a = active[k];
            a.p += a.sv.delta_q;  // terminal of the previous segment
            a.sv = {dq, dt};
            a.t_start = t;
            expected.push({t + dt, k});
        }
        for (std::uint32_t k = 0; k < h.nd; ++k) {
            const ActiveSegment& a = active[k];
            frame[k] = reconstruct(a.p, a.sv, static_cast<std::uint32_t>(t - a.t_start),
                                   h.eps_q);
        }
        sink(t, frame);
    }
    if (!feed.exhausted()) {
        throw data_error("decompress: trailing support vectors" + feed.where());
    }
    // Every dimension's final segment must end exactly at the last frame.
    for (std::uint32_t k = 0; k < h.nd; ++k) {
        if (active[k].t_start + active[k].sv.delta_t != t_end - 1) {
            throw data_error("decompress: segments do not tile the block" + feed.where());
        }
    }
}

void Decompressor::run(const FrameSink& sink) const {
    const FileHeader& h = reader_.header();
    if (reader_.block_count() == 0) {
        throw data_error("decompress: container has no blocks");
    }
    std::uint64_t frames_seen = 0;
    for (std::size_t i = 0; i < reader_.block_count(); ++i) {
        decode_block(i, [&](std::uint64_t t, std::span<const double> frame) {
            ++frames_seen;
            sink(t, frame);
        });
    }
    if (frames_seen != h.frames) {
        throw data_error("decompress: container frame count mismatch");
    }
}

std::vector<std::uint8_t> compress_frames(std::span<const double> data, std::uint32_t nd,
                                          std::span<const DimBounds> bounds,
                                          const CompressOptions& options) {
    if (nd == 0 || data.size() % nd != 0) {
        throw usage_error("compress_frames: data size not a multiple of nd");
    }
    const std::uint64_t frames = data.size() / nd;
    MemorySink sink;
    Compressor c(sink, frames, bounds, options);
    for (std::uint64_t t = 0; t < frames; ++t) {
        c.add_frame(data.subspan(t * nd, nd));
    }
    c.finish();
    return sink.take();
}

std::vector<double> decompress_bytes(std::span<const std::uint8_t> bytes, std::uint32_t& nd,
                                     std::uint64_t& frames) {
    MemorySource source(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
    ContainerReader reader(source);
    nd = reader.header().nd;
    frames = reader.header().frames;
    std::vector<double> out(static_cast<std::size_t>(nd) * frames);
    Decompressor d(reader);
    d.run([&](std::uint64_t t, std::span<const double> frame) {
        std::copy(frame.begin(), frame.end(), out.begin() + static_cast<std::ptrdiff_t>(t * nd));
    });
    return out;
}

}  // namespace hrtc
