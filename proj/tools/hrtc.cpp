// hrtc: error-bounded streaming compressor for particle-trajectory data.
//
// Subcommands: compress, decompress, verify, stats, gen, bench.
// Exit codes: 0 ok, 1 data error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "hrtc/codec.hpp"
#include "hrtc/container.hpp"
#include "hrtc/mdsim.hpp"
#include "hrtc/quantizer.hpp"
#include "hrtc/raw_io.hpp"
#include "hrtc/scheduler.hpp"

namespace {

using namespace hrtc;

struct StreamIn {
    std::unique_ptr<std::ifstream> file;
    std::istream* stream = nullptr;

    static StreamIn open(const std::string& path) {
        StreamIn s;
        if (path == "-") {
            s.stream = &std::cin;
        } else {
            s.file = std::make_unique<std::ifstream>(path, std::ios::binary);
            if (!*s.file) throw data_error("cannot open: " + path);
            s.stream = s.file.get();
        }
        return s;
    }
};

struct StreamOut {
    std::unique_ptr<std::ofstream> file;
    std::ostream* stream = nullptr;

    static StreamOut open(const std::string& path) {
        StreamOut s;
        if (path == "-") {
            s.stream = &std::cout;
        } else {
            s.file = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*s.file) throw data_error("cannot open for writing: " + path);
            s.stream = s.file.get();
        }
        return s;
    }
};

std::uint64_t env_seed_or(std::uint64_t fallback) {
    if (const char* env = std::getenv("HRTC_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return fallback;
}

// "lo:hi" (all dimensions) or a comma-separated list with one pair per
// dimension.
std::vector<DimBounds> parse_bounds(const std::string& text, std::uint32_t nd) {
    std::vector<DimBounds> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw usage_error("--bounds expects lo:hi pairs");
        }
        DimBounds b;
        b.lo = std::stod(part.substr(0, colon));
        b.hi = std::stod(part.substr(colon + 1));
        if (!(b.hi >= b.lo)) throw usage_error("--bounds: hi must be >= lo");
        out.push_back(b);
    }
    if (out.size() == 1) out.resize(nd, out[0]);
    if (out.size() != nd) {
        throw usage_error("--bounds needs one pair or one per dimension");
    }
    return out;
}

struct CompressFlags {
    double eps = 0.0;
    double lambda = 0.5;
    std::uint32_t block = 2048;
    std::uint32_t chunk = 1024;
    std::string kernel = "divfree";
    std::string bounds;
    std::uint32_t nd = 0;        // stdin mode
    std::uint64_t frames = 0;    // stdin mode
    unsigned jobs = 1;

    CompressOptions options() const {
        CompressOptions opt;
        opt.budget = ErrorBudget::split(eps, lambda);
        opt.block_size = block;
        opt.chunk_len = chunk;
        if (kernel == "divfree") {
            opt.kernel = Kernel::division_free;
        } else if (kernel == "reference") {
            opt.kernel = Kernel::reference;
        } else {
            throw usage_error("--kernel must be divfree or reference");
        }
        return opt;
    }
};

std::vector<DimBounds> scan_bounds(const std::string& in_path, const RawInfo& info) {
    StreamIn in = StreamIn::open(in_path);
    RawFrameReader reader(*in.stream, info);
    std::vector<float> frame(info.nd);
    std::vector<DimBounds> bounds(info.nd);
    bool first = true;
    while (reader.next(frame)) {
        for (std::uint32_t k = 0; k < info.nd; ++k) {
            const double v = frame[k];
            if (first) {
                bounds[k] = {v, v};
            } else {
                bounds[k].lo = std::min(bounds[k].lo, v);
                bounds[k].hi = std::max(bounds[k].hi, v);
            }
        }
        first = false;
    }
    if (first) throw data_error("empty trajectory: " + in_path);
    return bounds;
}

void report_compression(std::uint64_t raw_samples, std::uint64_t bytes) {
    const double bits_per_sample =
        static_cast<double>(bytes) * 8.0 / static_cast<double>(raw_samples);
    const double ratio =
        static_cast<double>(raw_samples) * 4.0 / static_cast<double>(bytes);
    std::fprintf(stderr, "compressed %llu samples to %llu bytes\n",
                 static_cast<unsigned long long>(raw_samples),
                 static_cast<unsigned long long>(bytes));
    std::fprintf(stderr, "bits/sample: %.4f  ratio vs f32: %.1f\n", bits_per_sample,
                 ratio);
}

void compress_single(const std::string& in_path, const std::string& out_path,
                     const RawInfo& info, const std::vector<DimBounds>& bounds,
                     const CompressOptions& opt) {
    StreamIn in = StreamIn::open(in_path);
    RawFrameReader reader(*in.stream, info);
    std::unique_ptr<ByteSink> sink;
    std::unique_ptr<MemorySink> mem;
    if (out_path == "-") {
        mem = std::make_unique<MemorySink>();
    } else {
        sink = std::make_unique<FileSink>(out_path);
    }
    ByteSink& s = mem ? static_cast<ByteSink&>(*mem) : *sink;
    Compressor comp(s, info.frames, bounds, opt);
    std::vector<float> frame(info.nd);
    std::vector<double> coords(info.nd);
    while (reader.next(frame)) {
        for (std::uint32_t k = 0; k < info.nd; ++k) coords[k] = frame[k];
        comp.add_frame(coords);
    }
    comp.finish();
    if (mem) {
        std::fwrite(mem->data().data(), 1, mem->data().size(), stdout);
        std::fflush(stdout);
    }
    report_compression(info.frames * info.nd, s.size());
}

// Partition dimensions into contiguous ranges, one container per worker,
// described by a JSON manifest.
void compress_jobs(const std::string& in_path, const std::string& out_path,
                   const RawInfo& info, const std::vector<DimBounds>& bounds,
                   const CompressOptions& opt, unsigned jobs) {
    if (in_path == "-" || out_path == "-") {
        throw usage_error("--jobs needs real file paths");
    }
    jobs = std::min<unsigned>(jobs, info.nd);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;
    const std::uint32_t per = (info.nd + jobs - 1) / jobs;
    for (std::uint32_t lo = 0; lo < info.nd; lo += per) {
        ranges.emplace_back(lo, std::min(info.nd, lo + per));
    }
    std::vector<std::string> part_paths;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        part_paths.push_back(out_path + ".part" + std::to_string(i));
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                const auto [lo, hi] = ranges[i];
                std::ifstream in(in_path, std::ios::binary);
                if (!in) throw data_error("cannot open: " + in_path);
                RawFrameReader reader(in, info);
                FileSink sink(part_paths[i]);
                const std::vector<DimBounds> sub(bounds.begin() + lo, bounds.begin() + hi);
                CompressOptions part_opt = opt;
                Compressor comp(sink, info.frames, sub, part_opt);
                std::vector<float> frame(info.nd);
                std::vector<double> coords(hi - lo);
                while (reader.next(frame)) {
                    for (std::uint32_t k = lo; k < hi; ++k) {
                        coords[k - lo] = frame[k];
                    }
                    comp.add_frame(coords);
                }
                comp.finish();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    nlohmann::json manifest;
    manifest["hrtc_manifest"] = 1;
    manifest["nd"] = info.nd;
    manifest["frames"] = info.frames;
    auto parts = nlohmann::json::array();
    std::uint64_t total_bytes = 0;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        std::ifstream probe(part_paths[i], std::ios::binary | std::ios::ate);
        total_bytes += static_cast<std::uint64_t>(probe.tellg());
        parts.push_back({{"file", part_paths[i]},
                         {"dim_lo", ranges[i].first},
                         {"dim_hi", ranges[i].second}});
    }
    manifest["parts"] = parts;
    std::ofstream mf(out_path);
    if (!mf) throw data_error("cannot write manifest: " + out_path);
    mf << manifest.dump(2) << "\n";
    report_compression(info.frames * info.nd, total_bytes);
}

int cmd_compress(const std::string& in_path, const std::string& out_path,
                 const CompressFlags& flags) {
    RawInfo info;
    if (in_path == "-") {
        if (flags.nd == 0 || flags.frames == 0) {
            throw usage_error("stdin input needs --nd and --frames");
        }
        if (flags.bounds.empty()) {
            throw usage_error("stdin input needs --bounds (no second pass available)");
        }
        info = {flags.nd, flags.frames};
    } else {
        info = read_sidecar(in_path);
    }
    const std::vector<DimBounds> bounds =
        flags.bounds.empty() ? scan_bounds(in_path, info)
                             : parse_bounds(flags.bounds, info.nd);
    const CompressOptions opt = flags.options();
    if (flags.jobs > 1) {
        compress_jobs(in_path, out_path, info, bounds, opt, flags.jobs);
    } else {
        compress_single(in_path, out_path, info, bounds, opt);
    }
    return 0;
}

bool is_manifest(const std::string& path) {
    if (path == "-") return false;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    char c = 0;
    in.get(c);
    return c == '{';
}

struct ManifestPart {
    std::string file;
    std::uint32_t dim_lo = 0;
    std::uint32_t dim_hi = 0;
};

struct Manifest {
    std::uint32_t nd = 0;
    std::uint64_t frames = 0;
    std::vector<ManifestPart> parts;
};

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
        Manifest m;
        m.nd = j.at("nd").get<std::uint32_t>();
        m.frames = j.at("frames").get<std::uint64_t>();
        for (const auto& p : j.at("parts")) {
            m.parts.push_back({p.at("file").get<std::string>(),
                               p.at("dim_lo").get<std::uint32_t>(),
                               p.at("dim_hi").get<std::uint32_t>()});
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("bad manifest " + path + ": " + e.what());
    }
}

int cmd_decompress(const std::string& in_path, const std::string& out_path) {
    if (is_manifest(in_path)) {
        const Manifest m = read_manifest(in_path);
        if (out_path == "-") {
            throw usage_error("manifest decompression needs a real output path");
        }
        // Preallocate, then fill column ranges part by part.
        {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw data_error("cannot open for writing: " + out_path);
            std::vector<char> zeros(static_cast<std::size_t>(m.nd) * 4, 0);
            for (std::uint64_t t = 0; t < m.frames; ++t) {
                out.write(zeros.data(), static_cast<std::streamsize>(zeros.size()));
            }
        }
        std::fstream out(out_path, std::ios::binary | std::ios::in | std::ios::out);
        for (const auto& part : m.parts) {
            FileSource src(part.file);
            ContainerReader reader(src);
            Decompressor dec(reader);
            const std::uint32_t width = part.dim_hi - part.dim_lo;
            std::vector<float> row(width);
            dec.run([&](std::uint64_t t, std::span<const double> frame) {
                for (std::uint32_t k = 0; k < width; ++k) {
                    row[k] = static_cast<float>(frame[k]);
                }
                out.seekp(static_cast<std::streamoff>(
                    (t * m.nd + part.dim_lo) * sizeof(float)));
                out.write(reinterpret_cast<const char*>(row.data()),
                          static_cast<std::streamsize>(width * sizeof(float)));
            });
        }
        out.flush();
        if (!out) throw data_error("write failed: " + out_path);
        write_sidecar(out_path, {m.nd, m.frames});
        return 0;
    }

    std::unique_ptr<ByteSource> source;
    if (in_path == "-") {
        std::vector<std::uint8_t> all(std::istreambuf_iterator<char>(std::cin), {});
        source = std::make_unique<MemorySource>(std::move(all));
    } else {
        source = std::make_unique<FileSource>(in_path);
    }
    ContainerReader reader(*source);
    if (!reader.footer_ok()) {
        std::fprintf(stderr,
                     "warning: footer missing or damaged; block index rebuilt by "
                     "sequential scan\n");
    }
    StreamOut out = StreamOut::open(out_path);
    RawFrameWriter writer(*out.stream, reader.header().nd);
    Decompressor dec(reader);
    dec.run([&](std::uint64_t, std::span<const double> frame) { writer.write(frame); });
    out.stream->flush();
    if (out_path != "-") {
        write_sidecar(out_path, {reader.header().nd, reader.header().frames});
    }
    return 0;
}

// Streams original and reconstruction side by side; exits nonzero when the
// error bound is violated.
int cmd_verify(const std::string& orig_path, const std::string& comp_path) {
    const RawInfo info = read_sidecar(orig_path);

    std::vector<std::vector<float>> original;
    {
        StreamIn in = StreamIn::open(orig_path);
        RawFrameReader reader(*in.stream, info);
        std::vector<float> frame(info.nd);
        while (reader.next(frame)) {
            original.emplace_back(frame.begin(), frame.end());
        }
    }

    double max_err = 0.0;
    double bound = 0.0;
    std::uint64_t frames_checked = 0;
    auto check_frame = [&](std::uint64_t t, std::span<const double> rec,
                           std::uint32_t dim_lo) {
        if (t >= original.size()) throw data_error("verify: frame count mismatch");
        for (std::size_t k = 0; k < rec.size(); ++k) {
            const double err =
                std::abs(rec[k] - static_cast<double>(original[t][dim_lo + k]));
            max_err = std::max(max_err, err);
        }
        if (dim_lo == 0) ++frames_checked;
    };

    if (is_manifest(comp_path)) {
        const Manifest m = read_manifest(comp_path);
        if (m.nd != info.nd || m.frames != original.size()) {
            throw data_error("verify: shape mismatch");
        }
        for (const auto& part : m.parts) {
            FileSource src(part.file);
            ContainerReader reader(src);
            bound = reader.header().eps_q + reader.header().eps_f;
            Decompressor dec(reader);
            dec.run([&](std::uint64_t t, std::span<const double> rec) {
                check_frame(t, rec, part.dim_lo);
            });
        }
    } else {
        FileSource src(comp_path);
        ContainerReader reader(src);
        if (reader.header().nd != info.nd || reader.header().frames != original.size()) {
            throw data_error("verify: shape mismatch");
        }
        bound = reader.header().eps_q + reader.header().eps_f;
        Decompressor dec(reader);
        dec.run([&](std::uint64_t t, std::span<const double> rec) {
            check_frame(t, rec, 0);
        });
    }

    const double slack = bound * 1e-9 + 1e-12;
    std::printf("max_error %.9g bound %.9g frames %llu\n", max_err, bound,
                static_cast<unsigned long long>(frames_checked));
    if (max_err <= bound + slack) {
        std::printf("verify: PASS\n");
        return 0;
    }
    std::printf("verify: FAIL\n");
    return 1;
}

int cmd_stats(const std::string& path) {
    if (is_manifest(path)) {
        const Manifest m = read_manifest(path);
        std::printf("manifest with %zu parts, nd %u, frames %llu\n", m.parts.size(),
                    m.nd, static_cast<unsigned long long>(m.frames));
        std::uint64_t total = 0;
        for (const auto& part : m.parts) {
            std::ifstream probe(part.file, std::ios::binary | std::ios::ate);
            if (!probe) throw data_error("cannot open: " + part.file);
            total += static_cast<std::uint64_t>(probe.tellg());
        }
        const double bps = static_cast<double>(total) * 8.0 /
                           (static_cast<double>(m.nd) * static_cast<double>(m.frames));
        std::printf("total bytes %llu  bits/sample %.4f\n",
                    static_cast<unsigned long long>(total), bps);
        return 0;
    }

    std::unique_ptr<ByteSource> src;
    if (path == "-") {
        std::vector<std::uint8_t> all(std::istreambuf_iterator<char>(std::cin), {});
        src = std::make_unique<MemorySource>(std::move(all));
    } else {
        src = std::make_unique<FileSource>(path);
    }
    ContainerReader reader(*src);
    const FileHeader& h = reader.header();
    if (reader.block_count() == 0) {
        throw data_error("stats: container has no blocks");
    }
    std::printf("nd %u  frames %llu  eps_q %g  eps_f %g  block %u  chunk %u\n", h.nd,
                static_cast<unsigned long long>(h.frames), h.eps_q, h.eps_f,
                h.block_size, h.chunk_len);
    std::printf("blocks %zu  footer %s\n", reader.block_count(),
                reader.footer_ok() ? "ok" : "rebuilt");
    std::map<unsigned, std::uint64_t> dt_histogram;  // log2 buckets
    std::uint64_t sv_total = 0;
    std::printf("%8s %8s %10s %8s\n", "block", "frames", "svs", "chunks");
    for (std::size_t i = 0; i < reader.block_count(); ++i) {
        const BlockData b = reader.read_block(i);
        std::uint64_t svs = 0;
        std::vector<std::int64_t> dqs;
        std::vector<std::uint32_t> dts;
        for (const auto& c : b.chunks) {
            decode_chunk(c.payload, c.n, dqs, dts);
            svs += c.n;
            for (const std::uint32_t dt : dts) {
                unsigned bucket = 0;
                while ((1u << (bucket + 1)) <= dt) ++bucket;
                ++dt_histogram[bucket];
            }
        }
        sv_total += svs;
        std::printf("%8zu %8u %10llu %8zu\n", i, b.frame_count,
                    static_cast<unsigned long long>(svs), b.chunks.size());
    }
    const std::uint64_t bytes = src->size();
    const double samples = static_cast<double>(h.nd) * static_cast<double>(h.frames);
    std::printf("total bytes %llu  bits/sample %.4f  ratio vs f32 %.1f\n",
                static_cast<unsigned long long>(bytes),
                static_cast<double>(bytes) * 8.0 / samples,
                samples * 4.0 / static_cast<double>(bytes));
    std::printf("support vectors %llu  segment-length histogram (log2 buckets):\n",
                static_cast<unsigned long long>(sv_total));
    for (const auto& [bucket, count] : dt_histogram) {
        std::printf("  dt in [%u, %u): %llu\n", 1u << bucket, 2u << bucket,
                    static_cast<unsigned long long>(count));
    }
    return 0;
}

struct GenFlags {
    SimConfig config;
    std::string box_text = "15,16,17";
};

int cmd_gen(const std::string& out_path, GenFlags flags) {
    {
        std::stringstream ss(flags.box_text);
        std::string part;
        int i = 0;
        while (std::getline(ss, part, ',') && i < 3) {
            flags.config.box[static_cast<std::size_t>(i++)] = std::stod(part);
        }
        if (i != 3) throw usage_error("--box expects three comma-separated lengths");
    }
    flags.config.seed = env_seed_or(flags.config.seed);
    StreamOut out = StreamOut::open(out_path);
    RawFrameWriter writer(*out.stream, flags.config.n_particles * 3);
    const std::uint64_t frames =
        run_simulation(flags.config, [&](std::span<const double> f) { writer.write(f); });
    out.stream->flush();
    if (out_path != "-") {
        write_sidecar(out_path, {flags.config.n_particles * 3, frames});
    }
    std::fprintf(stderr, "generated %llu frames of %u dimensions\n",
                 static_cast<unsigned long long>(frames), flags.config.n_particles * 3);
    return 0;
}

struct BenchFlags {
    std::string sweep = "eps";
    std::string out_csv = "-";
    std::uint32_t particles = 128;
    std::uint64_t steps = 100000;
    std::uint64_t equil = 10000;
    std::uint64_t seed = 42;
    double eps = 0.01;
    double lambda = 0.5;
    std::uint32_t block = 2048;
    std::uint32_t chunk = 1024;
};

struct BenchRow {
    std::string parameter;
    std::uint64_t compressed_bytes = 0;
    double bits_per_sample = 0.0;
    double max_error = 0.0;
    double wall_time = 0.0;
};

BenchRow bench_one(const std::vector<float>& data, std::uint32_t nd, double eps,
                   double lambda, std::uint32_t block, std::uint32_t chunk,
                   const std::string& label) {
    const std::uint64_t frames = data.size() / nd;
    std::vector<DimBounds> bounds(nd);
    for (std::uint32_t k = 0; k < nd; ++k) bounds[k] = {data[k], data[k]};
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& b = bounds[i % nd];
        b.lo = std::min(b.lo, static_cast<double>(data[i]));
        b.hi = std::max(b.hi, static_cast<double>(data[i]));
    }
    CompressOptions opt;
    opt.budget = ErrorBudget::split(eps, lambda);
    opt.block_size = block;
    opt.chunk_len = chunk;

    MemorySink sink;
    const auto start = std::chrono::steady_clock::now();
    {
        Compressor comp(sink, frames, bounds, opt);
        std::vector<double> coords(nd);
        for (std::uint64_t t = 0; t < frames; ++t) {
            for (std::uint32_t k = 0; k < nd; ++k) coords[k] = data[t * nd + k];
            comp.add_frame(coords);
        }
        comp.finish();
    }
    const auto end = std::chrono::steady_clock::now();

    BenchRow row;
    row.parameter = label;
    row.compressed_bytes = sink.size();
    row.bits_per_sample = static_cast<double>(sink.size()) * 8.0 /
                          (static_cast<double>(nd) * static_cast<double>(frames));
    row.wall_time = std::chrono::duration<double>(end - start).count();

    MemorySource source(sink.take());
    ContainerReader reader(source);
    Decompressor dec(reader);
    double max_err = 0.0;
    dec.run([&](std::uint64_t t, std::span<const double> rec) {
        for (std::uint32_t k = 0; k < nd; ++k) {
            max_err = std::max(max_err,
                               std::abs(rec[k] - static_cast<double>(data[t * nd + k])));
        }
    });
    row.max_error = max_err;
    return row;
}

int cmd_bench(const BenchFlags& flags) {
    SimConfig cfg;
    cfg.n_particles = flags.particles;
    cfg.equil_steps = flags.equil;
    cfg.run_steps = flags.steps;
    cfg.seed = env_seed_or(flags.seed);
    const std::uint32_t nd = cfg.n_particles * 3;
    std::vector<float> data;
    data.reserve(nd * (flags.steps + 1));
    run_simulation(cfg, [&](std::span<const double> frame) {
        for (const double v : frame) data.push_back(static_cast<float>(v));
    });
    std::fprintf(stderr, "benchmark trajectory: %u dims, %zu frames\n", nd,
                 data.size() / nd);

    std::vector<BenchRow> rows;
    if (flags.sweep == "eps") {
        for (const double eps : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
            rows.push_back(bench_one(data, nd, eps, flags.lambda, flags.block,
                                     flags.chunk, std::to_string(eps)));
        }
    } else if (flags.sweep == "lambda") {
        for (const double lambda :
             {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
            rows.push_back(bench_one(data, nd, flags.eps, lambda, flags.block,
                                     flags.chunk, std::to_string(lambda)));
        }
    } else if (flags.sweep == "subsample") {
        for (const std::uint32_t s : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
            std::vector<float> sub;
            const std::uint64_t frames = data.size() / nd;
            for (std::uint64_t t = s - 1; t < frames; t += s) {
                sub.insert(sub.end(), data.begin() + static_cast<std::ptrdiff_t>(t * nd),
                           data.begin() + static_cast<std::ptrdiff_t>((t + 1) * nd));
            }
            rows.push_back(bench_one(sub, nd, flags.eps, flags.lambda, flags.block,
                                     flags.chunk, "1:" + std::to_string(s)));
        }
    } else {
        throw usage_error("--sweep must be eps, lambda or subsample");
    }

    StreamOut out = StreamOut::open(flags.out_csv);
    *out.stream << "parameter,compressed_bytes,bits_per_sample,max_error,wall_time\n";
    for (const auto& row : rows) {
        *out.stream << row.parameter << ',' << row.compressed_bytes << ','
                    << row.bits_per_sample << ',' << row.max_error << ','
                    << row.wall_time << '\n';
    }
    out.stream->flush();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"error-bounded piecewise-linear trajectory compressor"};
    app.require_subcommand(1);

    std::string in_path, out_path;
    CompressFlags cflags;
    auto* compress = app.add_subcommand("compress", "compress a raw trajectory");
    compress->add_option("input", in_path, "raw f32 trajectory (or -)")->required();
    compress->add_option("output", out_path, "container output (or -)")->required();
    compress->add_option("--eps", cflags.eps, "total error budget")->required();
    compress->add_option("--lambda", cflags.lambda, "error split: eps_q = lambda*eps");
    compress->add_option("--block", cflags.block, "frames per block");
    compress->add_option("--chunk", cflags.chunk, "support vectors per chunk");
    compress->add_option("--kernel", cflags.kernel, "divfree or reference");
    compress->add_option("--bounds", cflags.bounds, "lo:hi[,lo:hi...] declared bounds");
    compress->add_option("--nd", cflags.nd, "dimensions (stdin input)");
    compress->add_option("--frames", cflags.frames, "frame count (stdin input)");
    compress->add_option("--jobs", cflags.jobs, "parallel dimension partitions");

    std::string d_in, d_out;
    auto* decompress = app.add_subcommand("decompress", "reconstruct a raw trajectory");
    decompress->add_option("input", d_in, "container or manifest (or -)")->required();
    decompress->add_option("output", d_out, "raw f32 output (or -)")->required();

    std::string v_orig, v_comp;
    auto* verify = app.add_subcommand("verify", "check the error bound end to end");
    verify->add_option("original", v_orig, "raw f32 trajectory")->required();
    verify->add_option("compressed", v_comp, "container or manifest")->required();

    std::string s_path;
    auto* stats = app.add_subcommand("stats", "per-block sizes and histograms");
    stats->add_option("input", s_path, "container or manifest")->required();

    std::string g_out;
    GenFlags gflags;
    auto* gen = app.add_subcommand("gen", "generate the benchmark trajectory");
    gen->add_option("output", g_out, "raw f32 output (or -)")->required();
    gen->add_option("--particles", gflags.config.n_particles, "particle count");
    gen->add_option("--mass", gflags.config.mass, "particle mass");
    gen->add_option("--dt", gflags.config.time_step, "integration time step");
    gen->add_option("--box", gflags.box_text, "box edges, e.g. 15,16,17");
    gen->add_option("--equil", gflags.config.equil_steps, "equilibration steps");
    gen->add_option("--steps", gflags.config.run_steps, "production steps");
    gen->add_option("--seed", gflags.config.seed, "rng seed (HRTC_SEED overrides)");
    gen->add_option("--subsample", gflags.config.subsample, "emit every s-th step");

    BenchFlags bflags;
    auto* bench = app.add_subcommand("bench", "parameter sweeps as CSV");
    bench->add_option("--sweep", bflags.sweep, "eps, lambda or subsample")->required();
    bench->add_option("--out", bflags.out_csv, "csv path (default stdout)");
    bench->add_option("--particles", bflags.particles, "particle count");
    bench->add_option("--steps", bflags.steps, "production steps");
    bench->add_option("--equil", bflags.equil, "equilibration steps");
    bench->add_option("--seed", bflags.seed, "rng seed (HRTC_SEED overrides)");
    bench->add_option("--eps", bflags.eps, "error budget for lambda/subsample sweeps");
    bench->add_option("--lambda", bflags.lambda, "error split for eps/subsample sweeps");
    bench->add_option("--block", bflags.block, "frames per block");
    bench->add_option("--chunk", bflags.chunk, "support vectors per chunk");

    try {
        app.parse(argc, argv);
        if (compress->parsed()) return cmd_compress(in_path, out_path, cflags);
        if (decompress->parsed()) return cmd_decompress(d_in, d_out);
        if (verify->parsed()) return cmd_verify(v_orig, v_comp);
        if (stats->parsed()) return cmd_stats(s_path);
        if (gen->parsed()) return cmd_gen(g_out, gflags);
        if (bench->parsed()) return cmd_bench(bflags);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const usage_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
