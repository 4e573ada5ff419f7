#include "hrtc/raw_io.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

namespace hrtc {

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw trajectory I/O assumes a little-endian host");

}  // namespace

std::string sidecar_path(const std::string& data_path) { return data_path + ".json"; }

RawInfo read_sidecar(const std::string& data_path) {
    std::ifstream in(sidecar_path(data_path));
    if (!in) {
        throw data_error("missing sidecar: " + sidecar_path(data_path));
    }
    nlohmann::json j;
    try {
        in >> j;
        RawInfo info;
        info.nd = j.at("nd").get<std::uint32_t>();
        info.frames = j.at("frames").get<std::uint64_t>();
        if (info.nd == 0) throw data_error("sidecar: nd must be >= 1");
        return info;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("bad sidecar " + sidecar_path(data_path) + ": " + e.what());
    }
}

void write_sidecar(const std::string& data_path, const RawInfo& info) {
    std::ofstream out(sidecar_path(data_path));
    if (!out) {
        throw data_error("cannot write sidecar: " + sidecar_path(data_path));
    }
    nlohmann::json j;
    j["nd"] = info.nd;
    j["frames"] = info.frames;
    out << j.dump() << "\n";
}

RawFrameReader::RawFrameReader(std::istream& in, const RawInfo& info)
    : in_(in), info_(info) {
    if (info_.nd == 0) throw usage_error("raw reader: nd must be >= 1");
}

bool RawFrameReader::next(std::span<float> frame) {
    if (frame.size() != info_.nd) throw usage_error("raw reader: frame arity mismatch");
    if (read_ >= info_.frames) return false;
    in_.read(reinterpret_cast<char*>(frame.data()),
             static_cast<std::streamsize>(frame.size() * sizeof(float)));
    if (static_cast<std::size_t>(in_.gcount()) != frame.size() * sizeof(float)) {
        throw data_error("raw trajectory truncated at frame " + std::to_string(read_));
    }
    ++read_;
    return true;
}

RawFrameWriter::RawFrameWriter(std::ostream& out, std::uint32_t nd) : out_(out), nd_(nd) {
    if (nd_ == 0) throw usage_error("raw writer: nd must be >= 1");
    scratch_.resize(nd_);
}

void RawFrameWriter::write(std::span<const float> frame) {
    if (frame.size() != nd_) throw usage_error("raw writer: frame arity mismatch");
    out_.write(reinterpret_cast<const char*>(frame.data()),
               static_cast<std::streamsize>(frame.size() * sizeof(float)));
    if (!out_) throw data_error("raw trajectory write failed");
    ++written_;
}

void RawFrameWriter::write(std::span<const double> frame) {
    if (frame.size() != nd_) throw usage_error("raw writer: frame arity mismatch");
    for (std::size_t i = 0; i < frame.size(); ++i) {
        scratch_[i] = static_cast<float>(frame[i]);
    }
    write(std::span<const float>(scratch_));
}

}  // namespace hrtc
