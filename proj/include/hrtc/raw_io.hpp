#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hrtc/errors.hpp"

namespace hrtc {

// Raw trajectory interchange format: little-endian f32 values, nd per frame,
// plus a JSON sidecar `<path>.json` holding {"nd": ..., "frames": ...}.

struct RawInfo {
    std::uint32_t nd = 0;
    std::uint64_t frames = 0;
};

std::string sidecar_path(const std::string& data_path);
RawInfo read_sidecar(const std::string& data_path);
void write_sidecar(const std::string& data_path, const RawInfo& info);

class RawFrameReader {
  public:
    RawFrameReader(std::istream& in, const RawInfo& info);

    // Reads the next frame into `frame` (nd floats); false at end of stream.
    bool next(std::span<float> frame);

    const RawInfo& info() const { return info_; }

  private:
    std::istream& in_;
    RawInfo info_;
    std::uint64_t read_ = 0;
};

class RawFrameWriter {
  public:
    RawFrameWriter(std::ostream& out, std::uint32_t nd);

    void write(std::span<const float> frame);
    void write(std::span<const double> frame);  // converted to f32

    std::uint64_t frames_written() const { return written_; }

  private:
    std::ostream& out_;
    std::uint32_t nd_;
    std::uint64_t written_ = 0;
    std::vector<float> scratch_;
};

}  // namespace hrtc
