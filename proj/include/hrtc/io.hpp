#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hrtc/errors.hpp"

namespace hrtc {

// Append-only output. Writers never seek; the container format is laid out
// so that everything, including the trailing footer, streams forward.
class ByteSink {
  public:
    virtual ~ByteSink() = default;
    virtual void write(std::span<const std::uint8_t> bytes) = 0;
    virtual std::uint64_t size() const = 0;
};

// Random-access input for the seekable reader.
class ByteSource {
  public:
    virtual ~ByteSource() = default;
    virtual void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const = 0;
    virtual std::uint64_t size() const = 0;
};

class MemorySink : public ByteSink {
  public:
    void write(std::span<const std::uint8_t> bytes) override {
        data_.insert(data_.end(), bytes.begin(), bytes.end());
    }
    std::uint64_t size() const override { return data_.size(); }
    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t> take() { return std::move(data_); }

  private:
    std::vector<std::uint8_t> data_;
};

class MemorySource : public ByteSource {
  public:
    explicit MemorySource(std::vector<std::uint8_t> data) : data_(std::move(data)) {}
    void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override {
        if (offset + out.size() > data_.size()) {
            throw data_error("read past end of input");
        }
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(offset), out.size(),
                    out.begin());
    }
    std::uint64_t size() const override { return data_.size(); }

  private:
    std::vector<std::uint8_t> data_;
};

class FileSink : public ByteSink {
  public:
    explicit FileSink(const std::string& path) : f_(std::fopen(path.c_str(), "wb")) {
        if (!f_) throw data_error("cannot open for writing: " + path);
    }
    ~FileSink() override {
        if (f_) std::fclose(f_);
    }
    void write(std::span<const std::uint8_t> bytes) override {
        if (bytes.empty()) return;
        if (std::fwrite(bytes.data(), 1, bytes.size(), f_) != bytes.size()) {
            throw data_error("short write");
        }
        written_ += bytes.size();
    }
    std::uint64_t size() const override { return written_; }
    void close() {
        if (f_) {
            std::fclose(f_);
            f_ = nullptr;
        }
    }

  private:
    std::FILE* f_ = nullptr;
    std::uint64_t written_ = 0;
};

class FileSource : public ByteSource {
  public:
    explicit FileSource(const std::string& path) : f_(std::fopen(path.c_str(), "rb")) {
        if (!f_) throw data_error("cannot open for reading: " + path);
        std::fseek(f_, 0, SEEK_END);
        size_ = static_cast<std::uint64_t>(std::ftell(f_));
    }
    ~FileSource() override {
        if (f_) std::fclose(f_);
    }
    void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override {
        if (offset + out.size() > size_) throw data_error("read past end of file");
        std::fseek(f_, static_cast<long>(offset), SEEK_SET);
        if (std::fread(out.data(), 1, out.size(), f_) != out.size()) {
            throw data_error("short read");
        }
    }
    std::uint64_t size() const override { return size_; }

  private:
    std::FILE* f_ = nullptr;
    std::uint64_t size_ = 0;
};

// Wrapper that records every byte range touched; used to verify that seeking
// reads O(1) blocks.
class CountingSource : public ByteSource {
  public:
    explicit CountingSource(const ByteSource& inner) : inner_(inner) {}
    void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override {
        ranges_.emplace_back(offset, offset + out.size());
        bytes_read_ += out.size();
        inner_.read_at(offset, out);
    }
    std::uint64_t size() const override { return inner_.size(); }
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& ranges() const {
        return ranges_;
    }
    std::uint64_t bytes_read() const { return bytes_read_; }
    void reset() {
        ranges_.clear();
        bytes_read_ = 0;
    }

  private:
    const ByteSource& inner_;
    mutable std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges_;
    mutable std::uint64_t bytes_read_ = 0;
};

}  // namespace hrtc
