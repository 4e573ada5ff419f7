#pragma once

#include <stdexcept>

namespace hrtc {

// Bad flags, bad configuration, misuse of an API. CLI exit code 2.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad input data or a corrupt/truncated stream. CLI exit code 1.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value outside the documented magnitude bounds of a codec or kernel.
struct range_error : data_error {
    using data_error::data_error;
};

}  // namespace hrtc
