#pragma once

#include <cmath>
#include <cstdint>

#include "hrtc/errors.hpp"

namespace hrtc {

// One grid unit spans 2*eps_q coordinate units, so a reconstructed value
// q * 2*eps_q is at most eps_q away from the input that produced q.

inline constexpr double kMaxGridMagnitude = 4503599627370496.0;  // 2^52

inline std::int64_t quantize(double x, double eps_q) {
    if (!std::isfinite(x)) {
        throw data_error("quantize: input is not finite");
    }
    const double scaled = x / (2.0 * eps_q);
    if (std::abs(scaled) > kMaxGridMagnitude) {
        throw range_error("quantize: value exceeds representable grid range");
    }
    // Round half up, exactly as floor(x/(2 eps_q) + 0.5). Negative values
    // round asymmetrically (-0.6 + 0.5 -> -1); kept for determinism.
    return static_cast<std::int64_t>(std::floor(scaled + 0.5));
}

inline double dequantize(std::int64_t q, double eps_q) {
    return static_cast<double>(q) * (2.0 * eps_q);
}

// Signed-to-unsigned mapping: i >= 0 -> 2i, i < 0 -> -2i+1. Small magnitudes
// of either sign map to small unsigneds.
inline std::uint64_t zigzag(std::int64_t i) {
    constexpr std::int64_t kLimit = std::int64_t{1} << 62;
    if (i >= kLimit || i <= -kLimit) {
        throw range_error("zigzag: magnitude exceeds 2^62");
    }
    if (i >= 0) {
        return 2ull * static_cast<std::uint64_t>(i);
    }
    return 2ull * static_cast<std::uint64_t>(-i) + 1ull;
}

inline std::int64_t unzigzag(std::uint64_t u) {
    if ((u & 1ull) == 0) {
        return static_cast<std::int64_t>(u >> 1);
    }
    return -static_cast<std::int64_t>((u - 1ull) >> 1);
}

// Split of the total error budget between quantization and approximation:
// eps_q = lambda * eps_total, eps_f = eps_total - eps_q. The approximation
// tolerance in grid units is eps_f / (2 eps_q).
struct ErrorBudget {
    double eps_total = 0.0;
    double lambda = 0.5;
    double eps_q = 0.0;
    double eps_f = 0.0;

    static ErrorBudget split(double eps_total, double lambda = 0.5) {
        if (!(std::isfinite(eps_total) && eps_total > 0.0)) {
            throw usage_error("error budget: eps must be finite and > 0");
        }
        if (!(std::isfinite(lambda) && lambda > 0.0 && lambda <= 1.0)) {
            throw usage_error("error budget: lambda must be in (0, 1]");
        }
        ErrorBudget b;
        b.eps_total = eps_total;
        b.lambda = lambda;
        b.eps_q = lambda * eps_total;
        b.eps_f = eps_total - b.eps_q;  // sums back to eps_total exactly
        return b;
    }

    double grid_tolerance() const { return eps_f / (2.0 * eps_q); }
};

}  // namespace hrtc
