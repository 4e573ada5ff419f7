#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hrtc/quantizer.hpp"
#include "hrtc/rational.hpp"

namespace hrtc {

// One linear segment, stored as the change in grid value over its duration.
// The line runs from the previous segment's terminal point (0, p) to
// (delta_t, p + delta_q), both on the data grid, and stays within the error
// budget of every raw sample it covers.
struct SupportVector {
    std::int64_t delta_q = 0;
    std::uint32_t delta_t = 0;

    friend bool operator==(const SupportVector&, const SupportVector&) = default;
};

// Samples are fitted on a sub-grid that refines the data grid by 2^sub_bits,
// so the approximation tolerance becomes the integer `tol` in sub-grid units
// (a dyadic rational tol/2^sub_bits in grid units, rounded down). All slope
// comparisons are exact integer arithmetic on sub-grid values.
//
// Budget accounting, in sub-grid units g_f = 2*eps_q / 2^sub_bits:
//   tol * g_f            <= eps_f - g_f/2   (fit of the sub-quantized sample)
//   g_f/2                                    (sub-quantization of the sample)
//   step/2 * g_f = eps_q                     (snap of the endpoint to the grid)
// which sums to at most eps_q + eps_f for every covered timestep.
struct SegmenterConfig {
    std::int64_t tol = 0;   // approximation tolerance in sub-grid units
    std::int64_t step = 1;  // sub-grid units per data-grid unit (2^sub_bits)
    int sub_bits = 0;
    double sub_eps = 0.0;  // quantizer eps for sub-grid sampling
    // Largest |sample - anchor| (sub-grid units) for which all cross
    // products stay below 2^62.
    std::int64_t max_rel = 0;
    // Longest segment the overflow budget covers; the scheduler's block
    // flushes keep durations below this by construction.
    std::uint32_t max_duration = 0;

    static SegmenterConfig make(const ErrorBudget& budget, std::uint32_t block_size);
};

// Slope cone through the segment start that approximates one more point at
// offset dt within tol: [(q - p - tol)/dt, (q - p + tol)/dt].
std::pair<Rat, Rat> cone_from_point(std::int64_t p, std::int64_t q, std::uint32_t dt,
                                    const Rat& tol);

// Intersection of two cones sharing a start point; nullopt when empty.
std::optional<std::pair<Rat, Rat>> cone_intersect(const std::pair<Rat, Rat>& a,
                                                  const std::pair<Rat, Rat>& b);

/// Reference kernel. Keeps the valid-slope cone as exact rationals and makes
/// every decision by cross-multiplication, so it can serve as the oracle for
/// the division-free kernel.
class ConeSegmenter {
  public:
    explicit ConeSegmenter(const SegmenterConfig& cfg) : cfg_(cfg) {}

    // Start a fresh segment anchored at the key-frame sample (grid units).
    void reset(std::int64_t start_q);

    // Feed one sub-grid sample; appends the completed segment if it ends one.
    void add(std::int64_t x_sub, std::vector<SupportVector>& out);

    // End of a block: emit the open segment, if any.
    void finish(std::vector<SupportVector>& out);

    std::int64_t start() const { return p_; }
    std::uint32_t duration() const { return dt_; }
    Rat cone_lo() const { return v_lo_; }  // sub-grid units per step
    Rat cone_hi() const { return v_hi_; }

  private:
    bool accept(std::int64_t x_sub);
    void emit(std::vector<SupportVector>& out);

    SegmenterConfig cfg_;
    std::int64_t p_ = 0;        // segment start value (grid units)
    std::int64_t anchor_ = 0;   // p_ in sub-grid units
    std::uint32_t dt_ = 0;      // accepted samples since start
    std::int64_t e_last_ = 0;   // last sample relative to anchor (sub-grid)
    Rat v_lo_{0, 1};
    Rat v_hi_{0, 1};
};

/// Division-free kernel. Instead of slope bounds it stores the time and value
/// of the two previous extrema that induce them, and decides accept/flush
/// with cross-multiplied 64-bit integer comparisons only.
/// Decision-equivalent to ConeSegmenter on every input within max_rel.
class ExtremaSegmenter {
  public:
    explicit ExtremaSegmenter(const SegmenterConfig& cfg)
        : tol_(cfg.tol),
          step_(cfg.step),
          max_rel_(cfg.max_rel),
          max_duration_(cfg.max_duration) {}

    void reset(std::int64_t start_q);
    void add(std::int64_t x_sub, std::vector<SupportVector>& out);
    void finish(std::vector<SupportVector>& out);

    std::int64_t start() const { return p_; }
    std::uint32_t duration() const { return dt_; }

  private:
    bool accept(std::int64_t x_sub);
    void emit(std::vector<SupportVector>& out);

    std::int64_t tol_;
    std::int64_t step_;
    std::int64_t max_rel_;
    std::uint32_t max_duration_;
    std::int64_t p_ = 0;
    std::int64_t anchor_ = 0;
    std::uint32_t dt_ = 0;
    std::int64_t e_last_ = 0;
    std::int64_t x_lo_ = 0;  // extremum value inducing the lower slope bound
    std::int64_t t_lo_ = 1;
    std::int64_t x_hi_ = 0;  // extremum value inducing the upper slope bound
    std::int64_t t_hi_ = 1;
};

// Reconstruction of one covered timestep, in coordinate units.
double reconstruct(std::int64_t p, const SupportVector& sv, std::uint32_t t, double eps_q);

}  // namespace hrtc
