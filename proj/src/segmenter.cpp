#include "hrtc/segmenter.hpp"

#include <algorithm>
#include <cmath>

namespace hrtc {

namespace {

// Multiple of `step` closest to the rational n/d (d > 0), as a multiple
// index. Ties go to the smaller magnitude, which also encodes smaller.
std::int64_t nearest_multiple_i128(__int128 n, __int128 d, std::int64_t step) {
    const __int128 sd = d * step;
    __int128 idx = n / sd;
    if (n % sd != 0 && n < 0) --idx;  // floor
    const __int128 d_lo = n - idx * sd;        // distance to idx, scaled by d
    const __int128 d_hi = (idx + 1) * sd - n;  // distance to idx + 1
    if (d_hi < d_lo) return static_cast<std::int64_t>(idx + 1);
    if (d_lo < d_hi) return static_cast<std::int64_t>(idx);
    const __int128 lo_mag = idx < 0 ? -idx : idx;
    const __int128 hi_mag = idx + 1 < 0 ? -(idx + 1) : idx + 1;
    return static_cast<std::int64_t>(lo_mag <= hi_mag ? idx : idx + 1);
}

// Grid endpoint for a segment whose endpoint interval is
// [lo_n/lo_d, hi_n/hi_d]: the multiple of `step` closest to the last sample
// `e_last`, clamped into the interval widened by step/2 on both sides (such
// a multiple always exists, and any multiple there costs at most half a grid
// cell of the error budget).
std::int64_t snap_endpoint(__int128 lo_n, __int128 lo_d, __int128 hi_n, __int128 hi_d,
                           std::int64_t e_last, std::int64_t step) {
    const std::int64_t idx_min =
        ceil_div_i128(2 * lo_n - step * lo_d, 2 * step * lo_d);
    const std::int64_t idx_max =
        floor_div_i128(2 * hi_n + step * hi_d, 2 * step * hi_d);
    const std::int64_t idx_e = nearest_multiple_i128(e_last, 1, step);
    const std::int64_t idx = std::clamp(idx_e, idx_min, idx_max);
    return idx;
}

}  // namespace

SegmenterConfig SegmenterConfig::make(const ErrorBudget& budget, std::uint32_t block_size) {
    if (block_size < 2) {
        throw usage_error("block size must be >= 2");
    }
    const double grid_tol = budget.grid_tolerance();
    if (!(std::isfinite(grid_tol) && grid_tol >= 0.0) ||
        grid_tol > static_cast<double>(std::int64_t{1} << 30)) {
        throw usage_error("approximation tolerance out of range");
    }
    SegmenterConfig cfg;
    // Deepest sub-grid (<= 2^16) that still gives the tolerance at least one
    // sub-grid unit; eps_f ~ 0 degenerates to exact fitting on the data grid.
    int s = 16;
    while (s > 0 && grid_tol * static_cast<double>(std::int64_t{1} << s) < 1.5) {
        --s;
    }
    cfg.sub_bits = s;
    cfg.step = std::int64_t{1} << s;
    cfg.tol = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(
               std::floor(grid_tol * static_cast<double>(cfg.step) - 0.5)));
    cfg.sub_eps = budget.eps_q / static_cast<double>(cfg.step);
    // All cross products have the shape (|x - anchor| + tol) * dt with
    // dt < block_size; keep them below 2^62.
    const std::int64_t budget_bits = (std::int64_t{1} << 62) / block_size;
    const std::int64_t m = budget_bits - cfg.tol - 1;
    if (m < (std::int64_t{1} << 20)) {
        throw usage_error("block size too large for the requested tolerance");
    }
    cfg.max_rel = std::min(m, std::int64_t{1} << 40);
    cfg.max_duration = block_size - 1;
    return cfg;
}

std::pair<Rat, Rat> cone_from_point(std::int64_t p, std::int64_t q, std::uint32_t dt,
                                    const Rat& tol) {
    const std::int64_t m = q - p;
    const std::int64_t d = static_cast<std::int64_t>(dt);
    return {Rat::of(m * tol.den - tol.num, d * tol.den),
            Rat::of(m * tol.den + tol.num, d * tol.den)};
}

std::optional<std::pair<Rat, Rat>> cone_intersect(const std::pair<Rat, Rat>& a,
                                                  const std::pair<Rat, Rat>& b) {
    const Rat lo = rat_max(a.first, b.first);
    const Rat hi = rat_min(a.second, b.second);
    if (hi < lo) return std::nullopt;
    return std::make_pair(lo, hi);
}

// ---------------------------------------------------------------------------
// Reference kernel
// ---------------------------------------------------------------------------

void ConeSegmenter::reset(std::int64_t start_q) {
    if (start_q > (std::int64_t{1} << 45) || start_q < -(std::int64_t{1} << 45)) {
        throw range_error("segmenter: anchor exceeds the exact-arithmetic bound");
    }
    p_ = start_q;
    anchor_ = start_q * cfg_.step;
    dt_ = 0;
    e_last_ = 0;
}

bool ConeSegmenter::accept(std::int64_t x_sub) {
    const std::int64_t m = x_sub - anchor_;
    if (m > cfg_.max_rel || m < -cfg_.max_rel) {
        throw range_error("segmenter: |sample - anchor| exceeds the exact bound");
    }
    if (dt_ >= cfg_.max_duration) {
        throw range_error("segmenter: segment exceeds the configured duration bound");
    }
    const std::uint32_t dtp = dt_ + 1;
    const std::int64_t d = static_cast<std::int64_t>(dtp);
    const Rat lo = Rat::of(m - cfg_.tol, d);
    const Rat hi = Rat::of(m + cfg_.tol, d);
    if (dt_ == 0) {
        v_lo_ = lo;
        v_hi_ = hi;
    } else {
        const auto merged = cone_intersect({v_lo_, v_hi_}, {lo, hi});
        if (!merged) return false;
        v_lo_ = merged->first;
        v_hi_ = merged->second;
    }
    dt_ = dtp;
    e_last_ = m;
    return true;
}

// Ends the open segment with the grid endpoint closest to the last sample,
// at most half a grid cell outside the cone's endpoint interval. The
// terminal seeds the next segment.
void ConeSegmenter::emit(std::vector<SupportVector>& out) {
    if (dt_ == 0) throw usage_error("segmenter: flush on an empty segment");
    const __int128 d = dt_;
    const std::int64_t dq =
        snap_endpoint(d * v_lo_.num, v_lo_.den, d * v_hi_.num, v_hi_.den, e_last_,
                      cfg_.step);
    out.push_back({dq, dt_});
    p_ += dq;
    anchor_ += dq * cfg_.step;
    dt_ = 0;
    e_last_ = 0;
}

void ConeSegmenter::add(std::int64_t x_sub, std::vector<SupportVector>& out) {
    if (!accept(x_sub)) {
        emit(out);
        accept(x_sub);  // a fresh segment accepts its first sample
    }
}

void ConeSegmenter::finish(std::vector<SupportVector>& out) {
    if (dt_ >= 1) emit(out);
}

// ---------------------------------------------------------------------------
// Division-free kernel
// ---------------------------------------------------------------------------

void ExtremaSegmenter::reset(std::int64_t start_q) {
    if (start_q > (std::int64_t{1} << 45) || start_q < -(std::int64_t{1} << 45)) {
        throw range_error("segmenter: anchor exceeds the exact-arithmetic bound");
    }
    p_ = start_q;
    anchor_ = start_q * step_;
    dt_ = 0;
    e_last_ = 0;
}

bool ExtremaSegmenter::accept(std::int64_t x_sub) {
    const std::int64_t m = x_sub - anchor_;
    if (m > max_rel_ || m < -max_rel_) {
        throw range_error("segmenter: |sample - anchor| exceeds the exact bound");
    }
    if (dt_ >= max_duration_) {
        throw range_error("segmenter: segment exceeds the configured duration bound");
    }
    const std::int64_t dtp = static_cast<std::int64_t>(dt_) + 1;
    if (dt_ == 0) {
        x_lo_ = x_hi_ = m;
        t_lo_ = t_hi_ = 1;
        dt_ = 1;
        e_last_ = m;
        return true;
    }
    // Segment ends when the new point's cone misses [v_lo, v_hi]:
    //   v_lo > (m + tol)/dtp  or  (m - tol)/dtp > v_hi
    // with v_lo = (x_lo - tol)/t_lo and v_hi = (x_hi + tol)/t_hi.
    const std::int64_t lo_edge = m - tol_;
    const std::int64_t hi_edge = m + tol_;
    if ((x_lo_ - tol_) * dtp > hi_edge * t_lo_ ||
        lo_edge * t_hi_ > (x_hi_ + tol_) * dtp) {
        return false;
    }
    const bool lo_binds = lo_edge * t_lo_ > (x_lo_ - tol_) * dtp;
    const bool hi_binds = hi_edge * t_hi_ < (x_hi_ + tol_) * dtp;
    x_lo_ = lo_binds ? m : x_lo_;
    t_lo_ = lo_binds ? dtp : t_lo_;
    x_hi_ = hi_binds ? m : x_hi_;
    t_hi_ = hi_binds ? dtp : t_hi_;
    dt_ = static_cast<std::uint32_t>(dtp);
    e_last_ = m;
    return true;
}

void ExtremaSegmenter::emit(std::vector<SupportVector>& out) {
    if (dt_ == 0) throw usage_error("segmenter: flush on an empty segment");
    const __int128 d = dt_;
    const std::int64_t dq =
        snap_endpoint(d * (x_lo_ - tol_), t_lo_, d * (x_hi_ + tol_), t_hi_, e_last_,
                      step_);
    out.push_back({dq, dt_});
    p_ += dq;
    anchor_ += dq * step_;
    dt_ = 0;
    e_last_ = 0;
}

void ExtremaSegmenter::add(std::int64_t x_sub, std::vector<SupportVector>& out) {
    if (!accept(x_sub)) {
        emit(out);
        accept(x_sub);
    }
}

void ExtremaSegmenter::finish(std::vector<SupportVector>& out) {
    if (dt_ >= 1) emit(out);
}

double reconstruct(std::int64_t p, const SupportVector& sv, std::uint32_t t, double eps_q) {
    if (t > sv.delta_t) throw usage_error("reconstruct: t outside the segment");
    const double grid = 2.0 * eps_q;
    if (t == 0) return static_cast<double>(p) * grid;
    return (static_cast<double>(p) +
            static_cast<double>(t) * static_cast<double>(sv.delta_q) /
                static_cast<double>(sv.delta_t)) *
           grid;
}

}  // namespace hrtc
