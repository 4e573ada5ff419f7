#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include "hrtc/segmenter.hpp"
#include "oracles.hpp"

using namespace hrtc;

namespace {

// Config with a hand-picked tolerance, for driving kernels directly with
// sub-grid integers.
SegmenterConfig raw_config(std::int64_t tol, std::int64_t step,
                           std::uint32_t block = 8192) {
    SegmenterConfig cfg;
    cfg.tol = tol;
    cfg.step = step;
    cfg.sub_bits = 0;
    while ((std::int64_t{1} << cfg.sub_bits) < step) ++cfg.sub_bits;
    cfg.sub_eps = 0.5 / static_cast<double>(step);
    cfg.max_rel = ((std::int64_t{1} << 62) / block - tol) - 1;
    cfg.max_rel = std::min(cfg.max_rel, std::int64_t{1} << 40);
    cfg.max_duration = block - 1;
    return cfg;
}

// Drives one dimension through a kernel: raw coordinates in, a reconstruction
// of every covered timestep out.
template <class Seg>
std::vector<double> compress_and_reconstruct(Seg& seg, std::span<const double> xs,
                                             const ErrorBudget& budget,
                                             const SegmenterConfig& cfg) {
    const std::int64_t p0 = quantize(xs[0], budget.eps_q);
    seg.reset(p0);
    std::vector<SupportVector> svs;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        seg.add(quantize(xs[i], cfg.sub_eps), svs);
    }
    seg.finish(svs);
    std::vector<double> out;
    out.reserve(xs.size());
    std::int64_t p = p0;
    out.push_back(dequantize(p, budget.eps_q));
    for (const auto& sv : svs) {
        for (std::uint32_t t = 1; t <= sv.delta_t; ++t) {
            out.push_back(reconstruct(p, sv, t, budget.eps_q));
        }
        p += sv.delta_q;
    }
    REQUIRE(out.size() == xs.size());
    return out;
}

}  // namespace

TEST_CASE("cone_from_point matches the error-cone formula") {
    const Rat half = Rat::of(1, 2);
    auto c1 = cone_from_point(0, 1, 1, half);
    CHECK(c1.first == Rat::of(1, 2));
    CHECK(c1.second == Rat::of(3, 2));

    auto c2 = cone_from_point(0, 2, 2, half);
    CHECK(c2.first == Rat::of(3, 4));
    CHECK(c2.second == Rat::of(5, 4));

    auto c3 = cone_from_point(0, 0, 1, Rat::of(0, 1));
    CHECK(c3.first == Rat::of(0, 1));
    CHECK(c3.second == Rat::of(0, 1));
}

TEST_CASE("cone_intersect keeps the tightest bounds") {
    auto nested = cone_intersect({Rat::of(1, 2), Rat::of(3, 2)},
                                 {Rat::of(3, 4), Rat::of(5, 4)});
    REQUIRE(nested.has_value());
    CHECK(nested->first == Rat::of(3, 4));
    CHECK(nested->second == Rat::of(5, 4));

    auto touching = cone_intersect({Rat::of(-1, 1), Rat::of(1, 1)},
                                   {Rat::of(1, 1), Rat::of(2, 1)});
    REQUIRE(touching.has_value());
    CHECK(touching->first == Rat::of(1, 1));
    CHECK(touching->second == Rat::of(1, 1));

    CHECK(!cone_intersect({Rat::of(-1, 2), Rat::of(1, 2)},
                          {Rat::of(3, 4), Rat::of(5, 4)})
               .has_value());
}

TEST_CASE("adding points narrows the cone along a ramp") {
    // Half-grid tolerance: step 2, tol 1; the samples 1, 2, 3 in grid units.
    ConeSegmenter seg(raw_config(1, 2));
    seg.reset(0);
    std::vector<SupportVector> svs;
    for (std::int64_t t = 1; t <= 3; ++t) {
        seg.add(2 * t, svs);
        CHECK(svs.empty());
    }
    // In sub-grid units: max lower bound 5/3, min upper bound 7/3, i.e. the
    // grid-unit cone (5/6, 7/6).
    CHECK(seg.cone_lo() == Rat::of(5, 3));
    CHECK(seg.cone_hi() == Rat::of(7, 3));
    CHECK(seg.duration() == 3);
    // The slope to the last sample lies inside the cone and its endpoint 6
    // is already a grid multiple.
    seg.finish(svs);
    REQUIRE(svs.size() == 1);
    CHECK(svs[0] == SupportVector{3, 3});
}

TEST_CASE("constant input never flushes") {
    for (const std::int64_t step : {1, 2, 65536}) {
        ConeSegmenter seg(raw_config(step / 2, step));
        seg.reset(5);
        std::vector<SupportVector> svs;
        for (int i = 0; i < 600; ++i) {
            seg.add(5 * step, svs);
        }
        CHECK(svs.empty());
        seg.finish(svs);
        REQUIRE(svs.size() == 1);
        CHECK(svs[0] == SupportVector{0, 600});
    }
}

TEST_CASE("cone emptiness ends the segment with the clamped endpoint") {
    // tol = 1, step = 1 (grid == sub-grid): points 0, 3, 10 from p = 0.
    SegmenterConfig cfg = raw_config(1, 1);
    ConeSegmenter seg(cfg);
    seg.reset(0);
    std::vector<SupportVector> svs;
    seg.add(0, svs);  // cone (-1, 1)
    seg.add(3, svs);  // cone (1, 1)
    CHECK(svs.empty());
    CHECK(seg.cone_lo() == Rat::of(1, 1));
    CHECK(seg.cone_hi() == Rat::of(1, 1));
    CHECK(seg.duration() == 2);
    // The point cone of (3, q=10) is (3, 11/3): disjoint, so the segment
    // ends. v_last = 3/2 > v_hi = 1 clamps to 2*1 = 2, and the pending
    // sample seeds the next segment.
    seg.add(10, svs);
    REQUIRE(svs.size() == 1);
    CHECK(svs[0] == SupportVector{2, 2});
    CHECK(seg.start() == 2);
    CHECK(seg.duration() == 1);
    seg.finish(svs);
    REQUIRE(svs.size() == 2);
    CHECK(svs[1] == SupportVector{8, 1});  // terminal 10 = 2 + 8

    ExtremaSegmenter fast(cfg);
    fast.reset(0);
    std::vector<SupportVector> fsvs;
    fast.add(0, fsvs);
    fast.add(3, fsvs);
    fast.add(10, fsvs);
    fast.finish(fsvs);
    CHECK(fsvs == svs);
}

TEST_CASE("fractional endpoints snap to the nearest grid value") {
    // step = 8, tol = 3: samples 0 then 8 leave the cone (5/2, 3); the
    // clamped endpoint 2*3 = 6 snaps to the grid multiple 8.
    SegmenterConfig cfg = raw_config(3, 8);
    for (int kernel = 0; kernel < 2; ++kernel) {
        std::vector<SupportVector> svs;
        if (kernel == 0) {
            ConeSegmenter seg(cfg);
            seg.reset(0);
            seg.add(0, svs);
            seg.add(8, svs);
            CHECK(svs.empty());
            seg.finish(svs);
        } else {
            ExtremaSegmenter seg(cfg);
            seg.reset(0);
            seg.add(0, svs);
            seg.add(8, svs);
            seg.finish(svs);
        }
        REQUIRE(svs.size() == 1);
        CHECK(svs[0] == SupportVector{1, 2});
    }
}

TEST_CASE("endpoint snapping ties prefer the smaller magnitude") {
    // Exactly halfway between grid multiples: e_last = 4 with step 8 and a
    // wide cone. Multiple 0 wins over multiple 8.
    SegmenterConfig cfg = raw_config(100, 8);
    ConeSegmenter seg(cfg);
    seg.reset(0);
    std::vector<SupportVector> svs;
    seg.add(4, svs);
    seg.finish(svs);
    REQUIRE(svs.size() == 1);
    CHECK(svs[0] == SupportVector{0, 1});

    // Mirrored: -4 also snaps toward zero.
    seg.reset(0);
    svs.clear();
    seg.add(-4, svs);
    seg.finish(svs);
    REQUIRE(svs.size() == 1);
    CHECK(svs[0] == SupportVector{0, 1});
}

TEST_CASE("reconstruct interpolates between segment endpoints") {
    CHECK(reconstruct(0, {0, 5}, 3, 0.25) == 0.0);
    CHECK(reconstruct(0, {3, 3}, 2, 0.5) == 2.0);
    CHECK(reconstruct(2, {2, 2}, 1, 0.5) == 3.0);
    CHECK(reconstruct(2, {2, 2}, 0, 0.5) == 2.0);
    CHECK(reconstruct(2, {2, 2}, 2, 0.5) == 4.0);
    CHECK_THROWS_AS(reconstruct(0, {1, 2}, 3, 0.5), usage_error);
}

TEST_CASE("finishing an empty segment emits nothing") {
    ConeSegmenter a(raw_config(1, 2));
    a.reset(0);
    std::vector<SupportVector> svs;
    a.finish(svs);
    CHECK(svs.empty());
    ExtremaSegmenter b(raw_config(1, 2));
    b.reset(0);
    b.finish(svs);
    CHECK(svs.empty());
}

TEST_CASE("configuration fixes the tolerance as a dyadic rational, rounded down") {
    // lambda 0.5: eps_f / (2 eps_q) = 0.5, refined at 2^16.
    const SegmenterConfig c1 =
        SegmenterConfig::make(ErrorBudget::split(0.01, 0.5), 2048);
    CHECK(c1.step == 65536);
    CHECK(c1.tol == 32767);  // floor(0.5 * 65536 - 0.5)
    CHECK(static_cast<double>(c1.tol) / static_cast<double>(c1.step) <= 0.5);
    CHECK(c1.sub_eps == doctest::Approx(0.005 / 65536.0));

    // lambda 1: exact fitting on the data grid (eps_q = eps_total).
    const SegmenterConfig c2 =
        SegmenterConfig::make(ErrorBudget::split(0.01, 1.0), 2048);
    CHECK(c2.step == 1);
    CHECK(c2.tol == 0);
    CHECK(c2.sub_eps == 0.01);

    CHECK_THROWS_AS(SegmenterConfig::make(ErrorBudget::split(0.01, 0.5), 1),
                    usage_error);
}

TEST_CASE("both kernels satisfy the reconstruction error bound") {
    std::mt19937_64 rng(41);
    const oracle::Family families[] = {oracle::Family::walk, oracle::Family::ramp,
                                       oracle::Family::sinusoid, oracle::Family::noise};
    for (int rep = 0; rep < 120; ++rep) {
        const double eps_total = std::pow(10.0, -1.0 - static_cast<double>(rng() % 3));
        const double lambda = (rep % 5 == 0) ? 1.0 : (rep % 5 == 1 ? 0.9 : 0.5);
        const ErrorBudget budget = ErrorBudget::split(eps_total, lambda);
        const SegmenterConfig cfg = SegmenterConfig::make(budget, 8192);
        const auto xs = oracle::make_trajectory(families[rep % 4], 400 + rng() % 400, rng);

        const double bound = (budget.eps_q + budget.eps_f) * (1.0 + 1e-9);
        ConeSegmenter ref(cfg);
        const auto rec_ref = compress_and_reconstruct(ref, xs, budget, cfg);
        ExtremaSegmenter fast(cfg);
        const auto rec_fast = compress_and_reconstruct(fast, xs, budget, cfg);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(std::abs(rec_ref[i] - xs[i]) <= bound);
            CHECK(rec_ref[i] == rec_fast[i]);  // kernels agree bit-exactly
        }
    }
}

TEST_CASE("zero approximation tolerance reproduces quantized samples exactly") {
    std::mt19937_64 rng(43);
    const ErrorBudget budget = ErrorBudget::split(0.02, 1.0);
    const SegmenterConfig cfg = SegmenterConfig::make(budget, 8192);
    REQUIRE(cfg.step == 1);
    REQUIRE(cfg.tol == 0);
    for (int rep = 0; rep < 40; ++rep) {
        const auto xs = oracle::make_trajectory(oracle::Family::walk, 300, rng);
        ConeSegmenter seg(cfg);
        const auto rec = compress_and_reconstruct(seg, xs, budget, cfg);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(rec[i] == dequantize(quantize(xs[i], budget.eps_q), budget.eps_q));
        }
    }
}

TEST_CASE("kernels make identical decisions on randomized updates") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 200; ++rep) {
        const std::int64_t step = std::int64_t{1} << (rng() % 17);
        const std::int64_t tol = static_cast<std::int64_t>(rng() % (3 * step + 2));
        SegmenterConfig cfg = raw_config(tol, step, 4096);
        ConeSegmenter ref(cfg);
        ExtremaSegmenter fast(cfg);
        const std::int64_t start = static_cast<std::int64_t>(rng() % 2000) - 1000;
        ref.reset(start);
        fast.reset(start);
        std::vector<SupportVector> a, b;
        std::int64_t x = start * step;
        const std::int64_t spread = 1 + static_cast<std::int64_t>(rng() % (2 * step));
        for (int i = 0; i < 500; ++i) {
            x += static_cast<std::int64_t>(rng() % (2 * spread + 1)) - spread;
            ref.add(x, a);
            fast.add(x, b);
            REQUIRE(a == b);
            REQUIRE(ref.duration() == fast.duration());
            REQUIRE(ref.start() == fast.start());
        }
        ref.finish(a);
        fast.finish(b);
        REQUIRE(a == b);
    }
}

TEST_CASE("emitted segments are greedily maximal") {
    std::mt19937_64 rng(53);
    std::uint64_t checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const std::int64_t step = std::int64_t{1} << (rng() % 9);
        const std::int64_t tol = static_cast<std::int64_t>(rng() % (8 * step + 2));
        SegmenterConfig cfg = raw_config(tol, step);
        ExtremaSegmenter seg(cfg);
        std::int64_t p = static_cast<std::int64_t>(rng() % 100) - 50;
        seg.reset(p);
        std::int64_t x = p * step;
        std::deque<std::int64_t> log;  // accepted samples not yet covered
        std::vector<SupportVector> svs;
        for (int i = 0; i < 2000; ++i) {
            x += static_cast<std::int64_t>(rng() % 31) - 15;
            svs.clear();
            seg.add(x, svs);
            log.push_back(x);
            for (const SupportVector& sv : svs) {
                REQUIRE(log.size() > sv.delta_t);
                // The oracle recomputes the cone from scratch: the covered
                // points fit one line, and extending the segment by its
                // successor point admits none.
                const std::vector<std::int64_t> covered(log.begin(),
                                                        log.begin() + sv.delta_t);
                auto extended = covered;
                extended.push_back(log[sv.delta_t]);
                REQUIRE(oracle::admits_line(p * step, covered, tol));
                REQUIRE(!oracle::admits_line(p * step, extended, tol));
                ++checked;
                p += sv.delta_q;
                log.erase(log.begin(), log.begin() + sv.delta_t);
            }
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("add rejects values beyond the documented magnitude bound") {
    SegmenterConfig cfg = raw_config(1, 2);
    ConeSegmenter seg(cfg);
    seg.reset(0);
    std::vector<SupportVector> svs;
    CHECK_THROWS_AS(seg.add(cfg.max_rel + 1, svs), range_error);
    ExtremaSegmenter fast(cfg);
    fast.reset(0);
    CHECK_THROWS_AS(fast.add(cfg.max_rel + 1, svs), range_error);
    CHECK_THROWS_AS(seg.reset(std::int64_t{1} << 50), range_error);
}
