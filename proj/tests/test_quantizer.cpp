#include <doctest.h>

#include <cmath>
#include <random>

#include "hrtc/quantizer.hpp"
#include "hrtc/rational.hpp"

using namespace hrtc;

TEST_CASE("quantize uses round-half-up on the 2*eps_q grid") {
    CHECK(quantize(0.0, 0.25) == 0);
    CHECK(quantize(0.0, 1e-6) == 0);
    CHECK(quantize(1.0, 0.25) == 2);    // grid 0.5, floor(2.5) = 2
    CHECK(quantize(-0.3, 0.25) == -1);  // floor(-0.6 + 0.5) = -1
    CHECK(std::abs(dequantize(quantize(-0.3, 0.25), 0.25) - (-0.3)) <= 0.25);
}

TEST_CASE("dequantize inverts to within eps_q") {
    CHECK(dequantize(0, 0.25) == 0.0);
    CHECK(dequantize(2, 0.25) == 1.0);
    CHECK(dequantize(-1, 0.25) == -0.5);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const double x = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 2000.0;
        for (const double eps_q : {1e-4, 0.05, 0.5, 3.0}) {
            const double back = dequantize(quantize(x, eps_q), eps_q);
            CHECK(std::abs(back - x) <= eps_q * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("quantize is monotone and rejects bad input") {
    std::mt19937_64 rng(8);
    double prev = -1e9;
    for (int i = 0; i < 1000; ++i) {
        prev += static_cast<double>(rng() >> 11) * 0x1.0p-53 * 1e6;
        const double next = prev + static_cast<double>(rng() >> 11) * 0x1.0p-53;
        CHECK(quantize(prev, 0.01) <= quantize(next, 0.01));
    }
    CHECK_THROWS_AS(quantize(std::nan(""), 0.5), data_error);
    CHECK_THROWS_AS(quantize(std::numeric_limits<double>::infinity(), 0.5), data_error);
    CHECK_THROWS_AS(quantize(1e30, 1e-9), range_error);
}

TEST_CASE("zigzag maps signed to unsigned as 2i / -2i+1") {
    CHECK(zigzag(0) == 0);
    CHECK(zigzag(1) == 2);
    CHECK(zigzag(-1) == 3);
    CHECK(zigzag(-2) == 5);
    CHECK(unzigzag(5) == -2);

    std::mt19937_64 rng(9);
    for (int i = 0; i < 100000; ++i) {
        const std::int64_t v =
            static_cast<std::int64_t>(rng() % (1ull << 61)) - (std::int64_t{1} << 60);
        CHECK(unzigzag(zigzag(v)) == v);
    }
    CHECK_THROWS_AS(zigzag(std::int64_t{1} << 62), range_error);
}

TEST_CASE("error budget splits eps between quantization and approximation") {
    const ErrorBudget b = ErrorBudget::split(0.01, 0.5);
    CHECK(b.eps_q == doctest::Approx(0.005));
    CHECK(b.eps_f == doctest::Approx(0.005));
    CHECK(b.eps_q + b.eps_f == b.eps_total);
    CHECK(b.grid_tolerance() == doctest::Approx(0.5));

    const ErrorBudget exact = ErrorBudget::split(0.2, 1.0);
    CHECK(exact.eps_f == 0.0);
    CHECK(exact.grid_tolerance() == 0.0);

    CHECK_THROWS_AS(ErrorBudget::split(0.0, 0.5), usage_error);
    CHECK_THROWS_AS(ErrorBudget::split(-1.0, 0.5), usage_error);
    CHECK_THROWS_AS(ErrorBudget::split(0.01, 0.0), usage_error);
    CHECK_THROWS_AS(ErrorBudget::split(0.01, 1.5), usage_error);
}

TEST_CASE("rational comparison and scaled floor/ceil are exact") {
    const Rat half = Rat::of(1, 2);
    const Rat third = Rat::of(-2, -6);  // normalizes to 1/3
    CHECK(third.num == 1);
    CHECK(third.den == 3);
    CHECK(third < half);
    CHECK(Rat::of(5, 6) < Rat::of(7, 6));
    CHECK(Rat::of(-1, 3) < Rat::of(0, 1));

    CHECK(floor_scaled(3, Rat::of(5, 6)) == 2);   // 15/6
    CHECK(ceil_scaled(3, Rat::of(5, 6)) == 3);
    CHECK(floor_scaled(-3, Rat::of(5, 6)) == -3);  // -15/6
    CHECK(ceil_scaled(-3, Rat::of(5, 6)) == -2);
    CHECK(floor_scaled(4, Rat::of(1, 2)) == 2);    // exact hit
    CHECK(ceil_scaled(4, Rat::of(1, 2)) == 2);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        const std::int64_t n = static_cast<std::int64_t>(rng() % 2001) - 1000;
        const std::int64_t d = static_cast<std::int64_t>(rng() % 999) + 1;
        const std::int64_t m = static_cast<std::int64_t>(rng() % 201) - 100;
        const Rat r = Rat::of(n, d);
        const double exact = static_cast<double>(m) * static_cast<double>(n) /
                             static_cast<double>(d);
        CHECK(floor_scaled(m, r) == static_cast<std::int64_t>(std::floor(exact + 1e-9)) );
        CHECK(ceil_scaled(m, r) == static_cast<std::int64_t>(std::ceil(exact - 1e-9)));
    }
}
