#include <doctest.h>

#include <cmath>
#include <vector>

#include "hrtc/mdsim.hpp"

using namespace hrtc;

namespace {

constexpr double kPi = 3.14159265358979323846;

double potential(double r) {
    const double c = std::min(r, kPi / 2.0);
    return std::sin(c) * std::sin(c);
}

double total_energy(std::span<const double> pos, std::span<const double> vel,
                    double mass, std::uint32_t n) {
    double e = 0.0;
    for (std::size_t i = 0; i < 3 * n; ++i) e += 0.5 * mass * vel[i] * vel[i];
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double dx = pos[3 * i] - pos[3 * j];
            const double dy = pos[3 * i + 1] - pos[3 * j + 1];
            const double dz = pos[3 * i + 2] - pos[3 * j + 2];
            e += potential(std::sqrt(dx * dx + dy * dy + dz * dz));
        }
    }
    return e;
}

}  // namespace

TEST_CASE("pair force vanishes at and beyond the cutoff") {
    CHECK(pair_force({2.0, 0.0, 0.0}) == std::array<double, 3>{0.0, 0.0, 0.0});
    CHECK(pair_force({0.0, kPi / 2.0, 0.0}) == std::array<double, 3>{0.0, 0.0, 0.0});
    CHECK(pair_force({0.0, 0.0, 0.0}) == std::array<double, 3>{0.0, 0.0, 0.0});
}

TEST_CASE("pair force is harmonic near the origin") {
    for (const double r : {1e-3, 1e-4, 1e-5}) {
        const auto f = pair_force({r, 0.0, 0.0});
        CHECK(f[0] == doctest::Approx(-2.0 * r).epsilon(1e-4));
        CHECK(f[1] == 0.0);
        CHECK(f[2] == 0.0);
    }
    // Mid-well check against -sin(2r) * delta / r.
    const double r = 0.8;
    const auto f = pair_force({0.0, r, 0.0});
    CHECK(f[1] == doctest::Approx(-std::sin(2 * r)).epsilon(1e-12));
}

TEST_CASE("two-body energy drift stays below 1e-4 over 1e4 steps") {
    // Hand-rolled velocity Verlet mirroring the simulator, instrumented for
    // energy. Particles start 0.8 apart, at rest.
    const double mass = 2.0;
    const double h = 2e-4;
    std::vector<double> pos = {0.0, 0.0, 0.0, 0.8, 0.0, 0.0};
    std::vector<double> vel(6, 0.0);
    std::vector<double> acc(6, 0.0);
    auto forces = [&](std::vector<double>& a) {
        const auto f = pair_force({pos[0] - pos[3], pos[1] - pos[4], pos[2] - pos[5]});
        for (int d = 0; d < 3; ++d) {
            a[d] = f[static_cast<std::size_t>(d)] / mass;
            a[3 + d] = -f[static_cast<std::size_t>(d)] / mass;
        }
    };
    forces(acc);
    const double e0 = total_energy(pos, vel, mass, 2);
    std::vector<double> acc_new(6, 0.0);
    double max_drift = 0.0;
    for (int step = 0; step < 10000; ++step) {
        for (int i = 0; i < 6; ++i) pos[static_cast<std::size_t>(i)] += vel[static_cast<std::size_t>(i)] * h + 0.5 * acc[static_cast<std::size_t>(i)] * h * h;
        forces(acc_new);
        for (int i = 0; i < 6; ++i) vel[static_cast<std::size_t>(i)] += 0.5 * (acc[static_cast<std::size_t>(i)] + acc_new[static_cast<std::size_t>(i)]) * h;
        std::swap(acc, acc_new);
        max_drift = std::max(max_drift, std::abs(total_energy(pos, vel, mass, 2) - e0));
    }
    CHECK(max_drift / std::abs(e0) <= 1e-4);
}

TEST_CASE("runs are deterministic for a fixed seed") {
    SimConfig cfg;
    cfg.n_particles = 64;
    cfg.equil_steps = 200;
    cfg.run_steps = 800;
    cfg.seed = 42;
    std::vector<double> first;
    run_simulation(cfg, [&](std::span<const double> frame) {
        first.insert(first.end(), frame.begin(), frame.end());
    });
    std::vector<double> second;
    run_simulation(cfg, [&](std::span<const double> frame) {
        second.insert(second.end(), frame.begin(), frame.end());
    });
    CHECK(first == second);
    CHECK(first.size() == 800u * 64u * 3u);

    cfg.seed = 43;
    std::vector<double> third;
    run_simulation(cfg, [&](std::span<const double> frame) {
        third.insert(third.end(), frame.begin(), frame.end());
    });
    CHECK(first != third);
}

TEST_CASE("subsampling emits floor(run_steps / s) frames") {
    SimConfig cfg;
    cfg.n_particles = 4;
    cfg.equil_steps = 10;
    cfg.run_steps = 103;
    cfg.subsample = 16;
    std::uint64_t frames = 0;
    const std::uint64_t emitted =
        run_simulation(cfg, [&](std::span<const double>) { ++frames; });
    CHECK(frames == 103 / 16);
    CHECK(emitted == frames);
}

TEST_CASE("particles beyond the cutoff stay at rest") {
    SimConfig cfg;
    cfg.n_particles = 2;
    cfg.equil_steps = 0;
    cfg.run_steps = 50;
    cfg.seed = 3;  // box positions are random but almost surely > pi/2 apart
    std::vector<std::vector<double>> frames;
    run_simulation(cfg, [&](std::span<const double> frame) {
        frames.emplace_back(frame.begin(), frame.end());
    });
    REQUIRE(frames.size() == 50);
    const double dx = frames[0][0] - frames[0][3];
    const double dy = frames[0][1] - frames[0][4];
    const double dz = frames[0][2] - frames[0][5];
    REQUIRE(std::sqrt(dx * dx + dy * dy + dz * dz) > kPi / 2.0);
    CHECK(frames.front() == frames.back());  // zero velocity, zero force
}

TEST_CASE("a single particle moves uniformly (here: stays at rest)") {
    SimConfig cfg;
    cfg.n_particles = 1;
    cfg.equil_steps = 100;
    cfg.run_steps = 200;
    cfg.seed = 9;
    std::vector<std::vector<double>> frames;
    run_simulation(cfg, [&](std::span<const double> frame) {
        frames.emplace_back(frame.begin(), frame.end());
    });
    REQUIRE(frames.size() == 200);
    CHECK(frames.front() == frames.back());
}

TEST_CASE("positions stay finite at the default time step") {
    SimConfig cfg;
    cfg.n_particles = 32;
    cfg.equil_steps = 500;
    cfg.run_steps = 500;
    cfg.seed = 5;
    bool all_finite = true;
    run_simulation(cfg, [&](std::span<const double> frame) {
        for (const double v : frame) all_finite = all_finite && std::isfinite(v);
    });
    CHECK(all_finite);
}
