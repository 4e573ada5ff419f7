#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>

namespace hrtc {

// Benchmark trajectory generator: velocity-Verlet integration of n particles
// under the pairwise well potential U(r) = sin(min(r, pi/2))^2. Particles
// start uniformly distributed in the box with zero velocity; the transient
// phase is dropped so sub-sampling sees stationary motion.
struct SimConfig {
    std::uint32_t n_particles = 512;
    double mass = 2.0;
    double time_step = 2e-4;
    std::array<double, 3> box{15.0, 16.0, 17.0};
    std::uint64_t equil_steps = 100000;
    std::uint64_t run_steps = 1000000;
    std::uint64_t seed = 1;
    std::uint32_t subsample = 1;
};

// Force on a particle displaced by `delta` from its partner:
// -2 sin(r) cos(r) * delta / r inside the cutoff, zero at or beyond pi/2.
std::array<double, 3> pair_force(const std::array<double, 3>& delta);

// Runs the simulation, emitting one frame (3 * n_particles coordinates) every
// `subsample` steps after equilibration: exactly run_steps/subsample frames.
// Deterministic for a given config.
std::uint64_t run_simulation(const SimConfig& config,
                             const std::function<void(std::span<const double>)>& emit);

}  // namespace hrtc
