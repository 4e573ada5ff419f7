#include "hrtc/mdsim.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "hrtc/errors.hpp"

namespace hrtc {

namespace {

constexpr double kCutoff = 1.5707963267948966;  // pi/2

// Canonical [0,1) double from the top 53 bits, independent of the standard
// library's distribution implementation.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Forces {
    const double cutoff_sq = kCutoff * kCutoff;

    void accumulate(std::span<const double> pos, std::span<double> acc, double mass,
                    std::uint32_t n) const {
        std::fill(acc.begin(), acc.end(), 0.0);
        const double inv_mass = 1.0 / mass;
        for (std::uint32_t i = 0; i < n; ++i) {
            const double xi = pos[3 * i], yi = pos[3 * i + 1], zi = pos[3 * i + 2];
            for (std::uint32_t j = i + 1; j < n; ++j) {
                const double dx = xi - pos[3 * j];
                const double dy = yi - pos[3 * j + 1];
                const double dz = zi - pos[3 * j + 2];
                const double r2 = dx * dx + dy * dy + dz * dz;
                if (r2 >= cutoff_sq || r2 == 0.0) continue;
                const double r = std::sqrt(r2);
                // -dU/dr / r with U = sin(r)^2
                const double s = -std::sin(2.0 * r) / r * inv_mass;
                acc[3 * i] += s * dx;
                acc[3 * i + 1] += s * dy;
                acc[3 * i + 2] += s * dz;
                acc[3 * j] -= s * dx;
                acc[3 * j + 1] -= s * dy;
                acc[3 * j + 2] -= s * dz;
            }
        }
    }
};

}  // namespace

std::array<double, 3> pair_force(const std::array<double, 3>& delta) {
    const double r2 =
        delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2];
    if (r2 >= kCutoff * kCutoff || r2 == 0.0) return {0.0, 0.0, 0.0};
    const double r = std::sqrt(r2);
    const double s = -std::sin(2.0 * r) / r;
    return {s * delta[0], s * delta[1], s * delta[2]};
}

std::uint64_t run_simulation(const SimConfig& config,
                             const std::function<void(std::span<const double>)>& emit) {
    if (config.n_particles == 0) throw usage_error("mdsim: need at least one particle");
    if (config.mass <= 0.0 || config.time_step <= 0.0) {
        throw usage_error("mdsim: mass and time step must be positive");
    }
    if (config.subsample == 0) throw usage_error("mdsim: subsample must be >= 1");

    const std::uint32_t n = config.n_particles;
    std::vector<double> pos(3 * n), vel(3 * n, 0.0), acc(3 * n, 0.0), acc_new(3 * n, 0.0);

    std::mt19937_64 rng(config.seed);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (int d = 0; d < 3; ++d) {
            pos[3 * i + d] = canonical(rng) * config.box[static_cast<std::size_t>(d)];
        }
    }

    Forces forces;
    forces.accumulate(pos, acc, config.mass, n);

    const double h = config.time_step;
    const double half_h2 = 0.5 * h * h;
    std::uint64_t emitted = 0;

    const std::uint64_t total = config.equil_steps + config.run_steps;
    for (std::uint64_t step = 1; step <= total; ++step) {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            pos[i] += vel[i] * h + acc[i] * half_h2;
        }
        forces.accumulate(pos, acc_new, config.mass, n);
        for (std::size_t i = 0; i < vel.size(); ++i) {
            vel[i] += 0.5 * (acc[i] + acc_new[i]) * h;
        }
        std::swap(acc, acc_new);
        if (step > config.equil_steps) {
            const std::uint64_t run_step = step - config.equil_steps;
            if (run_step % config.subsample == 0) {
                emit(pos);
                ++emitted;
            }
        }
    }
    return emitted;
}

}  // namespace hrtc
