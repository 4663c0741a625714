#pragma once

// Counter-based random number streams. Each unsteady run owns a root stream
// keyed by (master_seed, run_id); per-(cell, step) and per-(particle, step)
// sub-streams occupy disjoint counter blocks of the same keyed permutation,
// so any parallel schedule replays the sequential draw-for-draw.
//
// The generator is Philox2x64-10 (Salmon et al., SC 2011): a 128-bit counter
// and a 64-bit key run through ten multiply/xor rounds. Output word 0 of each
// invocation is used; one invocation per draw.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace dsmc {

namespace detail {

inline constexpr std::uint64_t kPhiloxMult = 0xD2B74407B1CE6E93ull;
inline constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ull;

inline std::uint64_t philox2x64(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
    for (int round = 0; round < 10; ++round) {
        const auto product = static_cast<unsigned __int128>(kPhiloxMult) * c0;
        const auto hi = static_cast<std::uint64_t>(product >> 64);
        const auto lo = static_cast<std::uint64_t>(product);
        c0 = hi ^ key ^ c1;
        c1 = lo;
        key += kPhiloxWeyl;
    }
    return c0;
}

// SplitMix64 finalizer; scatters run keys over the full 64-bit space.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Role of a sub-stream inside one run. Tags keep the counter blocks of the
// collision stage and the motion stage disjoint even when a cell id equals a
// particle slot.
enum class StreamDomain : std::uint64_t {
    Root = 0,
    CollisionCell = 1,
    MotionParticle = 2,
};

struct RngStream {
    std::uint64_t key = 0;    // identifies (master_seed, run_id)
    std::uint64_t block = 0;  // identifies (domain, id, step) inside the run
    std::uint64_t counter = 0;

    std::uint64_t next_u64() { return detail::philox2x64(key, counter++, block); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; two uniforms per draw.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
};

inline RngStream stream_for_run(std::uint64_t master_seed, std::uint32_t run_id) {
    RngStream s;
    s.key = detail::mix64(detail::mix64(master_seed) ^
                          (static_cast<std::uint64_t>(run_id) * 0xDA942042E4DD58B5ull));
    s.block = 0;
    return s;
}

// Sub-stream for (domain, id, step_index); disjoint from every sibling by
// construction: the tuple is packed into the second counter word.
inline RngStream substream(const RngStream& run_stream, StreamDomain domain,
                           std::uint32_t id, std::uint64_t step_index) {
    if (id >= (1u << 30))
        throw std::invalid_argument("substream: id exceeds 30-bit block field");
    if (step_index >= (1ull << 32))
        throw std::invalid_argument("substream: step_index exceeds 32-bit block field");
    RngStream s;
    s.key = run_stream.key;
    s.block = (static_cast<std::uint64_t>(domain) << 62) |
              (static_cast<std::uint64_t>(id) << 32) | step_index;
    return s;
}

// Collision-stage sub-stream for one cell at one time step.
inline RngStream substream(const RngStream& run_stream, std::uint32_t cell_id,
                           std::uint64_t step_index) {
    return substream(run_stream, StreamDomain::CollisionCell, cell_id, step_index);
}

inline double sample_uniform(RngStream& stream) { return stream.uniform(); }

// Velocity vector of a Maxwellian at temperature T (units of the reference
// temperature; most-probable speed at T=1 equals 1) shifted by a drift.
// Component standard deviation is sqrt(T/2).
inline std::array<double, 3> sample_maxwellian(RngStream& stream, double temperature,
                                               const std::array<double, 3>& drift = {0, 0, 0}) {
    if (!(temperature > 0.0))
        throw std::invalid_argument("sample_maxwellian: temperature must be positive");
    const double sigma = std::sqrt(0.5 * temperature);
    return {drift[0] + sigma * stream.normal(),
            drift[1] + sigma * stream.normal(),
            drift[2] + sigma * stream.normal()};
}

}  // namespace dsmc
