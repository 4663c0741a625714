#pragma once

// Array C: per-cell sample sums and the macroparameters derived from them.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dsmc/geometry.hpp"

namespace dsmc {

struct CellAccumulator {
    std::int64_t sample_count = 0;
    double sum_n = 0.0;                   // particle count summed over samples
    std::array<double, 3> sum_v{0, 0, 0};  // velocity component sums
    double sum_v2 = 0.0;                  // squared-speed sum

    void merge(const CellAccumulator& other) {
        sample_count += other.sample_count;
        sum_n += other.sum_n;
        sum_v[0] += other.sum_v[0];
        sum_v[1] += other.sum_v[1];
        sum_v[2] += other.sum_v[2];
        sum_v2 += other.sum_v2;
    }

    bool operator==(const CellAccumulator&) const = default;
};

struct Macroparameters {
    double density = 0.0;
    Velocity bulk{0, 0, 0};
    double temperature = 0.0;
};

// Density uses the particle weight and the cell volume; bulk velocity and
// temperature are particle-weighted over all samples. Cells never sampled
// yield no report; cells sampled but always empty report zero density and
// NaN velocity/temperature.
inline Macroparameters derive_macroparameters(const CellAccumulator& acc, double weight,
                                              double cell_volume) {
    if (acc.sample_count <= 0)
        throw std::invalid_argument("derive_macroparameters: no samples accumulated");
    Macroparameters m;
    m.density = weight * acc.sum_n / (static_cast<double>(acc.sample_count) * cell_volume);
    if (acc.sum_n > 0.0) {
        m.bulk = {acc.sum_v[0] / acc.sum_n, acc.sum_v[1] / acc.sum_n, acc.sum_v[2] / acc.sum_n};
        // T = (2/3)(<v^2> - |vbar|^2) in units where the most probable speed
        // at the reference temperature is 1 (kT/m = T/2).
        m.temperature = (2.0 / 3.0) * (acc.sum_v2 / acc.sum_n - speed_squared(m.bulk));
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        m.bulk = {nan, nan, nan};
        m.temperature = nan;
    }
    return m;
}

struct Snapshot {
    double t = 0.0;
    std::vector<CellAccumulator> cells;

    bool operator==(const Snapshot&) const = default;
};

}  // namespace dsmc
