#pragma once

// Simulation clock: time step, sampling interval, run length, averaging
// interval. Ratio constraints are validated up front so the run loop can use
// integer step counts throughout.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsmc {

struct SimulationClock {
    double dt = 0.0;
    double dt_s = 0.0;
    double dt_L = 0.0;
    double dt_av = 0.0;
    double t_H = 0.0;  // characteristic flow-variation time; 0 = not supplied

    // Ratio of the averaging-interval warnings; the separation conditions are
    // problem-dependent, so violations warn instead of failing.
    static constexpr double kSeparationFactor = 10.0;

    std::int64_t steps_per_sample() const { return ratio(dt_s, dt); }
    std::int64_t total_steps() const { return ratio(dt_s, dt) * ratio(dt_L, dt_s); }
    std::int64_t total_samples() const { return ratio(dt_L, dt_s); }

    // Sampling instants are t = k*dt_s with t > dt_s, i.e. k = 2..total_samples.
    std::int64_t snapshot_count() const {
        const std::int64_t k = total_samples();
        return k > 1 ? k - 1 : 0;
    }

    bool is_sampling_step(std::int64_t step_index) const {
        const std::int64_t sps = steps_per_sample();
        return step_index % sps == 0 && step_index > sps;
    }

    std::vector<std::string> validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("clock: dt must be positive");
        if (!(dt <= dt_s)) throw std::invalid_argument("clock: need dt <= dt_s");
        if (!(dt_s <= dt_L)) throw std::invalid_argument("clock: need dt_s <= dt_L");
        if (!is_multiple(dt_s, dt))
            throw std::invalid_argument("clock: dt_s must be an integer multiple of dt");
        if (!is_multiple(dt_L, dt_s))
            throw std::invalid_argument("clock: dt_L must be an integer multiple of dt_s");
        if (!(dt_av >= dt)) throw std::invalid_argument("clock: need dt_av >= dt");

        std::vector<std::string> warnings;
        if (dt_av < kSeparationFactor * dt)
            warnings.push_back("clock: dt_av < " + std::to_string(kSeparationFactor) +
                               "*dt; averaging interval not well separated from the time step");
        if (t_H > 0.0 && dt_av > t_H / kSeparationFactor)
            warnings.push_back("clock: dt_av > t_H/" + std::to_string(kSeparationFactor) +
                               "; averaging interval not small against the flow variation time");
        return warnings;
    }

  private:
    static bool is_multiple(double big, double small) {
        const double r = big / small;
        const double k = std::round(r);
        return k >= 1.0 && std::abs(r - k) <= 1e-9 * r;
    }

    static std::int64_t ratio(double big, double small) {
        return static_cast<std::int64_t>(std::llround(big / small));
    }
};

}  // namespace dsmc
