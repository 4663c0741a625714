#pragma once

// Particle array P. Removal marks a flag; compaction swaps with the tail so
// the per-step index rebuild absorbs the reordering.

#include <cstdint>
#include <vector>

#include "dsmc/geometry.hpp"

namespace dsmc {

struct Particle {
    Position position{0.0, 0.0};
    Velocity velocity{0.0, 0.0, 0.0};
};

class ParticleStore {
  public:
    std::size_t size() const { return particles_.size(); }
    bool empty() const { return particles_.empty(); }

    Particle& operator[](std::size_t i) { return particles_[i]; }
    const Particle& operator[](std::size_t i) const { return particles_[i]; }

    void append(const Particle& p) {
        particles_.push_back(p);
        removed_.push_back(0);
    }

    void reserve(std::size_t n) {
        particles_.reserve(n);
        removed_.reserve(n);
    }

    void mark_removed(std::size_t i) { removed_[i] = 1; }
    bool is_removed(std::size_t i) const { return removed_[i] != 0; }

    // Swap-with-last compaction of all marked particles; returns the count.
    std::size_t compact() {
        std::size_t n = particles_.size();
        std::size_t i = 0;
        std::size_t removed = 0;
        while (i < n) {
            if (removed_[i]) {
                --n;
                particles_[i] = particles_[n];
                removed_[i] = removed_[n];
                ++removed;
            } else {
                ++i;
            }
        }
        particles_.resize(n);
        removed_.resize(n);
        return removed;
    }

    void clear() {
        particles_.clear();
        removed_.clear();
    }

    const std::vector<Particle>& items() const { return particles_; }

  private:
    std::vector<Particle> particles_;
    std::vector<std::uint8_t> removed_;
};

}  // namespace dsmc
