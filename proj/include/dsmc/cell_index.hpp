#pragma once

// Readdressing array LCR: for every cell, the particles currently inside it.
// Built by a stable two-pass counting sort; single-caller only.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsmc/geometry.hpp"
#include "dsmc/particle.hpp"

namespace dsmc {

// A particle outside the domain at indexing time signals a Motion bug.
struct indexing_error : std::logic_error {
    using std::logic_error::logic_error;
};

struct CellIndex {
    std::vector<std::uint32_t> starts;  // size total_cells()+1
    std::vector<std::uint32_t> perm;    // permutation of {0..N_p-1} grouped by cell

    std::uint32_t cell_begin(int cell) const { return starts[cell]; }
    std::uint32_t cell_end(int cell) const { return starts[cell + 1]; }
    std::uint32_t cell_count(int cell) const { return starts[cell + 1] - starts[cell]; }
};

inline CellIndex enumerate_and_index(const ParticleStore& store, const CellGrid& grid) {
    const std::size_t np = store.size();
    const int nc = grid.total_cells();

    std::vector<std::uint32_t> cell_of(np);
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(nc) + 1, 0);
    for (std::size_t i = 0; i < np; ++i) {
        const Position& r = store[i].position;
        if (!grid.contains(r))
            throw indexing_error("enumerate_and_index: particle " + std::to_string(i) +
                                 " outside domain at x=" + std::to_string(r[0]) +
                                 " y=" + std::to_string(r[1]));
        const int c = grid.cell_of(r);
        cell_of[i] = static_cast<std::uint32_t>(c);
        ++counts[static_cast<std::size_t>(c) + 1];
    }

    CellIndex index;
    index.starts.resize(static_cast<std::size_t>(nc) + 1);
    index.starts[0] = 0;
    for (int c = 0; c < nc; ++c) index.starts[c + 1] = index.starts[c] + counts[c + 1];

    index.perm.resize(np);
    std::vector<std::uint32_t> cursor(index.starts.begin(), index.starts.end() - 1);
    for (std::size_t i = 0; i < np; ++i)
        index.perm[cursor[cell_of[i]]++] = static_cast<std::uint32_t>(i);

    return index;
}

}  // namespace dsmc
