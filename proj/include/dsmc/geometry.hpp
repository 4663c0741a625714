#pragma once

// Cartesian cell grid over the computational domain. 1-D and 2-D only;
// velocities are always three-component.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsmc {

using Position = std::array<double, 2>;  // y unused in 1-D
using Velocity = std::array<double, 3>;

inline double dot(const Velocity& a, const Velocity& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double speed_squared(const Velocity& v) { return dot(v, v); }

struct CellGrid {
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> counts{1, 1};
    double cell_volume = 1.0;  // unit depth in the unresolved directions

    static CellGrid make_1d(double length_x, int nx) {
        if (!(length_x > 0.0) || nx < 1)
            throw std::invalid_argument("CellGrid: need length_x > 0 and nx >= 1");
        CellGrid g;
        g.dim = 1;
        g.extent = {length_x, 1.0};
        g.counts = {nx, 1};
        g.cell_volume = length_x / nx;
        return g;
    }

    static CellGrid make_2d(double length_x, double length_y, int nx, int ny) {
        if (!(length_x > 0.0) || !(length_y > 0.0) || nx < 1 || ny < 1)
            throw std::invalid_argument("CellGrid: need positive extents and counts");
        CellGrid g;
        g.dim = 2;
        g.extent = {length_x, length_y};
        g.counts = {nx, ny};
        g.cell_volume = (length_x / nx) * (length_y / ny);
        return g;
    }

    int total_cells() const { return counts[0] * counts[1]; }

    double cell_width(int axis) const { return extent[axis] / counts[axis]; }

    bool contains(const Position& r) const {
        if (r[0] < 0.0 || r[0] > extent[0]) return false;
        if (dim == 2 && (r[1] < 0.0 || r[1] > extent[1])) return false;
        return true;
    }

    // Half-open cell intervals: a position on an interior boundary belongs to
    // the higher-index cell. The closed top edge maps into the last cell.
    int cell_of(const Position& r) const {
        int ix = axis_index(r[0], 0);
        if (dim == 1) return ix;
        return ix + counts[0] * axis_index(r[1], 1);
    }

  private:
    int axis_index(double x, int axis) const {
        const int n = counts[axis];
        int i = static_cast<int>(x / extent[axis] * n);
        if (i >= n) i = n - 1;  // x == extent, or float rounding at the edge
        if (i < 0) i = 0;
        return i;
    }
};

}  // namespace dsmc
