#pragma once

// Flow problem description: domain boundaries, inflows, the internal body,
// collision parameters and the initial fill. Units are nondimensional with
// unit particle mass and unit most-probable speed at reference temperature,
// so the per-component thermal sigma is sqrt(T/2) and vmp(T) = sqrt(T).

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsmc/clock.hpp"
#include "dsmc/geometry.hpp"

namespace dsmc {

enum class Face : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

enum class SurfaceKind {
    Vacuum,    // crossing particles leave the domain
    Specular,  // mirror reflection
    Diffuse,   // re-emission from a wall Maxwellian at the wall temperature
};

struct SurfaceSpec {
    SurfaceKind kind = SurfaceKind::Specular;
    double temperature = 1.0;  // used by diffuse walls only
};

// Free-stream reservoir attached to one face. Particles are generated at the
// face each step according to the effusive flux of the reservoir Maxwellian.
struct InflowSpec {
    Face face = Face::Left;
    double density = 1.0;
    double temperature = 1.0;
    Velocity drift{0.0, 0.0, 0.0};
};

struct CollisionParams {
    bool enabled = true;
    double diameter = 1.0;       // hard-sphere diameter
    double crmax_initial = 1.0;  // starting majorant relative speed per cell
};

struct InitialFill {
    double density = 0.0;  // zero disables the fill
    double temperature = 1.0;
    Velocity drift{0.0, 0.0, 0.0};
    // Fill region as [lo, hi] per axis; an empty optional means the whole
    // domain. Only the x bounds apply in 1-D.
    std::optional<std::array<Position, 2>> region;
};

// Axis-aligned internal body (2-D only) with a solid-wall condition.
struct BodySpec {
    Position lo{0.0, 0.0};
    Position hi{0.0, 0.0};
    SurfaceKind kind = SurfaceKind::Diffuse;  // Vacuum is not meaningful here
    double temperature = 1.0;
};

// One-sided effusive number flux per unit area through a plane, for a
// Maxwellian at number density n and temperature T with drift velocity
// component u along the inward normal:
//
//   phi = n * vmp / (2 sqrt(pi)) * [exp(-s^2) + sqrt(pi) s (1 + erf s)],
//   s = u / vmp,  vmp = sqrt(T).
inline double inflow_flux(double density, double temperature, double drift_normal) {
    if (!(density >= 0.0)) throw std::invalid_argument("inflow_flux: density must be >= 0");
    if (!(temperature > 0.0)) throw std::invalid_argument("inflow_flux: temperature must be > 0");
    const double vmp = std::sqrt(temperature);
    const double s = drift_normal / vmp;
    const double bracket = std::exp(-s * s) + std::sqrt(M_PI) * s * (1.0 + std::erf(s));
    return density * vmp / (2.0 * std::sqrt(M_PI)) * bracket;
}

inline int face_axis(Face f) { return (f == Face::Left || f == Face::Right) ? 0 : 1; }

inline bool face_is_low_side(Face f) { return f == Face::Left || f == Face::Bottom; }

// Sign of the inward normal along the face axis.
inline double face_inward_sign(Face f) { return face_is_low_side(f) ? 1.0 : -1.0; }

struct FlowProblem {
    CellGrid grid;
    SimulationClock clock;
    double particle_weight = 1.0;  // real molecules per simulator particle
    std::array<SurfaceSpec, 4> surfaces{};
    std::vector<InflowSpec> inflows;
    CollisionParams collision;
    InitialFill initial_fill;
    std::optional<BodySpec> body;

    // Area of a boundary face (unit depth in the unresolved directions).
    double face_area(Face f) const {
        if (grid.dim == 1) return 1.0;
        return face_axis(f) == 0 ? grid.extent[1] : grid.extent[0];
    }

    // Expected number of simulator particles entering per step through f.
    double inflow_rate_per_step(const InflowSpec& in) const {
        const double u = in.drift[face_axis(in.face)] * face_inward_sign(in.face);
        const double phi = inflow_flux(in.density, in.temperature, u);
        return phi * face_area(in.face) * clock.dt / particle_weight;
    }

    std::vector<std::string> validate() const {
        std::vector<std::string> warnings = clock.validate();
        if (!(particle_weight > 0.0))
            throw std::invalid_argument("problem: particle_weight must be positive");
        for (const auto& in : inflows) {
            if (grid.dim == 1 && face_axis(in.face) != 0)
                throw std::invalid_argument("problem: 1-D inflow must use the left or right face");
            if (!(in.density > 0.0))
                throw std::invalid_argument("problem: inflow density must be positive");
            if (!(in.temperature > 0.0))
                throw std::invalid_argument("problem: inflow temperature must be positive");
        }
        const int nfaces = grid.dim == 1 ? 2 : 4;
        for (int i = 0; i < nfaces; ++i) {
            const auto& s = surfaces[static_cast<std::size_t>(i)];
            if (s.kind == SurfaceKind::Diffuse && !(s.temperature > 0.0))
                throw std::invalid_argument("problem: diffuse wall temperature must be positive");
        }
        if (collision.enabled) {
            if (!(collision.diameter > 0.0))
                throw std::invalid_argument("problem: collision diameter must be positive");
            if (!(collision.crmax_initial > 0.0))
                throw std::invalid_argument("problem: crmax_initial must be positive");
        }
        if (initial_fill.density < 0.0)
            throw std::invalid_argument("problem: initial fill density must be >= 0");
        if (initial_fill.density > 0.0 && !(initial_fill.temperature > 0.0))
            throw std::invalid_argument("problem: initial fill temperature must be positive");
        if (initial_fill.region) {
            const auto& r = *initial_fill.region;
            for (int a = 0; a < grid.dim; ++a) {
                if (!(r[0][static_cast<std::size_t>(a)] <= r[1][static_cast<std::size_t>(a)]))
                    throw std::invalid_argument("problem: initial fill region is inverted");
            }
        }
        if (body) {
            if (grid.dim != 2)
                throw std::invalid_argument("problem: internal body requires a 2-D grid");
            if (body->kind == SurfaceKind::Vacuum)
                throw std::invalid_argument("problem: internal body cannot be a vacuum boundary");
            if (!(body->lo[0] < body->hi[0] && body->lo[1] < body->hi[1]))
                throw std::invalid_argument("problem: internal body box is degenerate");
            if (!(body->lo[0] > 0.0 && body->lo[1] > 0.0 && body->hi[0] < grid.extent[0] &&
                  body->hi[1] < grid.extent[1]))
                throw std::invalid_argument("problem: internal body must lie strictly inside the domain");
            if (body->kind == SurfaceKind::Diffuse && !(body->temperature > 0.0))
                throw std::invalid_argument("problem: body temperature must be positive");
        }
        for (const auto& in : inflows) {
            const auto& s = surfaces[static_cast<std::size_t>(in.face)];
            if (s.kind != SurfaceKind::Vacuum)
                warnings.push_back("problem: inflow face is not an open (vacuum) boundary");
        }
        return warnings;
    }
};

}  // namespace dsmc
