#pragma once

// Unsteady flow kernel. One time step is four stages:
//
//   1. Generation   - append inflow particles at open faces (worker 0)
//   2. Motion       - free flight with boundary interaction, slots [0, n_pre)
//   3. Readdressing - compact removals, rebuild the cell index (serial)
//   4. Cell stage   - majorant-frequency collisions per cell, plus the
//                     instantaneous sample when the step lands on a
//                     sampling instant
//
// Stages 1+2 form one parallel phase (worker 0 generates, everyone moves by
// stride), stage 4 another; both run through a PhaseExecutor. Generation and
// the serial stages draw from the run's root stream; motion and collisions
// draw from per-(slot, step) and per-(cell, step) sub-streams. That split is
// what makes every schedule replay the sequential arithmetic exactly.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "dsmc/accumulator.hpp"
#include "dsmc/cell_index.hpp"
#include "dsmc/clock.hpp"
#include "dsmc/geometry.hpp"
#include "dsmc/particle.hpp"
#include "dsmc/problem.hpp"
#include "dsmc/rng.hpp"

namespace dsmc {

enum class PhaseKind { Motion, CellStage };

// Seam between the step loop and a worker team. run_phase invokes
// body(worker, width) for every worker in [0, width); the serial executor is
// the degenerate width-1 team. sync_points() reports the synchronization
// events of the schedule: one join at the end of Motion, a release plus a
// join around the cell stage (the readdressing in between is serial), and
// one disband per run. The serial executor synchronizes nothing.
class PhaseExecutor {
  public:
    virtual ~PhaseExecutor() = default;
    virtual int width() const = 0;
    virtual void run_phase(PhaseKind kind, const std::function<void(int, int)>& body) = 0;
    virtual void end_run() {}
    virtual std::uint64_t sync_points() const { return 0; }
};

class SerialExecutor final : public PhaseExecutor {
  public:
    int width() const override { return 1; }
    void run_phase(PhaseKind, const std::function<void(int, int)>& body) override { body(0, 1); }
};

struct KernelState {
    ParticleStore store;
    std::vector<double> crmax;  // per-cell majorant relative speed
    RngStream root;             // serial-stage draws (fill, generation)
};

struct RunMeta {
    double wall_seconds = 0.0;
    double serial_seconds = 0.0;    // generation + readdressing
    double parallel_seconds = 0.0;  // motion + cell stage
    int team_width = 1;
    bool oversubscribed = false;
    std::uint64_t sync_points = 0;
};

struct RunResult {
    std::uint32_t run_id = 0;
    std::vector<Snapshot> snapshots;
    std::uint64_t collision_count = 0;
    std::vector<std::uint64_t> particle_count_history;  // population after each step
    RunMeta meta;
};

namespace detail {

inline void clamp_into_domain(Position& r, const CellGrid& g) {
    r[0] = std::clamp(r[0], 0.0, g.extent[0]);
    if (g.dim == 2) r[1] = std::clamp(r[1], 0.0, g.extent[1]);
}

// Half-space re-emission from a wall at rest: Rayleigh normal speed,
// Gaussian tangentials. `inward` is the sign of the gas side along `axis`.
inline void diffuse_emit(Velocity& v, double temperature, int axis, double inward,
                         RngStream& rng) {
    const double vmp = std::sqrt(temperature);
    const double sigma = std::sqrt(0.5 * temperature);
    v[axis] = inward * vmp * std::sqrt(-std::log1p(-rng.uniform()));
    for (int a = 0; a < 3; ++a)
        if (a != axis) v[a] = sigma * rng.normal();
}

struct SurfaceHit {
    double t = 0.0;
    int axis = 0;
    bool low_side = false;  // low-coordinate face of the wall or body
    bool body = false;
};

// Earliest boundary event within `horizon`, or false. Domain walls accept
// t = 0 hits (a collision can point a wall-sitting particle back outside);
// the body requires inbound normal velocity so a particle on its surface
// moving away is not re-captured.
inline bool first_hit(const Particle& p, const FlowProblem& prob, double horizon,
                      SurfaceHit& hit) {
    bool found = false;
    auto consider = [&](double t, int axis, bool low, bool body) {
        if (t < 0.0 || t > horizon) return;
        if (!found || t < hit.t) {
            hit = {t, axis, low, body};
            found = true;
        }
    };

    const CellGrid& g = prob.grid;
    for (int a = 0; a < g.dim; ++a) {
        const double v = p.velocity[a];
        if (v < 0.0) consider((0.0 - p.position[a]) / v, a, true, false);
        if (v > 0.0) consider((g.extent[a] - p.position[a]) / v, a, false, false);
    }

    if (prob.body && g.dim == 2) {
        const BodySpec& b = *prob.body;
        double t_near = -std::numeric_limits<double>::infinity();
        double t_far = std::numeric_limits<double>::infinity();
        int near_axis = -1;
        bool inside_slabs = true;
        for (int a = 0; a < 2; ++a) {
            const double v = p.velocity[a];
            if (v == 0.0) {
                if (p.position[a] < b.lo[a] || p.position[a] > b.hi[a]) inside_slabs = false;
                continue;
            }
            double t1 = (b.lo[a] - p.position[a]) / v;
            double t2 = (b.hi[a] - p.position[a]) / v;
            if (t1 > t2) std::swap(t1, t2);
            if (t1 > t_near) {
                t_near = t1;
                near_axis = a;
            }
            t_far = std::min(t_far, t2);
        }
        if (inside_slabs && near_axis >= 0 && t_near < t_far && t_near >= 0.0) {
            const bool low = p.velocity[near_axis] > 0.0;  // entering through lo face
            const double vn = p.velocity[near_axis];
            const bool inbound = low ? vn > 0.0 : vn < 0.0;
            if (inbound) consider(t_near, near_axis, low, true);
        }
    }
    return found;
}

// Straight-line flight with wall and body interactions for `time_left`.
// Returns false when the particle leaves through an open face. Draws (for
// diffuse re-emission) come from `rng` in event order.
inline bool advance_with_boundaries(Particle& p, const FlowProblem& prob, double time_left,
                                    RngStream& rng) {
    double remaining = time_left;
    int guard = 0;
    while (remaining > 0.0) {
        SurfaceHit hit;
        if (!first_hit(p, prob, remaining, hit)) {
            p.position[0] += p.velocity[0] * remaining;
            if (prob.grid.dim == 2) p.position[1] += p.velocity[1] * remaining;
            clamp_into_domain(p.position, prob.grid);
            return true;
        }
        p.position[0] += p.velocity[0] * hit.t;
        if (prob.grid.dim == 2) p.position[1] += p.velocity[1] * hit.t;
        if (hit.body) {
            p.position[hit.axis] = hit.low_side ? prob.body->lo[hit.axis]
                                                : prob.body->hi[hit.axis];
        } else {
            p.position[hit.axis] = hit.low_side ? 0.0 : prob.grid.extent[hit.axis];
        }
        clamp_into_domain(p.position, prob.grid);
        remaining -= hit.t;

        if (hit.body) {
            // Gas side of a body face: below a low face, above a high face.
            const double inward = hit.low_side ? -1.0 : 1.0;
            if (prob.body->kind == SurfaceKind::Specular) {
                p.velocity[hit.axis] = -p.velocity[hit.axis];
            } else {
                diffuse_emit(p.velocity, prob.body->temperature, hit.axis, inward, rng);
            }
        } else {
            const auto face = static_cast<std::size_t>(2 * hit.axis + (hit.low_side ? 0 : 1));
            const SurfaceSpec& s = prob.surfaces[face];
            switch (s.kind) {
                case SurfaceKind::Vacuum:
                    return false;
                case SurfaceKind::Specular:
                    p.velocity[hit.axis] = -p.velocity[hit.axis];
                    break;
                case SurfaceKind::Diffuse:
                    diffuse_emit(p.velocity, s.temperature, hit.axis,
                                 hit.low_side ? 1.0 : -1.0, rng);
                    break;
            }
        }
        if (++guard > 1024) break;  // cornered by rounding; drop the remainder
    }
    return true;
}

// Inbound normal speed of a drifting Maxwellian flux: density of w > 0 is
// proportional to w exp(-(w/vmp - s)^2). Acceptance-rejection with a flat
// proposal over the shifted variable; the s = 0 case inverts the Rayleigh
// CDF directly.
inline double sample_flux_normal_speed(double temperature, double drift_normal,
                                       RngStream& rng) {
    const double vmp = std::sqrt(temperature);
    const double s = drift_normal / vmp;
    if (std::abs(s) < 1e-12) return vmp * std::sqrt(-std::log1p(-rng.uniform()));
    const double zstar = 0.5 * (-s + std::sqrt(s * s + 2.0));
    const double peak = zstar + s;
    for (;;) {
        const double z = -4.0 + 8.0 * rng.uniform();
        const double q = z + s;
        if (q <= 0.0) continue;
        if (rng.uniform() < q / peak * std::exp(zstar * zstar - z * z)) return vmp * q;
    }
}

}  // namespace detail

// Populate the domain from the initial fill (run setup; serial). Particles
// landing strictly inside the body are re-drawn; the target count already
// excludes the body overlap.
inline std::size_t initial_fill_particles(KernelState& st, const FlowProblem& prob) {
    const InitialFill& fill = prob.initial_fill;
    if (!(fill.density > 0.0)) return 0;
    const CellGrid& g = prob.grid;

    Position lo{0.0, 0.0};
    Position hi{g.extent[0], g.dim == 2 ? g.extent[1] : 0.0};
    if (fill.region) {
        for (int a = 0; a < g.dim; ++a) {
            lo[a] = std::max(lo[a], (*fill.region)[0][a]);
            hi[a] = std::min(hi[a], (*fill.region)[1][a]);
        }
    }
    double volume = std::max(0.0, hi[0] - lo[0]);
    if (g.dim == 2) volume *= std::max(0.0, hi[1] - lo[1]);
    if (prob.body && g.dim == 2) {
        const double ox = std::max(0.0, std::min(hi[0], prob.body->hi[0]) -
                                            std::max(lo[0], prob.body->lo[0]));
        const double oy = std::max(0.0, std::min(hi[1], prob.body->hi[1]) -
                                            std::max(lo[1], prob.body->lo[1]));
        volume -= ox * oy;
    }

    const double target = fill.density * volume / prob.particle_weight;
    auto count = static_cast<std::uint64_t>(std::floor(target));
    if (st.root.uniform() < target - static_cast<double>(count)) ++count;

    auto inside_body = [&](const Position& r) {
        return prob.body && g.dim == 2 && r[0] > prob.body->lo[0] && r[0] < prob.body->hi[0] &&
               r[1] > prob.body->lo[1] && r[1] < prob.body->hi[1];
    };

    st.store.reserve(st.store.size() + count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Particle p;
        do {
            p.position[0] = lo[0] + (hi[0] - lo[0]) * st.root.uniform();
            p.position[1] = g.dim == 2 ? lo[1] + (hi[1] - lo[1]) * st.root.uniform() : 0.0;
        } while (inside_body(p.position));
        p.velocity = sample_maxwellian(st.root, fill.temperature, fill.drift);
        st.store.append(p);
    }
    return count;
}

// Stage 1. Appends flux-weighted inflow particles, each advanced by a
// uniform fraction of the step from its face. Returns the number appended
// and still in the domain after the partial advance.
inline std::size_t generate_particles(KernelState& st, const FlowProblem& prob,
                                      std::uint64_t /*step*/) {
    std::size_t alive = 0;
    for (const auto& in : prob.inflows) {
        const double rate = prob.inflow_rate_per_step(in);
        auto count = static_cast<std::uint64_t>(std::floor(rate));
        if (st.root.uniform() < rate - static_cast<double>(count)) ++count;

        const int axis = face_axis(in.face);
        const int tang = 1 - axis;  // the other position axis (2-D)
        const double inward = face_inward_sign(in.face);
        const double sigma = std::sqrt(0.5 * in.temperature);

        for (std::uint64_t k = 0; k < count; ++k) {
            Particle p;
            const double u_drift = in.drift[axis] * inward;
            const double w = detail::sample_flux_normal_speed(in.temperature, u_drift, st.root);
            p.velocity[axis] = inward * w;
            for (int a = 0; a < 3; ++a)
                if (a != axis) p.velocity[a] = in.drift[a] + sigma * st.root.normal();

            p.position[axis] = face_is_low_side(in.face) ? 0.0 : prob.grid.extent[axis];
            if (prob.grid.dim == 2)
                p.position[tang] = prob.grid.extent[tang] * st.root.uniform();

            const double fraction = st.root.uniform();
            const std::size_t slot = st.store.size();
            st.store.append(p);
            if (detail::advance_with_boundaries(st.store[slot], prob,
                                                fraction * prob.clock.dt, st.root))
                ++alive;
            else
                st.store.mark_removed(slot);
        }
    }
    return alive;
}

// Stage 2. Moves slots [0, n_pre) by stride across the team; slots appended
// by stage 1 this step were already advanced at insertion.
inline void move_particles(KernelState& st, const FlowProblem& prob, std::uint64_t step,
                           std::size_t n_pre, PhaseExecutor& exec) {
    exec.run_phase(PhaseKind::Motion, [&](int worker, int width) {
        for (std::size_t i = static_cast<std::size_t>(worker); i < n_pre;
             i += static_cast<std::size_t>(width)) {
            RngStream rng = substream(st.root, StreamDomain::MotionParticle,
                                      static_cast<std::uint32_t>(i), step);
            if (!detail::advance_with_boundaries(st.store[i], prob, prob.clock.dt, rng))
                st.store.mark_removed(i);
        }
    });
}

// Stage 3 (serial): compaction then the cell index rebuild.
inline CellIndex readdress_particles(KernelState& st, const FlowProblem& prob) {
    st.store.compact();
    return enumerate_and_index(st.store, prob.grid);
}

// Majorant-frequency collisions inside one cell; draws come from the cell's
// (cell, step) sub-stream, so the containing schedule is irrelevant.
inline std::uint64_t collide_one_cell(KernelState& st, const FlowProblem& prob,
                                      const CellIndex& idx, int cell, std::uint64_t step) {
    const std::uint32_t n = idx.cell_count(cell);
    if (!prob.collision.enabled || n < 2) return 0;

    RngStream rng = substream(st.root, static_cast<std::uint32_t>(cell), step);
    double& crmax = st.crmax[static_cast<std::size_t>(cell)];
    const double d = prob.collision.diameter;
    const double coeff = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0) *
                         prob.particle_weight * M_PI * d * d * prob.clock.dt /
                         prob.grid.cell_volume;

    const double target = coeff * crmax;
    auto candidates = static_cast<std::uint64_t>(std::floor(target));
    if (rng.uniform() < target - static_cast<double>(candidates)) ++candidates;

    const std::uint32_t begin = idx.cell_begin(cell);
    std::uint64_t accepted = 0;
    for (std::uint64_t c = 0; c < candidates; ++c) {
        auto i = static_cast<std::uint32_t>(rng.uniform() * n);
        if (i >= n) i = n - 1;
        auto j = static_cast<std::uint32_t>(rng.uniform() * (n - 1));
        if (j >= n - 1) j = n - 2;
        if (j >= i) ++j;

        Particle& a = st.store[idx.perm[begin + i]];
        Particle& b = st.store[idx.perm[begin + j]];
        Velocity rel{a.velocity[0] - b.velocity[0], a.velocity[1] - b.velocity[1],
                     a.velocity[2] - b.velocity[2]};
        const double cr = std::sqrt(speed_squared(rel));
        if (cr > crmax) crmax = cr;  // adapt the majorant as soon as it is exceeded
        if (rng.uniform() * crmax >= cr) continue;

        ++accepted;
        const double cth = 2.0 * rng.uniform() - 1.0;
        const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
        const double phi = 2.0 * M_PI * rng.uniform();
        const Velocity post{cr * sth * std::cos(phi), cr * sth * std::sin(phi), cr * cth};
        for (int k = 0; k < 3; ++k) {
            const double vcm = 0.5 * (a.velocity[k] + b.velocity[k]);
            a.velocity[k] = vcm + 0.5 * post[k];
            b.velocity[k] = vcm - 0.5 * post[k];
        }
    }
    return accepted;
}

// Stage 4 collision half, exposed for tests; the run loop fuses it with
// sampling into a single parallel phase.
inline std::uint64_t collide_cells(KernelState& st, const FlowProblem& prob,
                                   const CellIndex& idx, std::uint64_t step,
                                   PhaseExecutor& exec) {
    std::atomic<std::uint64_t> total{0};
    const int nc = prob.grid.total_cells();
    exec.run_phase(PhaseKind::CellStage, [&](int worker, int width) {
        std::uint64_t local = 0;
        for (int cell = worker; cell < nc; cell += width)
            local += collide_one_cell(st, prob, idx, cell, step);
        total.fetch_add(local, std::memory_order_relaxed);
    });
    return total.load();
}

inline void sample_cell(const KernelState& st, const CellIndex& idx, int cell,
                        CellAccumulator& acc) {
    acc.sample_count += 1;
    for (std::uint32_t k = idx.cell_begin(cell); k < idx.cell_end(cell); ++k) {
        const Velocity& v = st.store[idx.perm[k]].velocity;
        acc.sum_n += 1.0;
        acc.sum_v[0] += v[0];
        acc.sum_v[1] += v[1];
        acc.sum_v[2] += v[2];
        acc.sum_v2 += speed_squared(v);
    }
}

// Instantaneous state of every cell (serial helper for tests and tools).
inline Snapshot take_snapshot(const KernelState& st, const CellGrid& grid,
                              const CellIndex& idx, double t) {
    Snapshot snap;
    snap.t = t;
    snap.cells.resize(static_cast<std::size_t>(grid.total_cells()));
    for (int c = 0; c < grid.total_cells(); ++c)
        sample_cell(st, idx, c, snap.cells[static_cast<std::size_t>(c)]);
    return snap;
}

// One unsteady run. Stage order, draw order and all sub-stream derivations
// are fixed here; the executor only changes which worker touches which slot
// or cell, never the arithmetic.
inline RunResult run_unsteady(const FlowProblem& prob, std::uint64_t master_seed,
                              std::uint32_t run_id, PhaseExecutor& exec) {
    prob.validate();  // throws on an inconsistent setup; warnings are the CLI's job

    using clock_t = std::chrono::steady_clock;
    const auto wall_start = clock_t::now();
    auto seconds_since = [](clock_t::time_point t0) {
        return std::chrono::duration<double>(clock_t::now() - t0).count();
    };

    RunResult out;
    out.run_id = run_id;

    KernelState st;
    st.root = stream_for_run(master_seed, run_id);
    st.crmax.assign(static_cast<std::size_t>(prob.grid.total_cells()),
                    prob.collision.crmax_initial);
    initial_fill_particles(st, prob);

    const std::int64_t steps = prob.clock.total_steps();
    const std::int64_t per_sample = prob.clock.steps_per_sample();
    out.snapshots.resize(static_cast<std::size_t>(prob.clock.snapshot_count()));
    for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
        out.snapshots[k].t = static_cast<double>(k + 2) * prob.clock.dt_s;
        out.snapshots[k].cells.resize(static_cast<std::size_t>(prob.grid.total_cells()));
    }
    out.particle_count_history.reserve(static_cast<std::size_t>(steps));

    // Hard per-step bound on generation: floor(rate) + 1 per inflow. The
    // store is grown to it up front so worker 0's appends during the fused
    // stage 1+2 phase cannot reallocate under the moving workers.
    std::size_t generation_bound = 0;
    for (const auto& in : prob.inflows)
        generation_bound +=
            static_cast<std::size_t>(std::floor(prob.inflow_rate_per_step(in))) + 1;

    const int nc = prob.grid.total_cells();
    for (std::int64_t step = 1; step <= steps; ++step) {
        auto t0 = clock_t::now();
        const std::size_t n_pre = st.store.size();
        st.store.reserve(n_pre + generation_bound);
        exec.run_phase(PhaseKind::Motion, [&](int worker, int width) {
            if (worker == 0)
                generate_particles(st, prob, static_cast<std::uint64_t>(step));
            for (std::size_t i = static_cast<std::size_t>(worker); i < n_pre;
                 i += static_cast<std::size_t>(width)) {
                RngStream rng = substream(st.root, StreamDomain::MotionParticle,
                                          static_cast<std::uint32_t>(i),
                                          static_cast<std::uint64_t>(step));
                if (!detail::advance_with_boundaries(st.store[i], prob, prob.clock.dt, rng))
                    st.store.mark_removed(i);
            }
        });
        out.meta.parallel_seconds += seconds_since(t0);

        t0 = clock_t::now();
        const CellIndex idx = readdress_particles(st, prob);
        out.meta.serial_seconds += seconds_since(t0);

        Snapshot* snap = prob.clock.is_sampling_step(step)
                             ? &out.snapshots[static_cast<std::size_t>(step / per_sample - 2)]
                             : nullptr;
        t0 = clock_t::now();
        std::atomic<std::uint64_t> step_collisions{0};
        exec.run_phase(PhaseKind::CellStage, [&](int worker, int width) {
            std::uint64_t local = 0;
            for (int cell = worker; cell < nc; cell += width) {
                local += collide_one_cell(st, prob, idx, cell,
                                          static_cast<std::uint64_t>(step));
                if (snap) sample_cell(st, idx, cell, snap->cells[static_cast<std::size_t>(cell)]);
            }
            step_collisions.fetch_add(local, std::memory_order_relaxed);
        });
        out.meta.parallel_seconds += seconds_since(t0);

        out.collision_count += step_collisions.load();
        out.particle_count_history.push_back(st.store.size());
    }

    exec.end_run();
    out.meta.sync_points = exec.sync_points();
    out.meta.team_width = exec.width();
    out.meta.wall_seconds = seconds_since(wall_start);
    return out;
}

inline RunResult run_unsteady(const FlowProblem& prob, std::uint64_t master_seed,
                              std::uint32_t run_id) {
    SerialExecutor serial;
    return run_unsteady(prob, master_seed, run_id, serial);
}

}  // namespace dsmc
