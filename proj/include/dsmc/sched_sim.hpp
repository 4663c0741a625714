#pragma once

// Discrete-event model of leader/helper scheduling over abstract two-phase
// run profiles. Leaders execute sequential phases alone, borrow helpers from
// a shared pool for parallel phases (first-come-first-served, partial,
// non-blocking grants), and release them at phase end. Parallel work W
// served by k workers takes W/k. The point of the simulator is to expose the
// contention the closed-form speedup laws assume away: with grants always
// satisfiable it reproduces them exactly, and past the over-allocation
// threshold it shows the load-imbalance decline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <stdexcept>
#include <vector>

#include "dsmc/heap_policy.hpp"
#include "dsmc/perf_model.hpp"
#include "dsmc/rng.hpp"

namespace dsmc {

struct PhasePair {
    double seq = 0.0;  // leader-only duration
    double par = 0.0;  // divisible work
};

struct RunProfile {
    std::vector<PhasePair> phases;  // every run executes the same sequence
    int n = 1;                      // independent runs
    int p1 = 1;                     // leaders
    int p = 1;                      // total workers (helpers = p - p1)
    double pri = 0.0;               // over-allocation parameter
    double stagger = 0.0;           // max random initial offset per leader
    std::uint64_t seed = 0;         // offsets are drawn from this

    double run_total() const {
        double t = 0.0;
        for (const auto& ph : phases) {
            t += ph.seq;
            t += ph.par;
        }
        return t;
    }

    double beta() const {
        double s = 0.0, w = 0.0;
        for (const auto& ph : phases) {
            s += ph.seq;
            w += ph.par;
        }
        return s / (s + w);
    }

    void validate() const {
        if (phases.empty()) throw std::invalid_argument("profile: no phases");
        for (const auto& ph : phases)
            if (!(ph.seq >= 0.0) || !(ph.par >= 0.0))
                throw std::invalid_argument("profile: negative phase duration");
        if (!(run_total() > 0.0)) throw std::invalid_argument("profile: zero-length run");
        if (n < 1) throw std::invalid_argument("profile: n must be >= 1");
        if (p1 < 1) throw std::invalid_argument("profile: p1 must be >= 1");
        if (p < p1) throw std::invalid_argument("profile: p must be >= p1");
        if (!(pri >= 0.0)) throw std::invalid_argument("profile: pri must be >= 0");
        if (!(stagger >= 0.0)) throw std::invalid_argument("profile: stagger must be >= 0");
    }
};

// Equal-size phase pairs realizing a given sequential fraction.
inline std::vector<PhasePair> make_uniform_profile(double beta, int pairs, double length) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
    if (pairs < 1 || !(length > 0.0)) throw std::invalid_argument("need pairs >= 1, length > 0");
    std::vector<PhasePair> out(static_cast<std::size_t>(pairs));
    for (auto& ph : out) {
        ph.seq = beta * length / pairs;
        ph.par = (1.0 - beta) * length / pairs;
    }
    return out;
}

struct PhaseInterval {
    double t0 = 0.0;
    double t1 = 0.0;
    bool parallel = false;
    int width = 1;
};

struct HeapEvent {
    double time = 0.0;
    int available = 0;
    int outstanding = 0;
};

struct SimOutcome {
    double makespan = 0.0;
    double busy_time = 0.0;              // total work served; equals the profile's by construction
    double speedup_vs_one_worker = 0.0;  // n * run_total / makespan
    double second_level_speedup = 0.0;   // zero-helper makespan / makespan, same offsets
    std::vector<std::vector<PhaseInterval>> timelines;  // indexed by run id
    std::vector<HeapEvent> heap_trace;
    std::vector<AllocationRecord> alloc_log;
};

namespace detail_sim {

// Grant source for one simulation pass: the live policy, a forced-zero
// baseline, or a recorded log replayed size-for-size.
struct GrantPlan {
    bool zero = false;
    std::vector<std::deque<int>> replay;  // per leader; empty => live policy
};

struct RawOutcome {
    double makespan = 0.0;
    std::vector<double> run_busy;
    std::vector<std::vector<PhaseInterval>> timelines;
    std::vector<HeapEvent> heap_trace;
    std::vector<AllocationRecord> alloc_log;
};

inline std::uint64_t to_ns(double t) {
    return static_cast<std::uint64_t>(std::llround(t * 1e9));
}

// Event ranks order simultaneous events: releases free helpers before any
// acquisition sees the pool, and ties among leaders go to the lowest id.
enum : int { kParDone = 0, kRunStart = 1, kSeqDone = 2 };

struct Event {
    double time;
    int rank;
    int leader;
    bool operator>(const Event& o) const {
        if (time != o.time) return time > o.time;
        if (rank != o.rank) return rank > o.rank;
        return leader > o.leader;
    }
};

struct LeaderState {
    std::vector<int> runs;
    std::size_t run_pos = 0;
    std::size_t phase_pos = 0;
    double phase_t0 = 0.0;
    int width = 1;
    std::size_t grant_idx = SIZE_MAX;
};

inline RawOutcome run_events(const RunProfile& prof, const std::vector<double>& offsets,
                             GrantPlan plan) {
    RawOutcome out;
    out.run_busy.assign(static_cast<std::size_t>(prof.n), 0.0);
    out.timelines.assign(static_cast<std::size_t>(prof.n), {});

    const int p2 = static_team_size(prof.p, prof.p1);
    const int want_helpers = requested_team_size(p2, prof.pri) - 1;
    HeapLedger heap(prof.p - prof.p1);

    std::vector<LeaderState> leaders(static_cast<std::size_t>(prof.p1));
    auto blocks = block_assignments(prof.n, prof.p1);
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;
    for (int m = 0; m < prof.p1; ++m) {
        leaders[static_cast<std::size_t>(m)].runs = std::move(blocks[static_cast<std::size_t>(m)]);
        if (!leaders[static_cast<std::size_t>(m)].runs.empty())
            queue.push({offsets[static_cast<std::size_t>(m)], kRunStart, m});
    }

    auto note_heap = [&](double t) {
        out.heap_trace.push_back({t, heap.available(), heap.outstanding()});
    };

    while (!queue.empty()) {
        const Event ev = queue.top();
        queue.pop();
        LeaderState& ls = leaders[static_cast<std::size_t>(ev.leader)];
        const int run = ls.runs[ls.run_pos];
        const PhasePair& ph = prof.phases[ls.phase_pos];
        out.makespan = std::max(out.makespan, ev.time);

        switch (ev.rank) {
            case kRunStart: {
                ls.phase_t0 = ev.time;
                queue.push({ev.time + ph.seq, kSeqDone, ev.leader});
                break;
            }
            case kSeqDone: {
                out.run_busy[static_cast<std::size_t>(run)] += ph.seq;
                out.timelines[static_cast<std::size_t>(run)].push_back(
                    {ls.phase_t0, ev.time, false, 1});
                int want = plan.zero ? 0 : want_helpers;
                if (!plan.replay.empty()) {
                    auto& q = plan.replay[static_cast<std::size_t>(ev.leader)];
                    if (!q.empty()) {
                        want = q.front();
                        q.pop_front();
                    }
                }
                int granted = 0;
                if (want > 0 && ph.par > 0.0) {
                    ls.grant_idx = heap.acquire(to_ns(ev.time), ev.leader, want);
                    granted = heap.log()[ls.grant_idx].granted;
                    note_heap(ev.time);
                } else {
                    ls.grant_idx = SIZE_MAX;
                }
                ls.width = 1 + granted;
                ls.phase_t0 = ev.time;
                queue.push({ev.time + ph.par / ls.width, kParDone, ev.leader});
                break;
            }
            case kParDone: {
                out.run_busy[static_cast<std::size_t>(run)] += ph.par;
                out.timelines[static_cast<std::size_t>(run)].push_back(
                    {ls.phase_t0, ev.time, true, ls.width});
                if (ls.grant_idx != SIZE_MAX) {
                    heap.release(ls.grant_idx, to_ns(ev.time));
                    ls.grant_idx = SIZE_MAX;
                }
                ls.width = 1;
                if (++ls.phase_pos < prof.phases.size()) {
                    ls.phase_t0 = ev.time;
                    queue.push({ev.time + prof.phases[ls.phase_pos].seq, kSeqDone, ev.leader});
                } else if (++ls.run_pos < ls.runs.size()) {
                    ls.phase_pos = 0;
                    queue.push({ev.time, kRunStart, ev.leader});
                }
                break;
            }
        }
    }

    out.alloc_log = heap.log();
    return out;
}

inline std::vector<double> draw_offsets(const RunProfile& prof) {
    std::vector<double> offs(static_cast<std::size_t>(prof.p1), 0.0);
    if (prof.stagger > 0.0)
        for (int m = 0; m < prof.p1; ++m) {
            RngStream s = stream_for_run(prof.seed, static_cast<std::uint64_t>(m));
            offs[static_cast<std::size_t>(m)] = prof.stagger * s.uniform();
        }
    return offs;
}

inline SimOutcome finish(const RunProfile& prof, RawOutcome actual, const RawOutcome& baseline) {
    SimOutcome out;
    out.makespan = actual.makespan;
    for (double b : actual.run_busy) out.busy_time += b;
    out.speedup_vs_one_worker = static_cast<double>(prof.n) * prof.run_total() / actual.makespan;
    out.second_level_speedup = baseline.makespan / actual.makespan;
    out.timelines = std::move(actual.timelines);
    out.heap_trace = std::move(actual.heap_trace);
    out.alloc_log = std::move(actual.alloc_log);
    return out;
}

}  // namespace detail_sim

inline SimOutcome simulate(const RunProfile& prof) {
    prof.validate();
    const auto offsets = detail_sim::draw_offsets(prof);
    detail_sim::GrantPlan live, zero;
    zero.zero = true;
    auto actual = detail_sim::run_events(prof, offsets, std::move(live));
    const auto baseline = detail_sim::run_events(prof, offsets, std::move(zero));
    return detail_sim::finish(prof, std::move(actual), baseline);
}

// Re-run the simulation taking each leader's grant sizes from a recorded
// log (in that leader's request order) instead of the live policy, still
// clamped to availability. Extra requests beyond the log fall back to the
// policy. This is how an executor's allocation log is cross-checked.
inline SimOutcome replay(const RunProfile& prof, const std::vector<AllocationRecord>& log) {
    prof.validate();
    const auto offsets = detail_sim::draw_offsets(prof);
    detail_sim::GrantPlan plan, zero;
    zero.zero = true;
    plan.replay.resize(static_cast<std::size_t>(prof.p1));
    std::vector<AllocationRecord> ordered = log;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const AllocationRecord& a, const AllocationRecord& b) {
                         return a.time_ns < b.time_ns;
                     });
    for (const auto& rec : ordered) {
        if (rec.leader < 0 || rec.leader >= prof.p1)
            throw std::invalid_argument("replay: log names a leader outside the profile");
        plan.replay[static_cast<std::size_t>(rec.leader)].push_back(rec.granted);
    }
    auto actual = detail_sim::run_events(prof, offsets, std::move(plan));
    const auto baseline = detail_sim::run_events(prof, offsets, std::move(zero));
    return detail_sim::finish(prof, std::move(actual), baseline);
}

struct PriSweepRow {
    double pri = 0.0;
    double predicted = 0.0;  // closed-form second-level speedup
    double simulated = 0.0;
};

inline std::vector<PriSweepRow> sweep_pri(const RunProfile& base, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep_pri: empty grid");
    base.validate();
    const int p2 = static_team_size(base.p, base.p1);
    const double beta = base.beta();
    std::vector<PriSweepRow> rows;
    rows.reserve(grid.size());
    for (double pri : grid) {
        RunProfile prof = base;
        prof.pri = pri;
        rows.push_back({pri, s_p2_with_pri(beta, p2, pri), simulate(prof).second_level_speedup});
    }
    return rows;
}

struct StrategyComparisonRow {
    int p2 = 1;
    double tlp_model = 0.0;       // fixed teams, no over-allocation
    double tlpdpr_model = 0.0;    // over-allocated at the threshold pri
    double max_attainable = 0.0;  // 1/beta
    double tlp_sim = 0.0;
    double tlpdpr_sim = 0.0;
};

// One row per team size: closed-form and simulated second-level speedups of
// the static strategy (pri = 0) and the heap strategy at its threshold pri.
// Each row runs with p1 * p2 workers; p bounds the grid.
inline std::vector<StrategyComparisonRow> compare_tlp_vs_tlpdpr(
    double beta, int p1, int p, const std::vector<int>& p2_grid, int n = 0, double stagger = 0.1,
    std::uint64_t seed = 12345) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("compare: beta must lie in (0, 1)");
    if (p1 < 1) throw std::invalid_argument("compare: p1 must be >= 1");
    if (p2_grid.empty()) throw std::invalid_argument("compare: empty grid");
    if (n <= 0) n = 4 * p1;

    std::vector<StrategyComparisonRow> rows;
    rows.reserve(p2_grid.size());
    for (int p2 : p2_grid) {
        if (p2 < 1 || p1 * p2 > p)
            throw std::invalid_argument("compare: grid entry outside 1 <= p2 <= p/p1");
        RunProfile prof;
        prof.phases = make_uniform_profile(beta, 4, 1.0);
        prof.n = n;
        prof.p1 = p1;
        prof.p = p1 * p2;
        prof.stagger = stagger;
        prof.seed = seed;

        StrategyComparisonRow row;
        row.p2 = p2;
        row.max_attainable = 1.0 / beta;
        row.tlp_model = s_p2_with_pri(beta, p2, 0.0);
        const double threshold = pri_star(beta, p2).value();
        row.tlpdpr_model = s_p2_with_pri(beta, p2, threshold);

        prof.pri = 0.0;
        row.tlp_sim = simulate(prof).second_level_speedup;
        prof.pri = threshold;
        row.tlpdpr_sim = simulate(prof).second_level_speedup;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace dsmc
