#pragma once

// CSV emission. Every file starts with comment lines naming the units and
// the master seed, and all floating-point fields are printed with 17
// significant digits so a reader recovers the exact doubles; identical
// inputs therefore produce byte-identical files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dsmc/exec.hpp"
#include "dsmc/sched_sim.hpp"

namespace dsmc {

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

namespace detail_csv {

inline void write_header(std::ostream& os, const std::string& what, std::uint64_t master_seed,
                         const HeaderFields& extra, const std::string& units,
                         const std::string& columns) {
    os << "# " << what << "\n";
    os << "# master_seed = " << master_seed << "\n";
    for (const auto& [key, value] : extra) os << "# " << key << " = " << value << "\n";
    os << "# units: " << units << "\n";
    os << "# columns: " << columns << "\n";
}

inline void write_snapshot_rows(std::ostream& os, const FlowProblem& prob,
                                const std::vector<Snapshot>& snaps, long long run_id) {
    for (const auto& snap : snaps)
        for (std::size_t c = 0; c < snap.cells.size(); ++c) {
            const Macroparameters m = derive_macroparameters(
                snap.cells[c], prob.particle_weight, prob.grid.cell_volume);
            os << run_id << ',' << format_double(snap.t) << ',' << c << ','
               << snap.cells[c].sample_count << ',' << format_double(m.density) << ','
               << format_double(m.bulk[0]);
            if (prob.grid.dim == 2) os << ',' << format_double(m.bulk[1]);
            os << ',' << format_double(m.temperature) << '\n';
        }
}

}  // namespace detail_csv

// Per-run macroparameter rows followed by the ensemble average under
// run_id = -1.
inline void write_snapshot_csv(std::ostream& os, const FlowProblem& prob,
                               const EnsembleResult& ens, std::uint64_t master_seed,
                               const HeaderFields& extra = {}) {
    const std::string columns = prob.grid.dim == 2
                                    ? "run_id,t,cell_id,n_samples,density,vx,vy,temperature"
                                    : "run_id,t,cell_id,n_samples,density,vx,temperature";
    detail_csv::write_header(
        os, "snapshot macroparameters", master_seed, extra,
        "time in flow units; density in reference density; velocity in reference "
        "most-probable speed; temperature in reference temperature",
        columns);
    for (const auto& run : ens.runs)
        detail_csv::write_snapshot_rows(os, prob, run.snapshots, run.run_id);
    detail_csv::write_snapshot_rows(os, prob, ens.merged, -1);
}

// Processor-pool allocation history; -1 marks a grant never released.
inline void write_alloc_csv(std::ostream& os, const std::vector<AllocationRecord>& log,
                            std::uint64_t master_seed, const HeaderFields& extra = {}) {
    detail_csv::write_header(os, "processor allocation log", master_seed, extra,
                             "times in nanoseconds; worker counts dimensionless",
                             "time_ns,leader,requested,granted,released_ns");
    for (const auto& rec : log) {
        os << rec.time_ns << ',' << rec.leader << ',' << rec.requested << ',' << rec.granted
           << ',';
        if (rec.released_ns == kNotReleased) os << -1;
        else os << rec.released_ns;
        os << '\n';
    }
}

inline void write_pri_sweep_csv(std::ostream& os, const std::vector<PriSweepRow>& rows,
                                std::uint64_t master_seed, const HeaderFields& extra = {}) {
    detail_csv::write_header(os, "request-size sweep", master_seed, extra,
                             "pri dimensionless; speedups relative to one leader team",
                             "pri,predicted_speedup,simulated_speedup");
    for (const auto& row : rows)
        os << format_double(row.pri) << ',' << format_double(row.predicted) << ','
           << format_double(row.simulated) << '\n';
}

inline void write_strategy_sweep_csv(std::ostream& os,
                                     const std::vector<StrategyComparisonRow>& rows,
                                     std::uint64_t master_seed,
                                     const HeaderFields& extra = {}) {
    detail_csv::write_header(os, "static versus borrowed team speedup", master_seed, extra,
                             "speedups relative to one leader team; p2 in workers",
                             "p2,tlp_model,tlpdpr_model,max_attainable,tlp_sim,tlpdpr_sim");
    for (const auto& row : rows)
        os << row.p2 << ',' << format_double(row.tlp_model) << ','
           << format_double(row.tlpdpr_model) << ',' << format_double(row.max_attainable)
           << ',' << format_double(row.tlp_sim) << ',' << format_double(row.tlpdpr_sim)
           << '\n';
}

}  // namespace dsmc
