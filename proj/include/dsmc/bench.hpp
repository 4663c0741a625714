#pragma once

// Timing harness. Each measurement wraps one whole strategy execution in
// the parent: setup, worker spawn, runs, and the final merge. Repetitions
// are summarized by min and median with the coefficient of variation, and
// grid points asking for more workers than the machine has physical cores
// are kept but marked validation-void; oversubscribed timings say nothing
// about the speedup model.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsmc/csv.hpp"
#include "dsmc/exec.hpp"
#include "dsmc/heap_policy.hpp"
#include "dsmc/perf_model.hpp"

namespace dsmc {

struct TimingStats {
    int repetitions = 0;
    std::vector<double> seconds;  // in measurement order
    double min_s = 0.0;
    double median_s = 0.0;
    double cv = 0.0;  // stddev over mean
    bool high_variance = false;
};

inline TimingStats summarize_timings(std::vector<double> seconds) {
    if (seconds.empty()) throw std::invalid_argument("bench: no measurements");
    TimingStats out;
    out.repetitions = static_cast<int>(seconds.size());
    out.seconds = seconds;
    std::sort(seconds.begin(), seconds.end());
    out.min_s = seconds.front();
    const std::size_t mid = seconds.size() / 2;
    out.median_s = seconds.size() % 2 == 1 ? seconds[mid]
                                           : 0.5 * (seconds[mid - 1] + seconds[mid]);
    double mean = 0.0;
    for (double s : seconds) mean += s;
    mean /= static_cast<double>(seconds.size());
    double var = 0.0;
    for (double s : seconds) var += (s - mean) * (s - mean);
    var /= static_cast<double>(seconds.size());
    out.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    out.high_variance = out.cv > 0.10;
    return out;
}

inline TimingStats measure_parent_time(const std::function<void()>& task, int repetitions = 3) {
    if (repetitions < 1) throw std::invalid_argument("bench: repetitions must be >= 1");
    std::vector<double> seconds;
    seconds.reserve(static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        task();
        const auto t1 = std::chrono::steady_clock::now();
        seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    return summarize_timings(std::move(seconds));
}

// Parallel fractions measured on the sequential reference. Level 1 treats
// whole runs as the parallelizable work and everything else in the parent
// (setup + merge) as serial; level 2 splits each run into its motion and
// cell stages against generation and readdressing.
struct AlphaEstimates {
    double level1 = 0.0;
    double level2 = 0.0;
};

inline AlphaEstimates estimate_levels(const EnsembleResult& reference) {
    AlphaEstimates out;
    std::vector<PhaseSample> stages;
    double run_total = 0.0;
    for (const auto& run : reference.runs) {
        stages.push_back({false, run.meta.serial_seconds});
        stages.push_back({true, run.meta.parallel_seconds});
        run_total += run.meta.wall_seconds;
    }
    out.level2 = estimate_alpha(stages);
    const double overhead = std::max(0.0, reference.wall_seconds - run_total);
    out.level1 = estimate_alpha({{true, run_total}, {false, overhead}});
    return out;
}

struct BenchRow {
    std::string strategy;
    int n = 1;
    int p = 1;
    int p1 = 1;
    int p2 = 1;
    double pri = 0.0;
    TimingStats stats;
    double measured_speedup = 1.0;
    double measured_efficiency = 1.0;
    double predicted_speedup = 1.0;
    double predicted_efficiency = 1.0;
    bool validation_void = false;
};

struct BenchReport {
    std::uint64_t master_seed = 0;
    int physical_cores = 1;
    int repetitions = 0;
    AlphaEstimates alpha;
    std::vector<BenchRow> rows;  // rows[0] is the sequential reference
    HeaderFields config_echo;
};

namespace detail_bench {

inline double predict_speedup(const StrategyConfig& cfg, const AlphaEstimates& alpha) {
    switch (cfg.strategy) {
        case StrategyConfig::Strategy::Sequential:
            return 1.0;
        case StrategyConfig::Strategy::Psir:
            return amdahl_speedup(alpha.level1, cfg.p);
        case StrategyConfig::Strategy::Dp:
            return amdahl_speedup(alpha.level2, cfg.p2);
        case StrategyConfig::Strategy::Tlp:
            return tlp_speedup(alpha.level1, alpha.level2, cfg.p1, cfg.p2);
        case StrategyConfig::Strategy::Tlpdpr:
            return amdahl_speedup(alpha.level1, cfg.p1) *
                   s_p2_with_pri(1.0 - alpha.level2, cfg.p2, cfg.pri);
    }
    return 1.0;
}

}  // namespace detail_bench

// Measures the sequential reference, estimates the parallel fractions from
// its stage timings, then times the chosen strategy at every grid point.
inline BenchReport run_bench(const FlowProblem& prob, const StrategyConfig& base,
                             const std::vector<int>& worker_grid, int repetitions,
                             std::uint64_t master_seed, HeaderFields config_echo = {}) {
    if (repetitions < 3)
        throw std::invalid_argument("bench: need at least 3 repetitions for a median");
    if (worker_grid.empty()) throw std::invalid_argument("bench: empty worker grid");

    BenchReport report;
    report.master_seed = master_seed;
    report.repetitions = repetitions;
    report.config_echo = std::move(config_echo);

    EnsembleResult reference;
    BenchRow ref_row;
    ref_row.strategy = "sequential";
    ref_row.n = base.n;
    ref_row.stats = measure_parent_time(
        [&] { reference = sequential_execute(prob, base.n, master_seed); }, repetitions);
    report.physical_cores = reference.physical_cores;
    report.alpha = estimate_levels(reference);
    report.rows.push_back(std::move(ref_row));

    for (int point : worker_grid) {
        StrategyConfig cfg = base;
        switch (cfg.strategy) {
            case StrategyConfig::Strategy::Sequential:
                if (point != 1)
                    throw std::invalid_argument("bench: sequential runs at p = 1 only");
                break;
            case StrategyConfig::Strategy::Psir:
                cfg.p = point;
                break;
            case StrategyConfig::Strategy::Dp:
                cfg.p2 = point;
                cfg.p = 0;
                break;
            case StrategyConfig::Strategy::Tlp:
                if (cfg.p1 < 1 || point % cfg.p1 != 0)
                    throw std::invalid_argument(
                        "bench: tlp grid point " + std::to_string(point) +
                        " is not a multiple of p1 = " + std::to_string(cfg.p1));
                cfg.p2 = point / cfg.p1;
                cfg.p = 0;
                break;
            case StrategyConfig::Strategy::Tlpdpr:
                cfg.p = point;
                break;
        }
        cfg.normalize();

        BenchRow row;
        row.strategy = strategy_name(cfg.strategy);
        row.n = cfg.n;
        row.p = cfg.p;
        row.p1 = cfg.p1;
        row.p2 = cfg.p2;
        row.pri = cfg.pri;
        row.stats = measure_parent_time([&] { run_strategy(prob, cfg, master_seed); },
                                        repetitions);
        row.measured_speedup = report.rows[0].stats.median_s / row.stats.median_s;
        row.measured_efficiency = row.measured_speedup / cfg.p;
        row.predicted_speedup = detail_bench::predict_speedup(cfg, report.alpha);
        row.predicted_efficiency = row.predicted_speedup / cfg.p;
        row.validation_void = cfg.p > report.physical_cores;
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline void write_bench_csv(std::ostream& os, const BenchReport& report) {
    HeaderFields extra;
    extra.emplace_back("physical_cores", std::to_string(report.physical_cores));
    extra.emplace_back("repetitions", std::to_string(report.repetitions));
    extra.emplace_back("alpha1_hat", format_double(report.alpha.level1));
    extra.emplace_back("alpha2_hat", format_double(report.alpha.level2));
    for (const auto& kv : report.config_echo) extra.push_back(kv);
    detail_csv::write_header(
        os, "strategy timing report", report.master_seed, extra,
        "times in seconds; speedups and efficiencies dimensionless",
        "strategy,n,p,p1,p2,pri,reps,min_s,median_s,cv,high_variance,validation_void,"
        "measured_speedup,predicted_speedup,measured_efficiency,predicted_efficiency");
    for (const auto& row : report.rows)
        os << row.strategy << ',' << row.n << ',' << row.p << ',' << row.p1 << ',' << row.p2
           << ',' << format_double(row.pri) << ',' << row.stats.repetitions << ','
           << format_double(row.stats.min_s) << ',' << format_double(row.stats.median_s) << ','
           << format_double(row.stats.cv) << ',' << (row.stats.high_variance ? 1 : 0) << ','
           << (row.validation_void ? 1 : 0) << ',' << format_double(row.measured_speedup)
           << ',' << format_double(row.predicted_speedup) << ','
           << format_double(row.measured_efficiency) << ','
           << format_double(row.predicted_efficiency) << '\n';
}

}  // namespace dsmc
