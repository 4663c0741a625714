#pragma once

// Thread-pool execution strategies over the flow kernel and the ensemble
// merge. Four schedules: psir runs whole runs per worker, dp splits one run
// across a static team, tlp nests the two, and tlpdpr replaces dp's static
// teams with helpers borrowed per phase from a shared pool. Every schedule
// produces bit-identical results to the sequential reference with the same
// master seed; the strategies change time, never answers.

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <latch>
#include <mutex>
#include <condition_variable>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "dsmc/heap_policy.hpp"
#include "dsmc/kernel.hpp"

namespace dsmc {

// Distinct physical cores, ignoring SMT siblings; logical count when the
// topology is unreadable.
inline int physical_core_count() {
    std::ifstream info("/proc/cpuinfo");
    std::set<std::pair<int, int>> cores;
    int proc = -1, phys = -1, core = -1;
    auto commit = [&] {
        if (proc < 0) return;
        // Entries without topology fields (common in containers) count as
        // one core per logical processor.
        if (phys < 0 && core < 0) cores.emplace(-1, proc);
        else cores.emplace(phys, core);
        proc = phys = core = -1;
    };
    for (std::string line; std::getline(info, line);) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const std::string key = line.substr(0, line.find_first_of(" \t:"));
        if (key == "processor") {
            commit();
            proc = std::atoi(line.c_str() + colon + 1);
        }
        if (key == "physical") phys = std::atoi(line.c_str() + colon + 1);
        if (key == "core") core = std::atoi(line.c_str() + colon + 1);
    }
    commit();
    if (!cores.empty()) return static_cast<int>(cores.size());
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Persistent team of width workers (the caller plus width-1 threads) driven
// phase by phase through two barriers. A width-1 team degenerates to the
// serial executor and synchronizes nothing.
class StaticTeam final : public PhaseExecutor {
  public:
    explicit StaticTeam(int width)
        : width_(width), start_(width > 0 ? width : 1), done_(width > 0 ? width : 1) {
        if (width < 1) throw std::invalid_argument("StaticTeam: width must be >= 1");
        threads_.reserve(static_cast<std::size_t>(width - 1));
        for (int w = 1; w < width; ++w) threads_.emplace_back([this, w] { helper_loop(w); });
    }

    ~StaticTeam() override {
        if (width_ > 1) {
            stop_.store(true);
            start_.arrive_and_wait();
            for (auto& t : threads_) t.join();
        }
    }

    StaticTeam(const StaticTeam&) = delete;
    StaticTeam& operator=(const StaticTeam&) = delete;

    int width() const override { return width_; }

    void run_phase(PhaseKind kind, const std::function<void(int, int)>& body) override {
        if (width_ == 1) {
            body(0, 1);
            return;
        }
        body_ = &body;
        start_.arrive_and_wait();
        body(0, width_);
        done_.arrive_and_wait();
        body_ = nullptr;
        syncs_ += kind == PhaseKind::Motion ? 1 : 2;
    }

    void end_run() override {
        if (width_ > 1) ++syncs_;
    }

    std::uint64_t sync_points() const override { return syncs_; }

  private:
    void helper_loop(int w) {
        for (;;) {
            start_.arrive_and_wait();
            if (stop_.load()) return;
            (*body_)(w, width_);
            done_.arrive_and_wait();
        }
    }

    int width_;
    std::barrier<> start_;
    std::barrier<> done_;
    std::atomic<bool> stop_{false};
    const std::function<void(int, int)>* body_ = nullptr;
    std::vector<std::thread> threads_;
    std::uint64_t syncs_ = 0;
};

// Pool of helper threads leaders borrow from per phase. Allocation follows
// the shared policy: non-blocking, partial, min(requested, available); the
// ledger records every request with request and release timestamps.
class ProcessorHeap {
  public:
    explicit ProcessorHeap(int capacity)
        : ledger_(capacity), epoch_(std::chrono::steady_clock::now()) {
        slots_.resize(static_cast<std::size_t>(capacity));
        idle_.reserve(static_cast<std::size_t>(capacity));
        for (int i = capacity - 1; i >= 0; --i) idle_.push_back(i);
        threads_.reserve(static_cast<std::size_t>(capacity));
        for (int i = 0; i < capacity; ++i) threads_.emplace_back([this, i] { worker_loop(i); });
    }

    ~ProcessorHeap() {
        {
            std::lock_guard lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    ProcessorHeap(const ProcessorHeap&) = delete;
    ProcessorHeap& operator=(const ProcessorHeap&) = delete;

    struct Grant {
        std::vector<int> slots;
        std::size_t log_index = SIZE_MAX;
        int granted() const { return static_cast<int>(slots.size()); }
    };

    int capacity() const { return ledger_.capacity(); }

    Grant acquire(int leader, int requested) {
        std::lock_guard lk(mu_);
        Grant g;
        g.log_index = ledger_.acquire(now_ns(), leader, requested);
        const int got = ledger_.log()[g.log_index].granted;
        for (int i = 0; i < got; ++i) {
            g.slots.push_back(idle_.back());
            idle_.pop_back();
        }
        return g;
    }

    // Hands body to every granted worker as team members 1..granted; each
    // counts `done` down once. The caller runs member 0 itself.
    void dispatch(const Grant& g, const std::function<void(int, int)>& body, int width,
                  std::latch& done) {
        {
            std::lock_guard lk(mu_);
            int member = 1;
            for (int slot : g.slots) {
                auto& s = slots_[static_cast<std::size_t>(slot)];
                s.body = &body;
                s.member = member++;
                s.width = width;
                s.done = &done;
            }
        }
        cv_.notify_all();
    }

    // Only call after the grant's dispatch (if any) has fully completed.
    void release(Grant& g) {
        std::lock_guard lk(mu_);
        ledger_.release(g.log_index, now_ns());
        for (int slot : g.slots) idle_.push_back(slot);
        g = Grant{};
    }

    // Stable once all leaders are joined.
    const std::vector<AllocationRecord>& log() const { return ledger_.log(); }

  private:
    struct Slot {
        const std::function<void(int, int)>* body = nullptr;
        int member = 0;
        int width = 0;
        std::latch* done = nullptr;
    };

    std::uint64_t now_ns() const {
        return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                              std::chrono::steady_clock::now() - epoch_)
                                              .count());
    }

    void worker_loop(int slot) {
        for (;;) {
            const std::function<void(int, int)>* body;
            int member, width;
            std::latch* done;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] {
                    return stop_ || slots_[static_cast<std::size_t>(slot)].body != nullptr;
                });
                if (stop_) return;
                auto& s = slots_[static_cast<std::size_t>(slot)];
                body = s.body;
                member = s.member;
                width = s.width;
                done = s.done;
                s.body = nullptr;
            }
            (*body)(member, width);
            done->count_down();
        }
    }

    HeapLedger ledger_;
    std::chrono::steady_clock::time_point epoch_;
    std::vector<int> idle_;
    std::vector<Slot> slots_;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_;
    bool stop_ = false;
};

// Executor a leader uses when its team is borrowed per phase: request, run
// the phase at whatever width was granted, release.
class HeapTeam final : public PhaseExecutor {
  public:
    HeapTeam(ProcessorHeap& heap, int leader, int helpers_wanted)
        : heap_(heap), leader_(leader), want_(helpers_wanted) {
        if (helpers_wanted < 0) throw std::invalid_argument("HeapTeam: negative request");
    }

    int width() const override { return 1 + want_; }

    void run_phase(PhaseKind kind, const std::function<void(int, int)>& body) override {
        if (want_ == 0) {
            body(0, 1);
            return;
        }
        ProcessorHeap::Grant grant = heap_.acquire(leader_, want_);
        const int granted = grant.granted();
        if (granted == 0) {
            body(0, 1);
            heap_.release(grant);
            return;
        }
        std::latch done(granted);
        heap_.dispatch(grant, body, 1 + granted, done);
        body(0, 1 + granted);
        done.wait();
        heap_.release(grant);
        syncs_ += kind == PhaseKind::Motion ? 1 : 2;
    }

    void end_run() override {
        if (want_ > 0) ++syncs_;
    }

    std::uint64_t sync_points() const override { return syncs_; }

  private:
    ProcessorHeap& heap_;
    int leader_;
    int want_;
    std::uint64_t syncs_ = 0;
};

struct EnsembleResult {
    std::vector<RunResult> runs;   // ascending run_id
    std::vector<Snapshot> merged;  // accumulator sums folded over runs
    double wall_seconds = 0.0;     // parent process, strategy start to merge end
    int workers = 1;
    int physical_cores = 1;
    bool oversubscribed = false;
    std::uint64_t sync_points = 0;
    std::vector<AllocationRecord> alloc_log;  // heap strategy only
    std::vector<std::string> warnings;
};

// Fold per-run accumulators in ascending run_id order. All runs must share
// the snapshot schedule.
inline std::vector<Snapshot> merge_ensemble(const std::vector<RunResult>& runs) {
    if (runs.empty()) throw std::invalid_argument("merge_ensemble: no runs");
    std::vector<const RunResult*> order;
    order.reserve(runs.size());
    for (const auto& r : runs) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(),
                     [](const RunResult* a, const RunResult* b) { return a->run_id < b->run_id; });

    std::vector<Snapshot> merged = order.front()->snapshots;
    for (std::size_t r = 1; r < order.size(); ++r) {
        const auto& snaps = order[r]->snapshots;
        if (snaps.size() != merged.size())
            throw std::invalid_argument("merge_ensemble: snapshot schedules differ");
        for (std::size_t k = 0; k < merged.size(); ++k) {
            if (snaps[k].t != merged[k].t || snaps[k].cells.size() != merged[k].cells.size())
                throw std::invalid_argument("merge_ensemble: snapshot schedules differ");
            for (std::size_t c = 0; c < merged[k].cells.size(); ++c)
                merged[k].cells[c].merge(snaps[k].cells[c]);
        }
    }
    return merged;
}

namespace detail_exec {

inline double seconds_between(std::chrono::steady_clock::time_point a,
                              std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

inline EnsembleResult finish_ensemble(std::vector<RunResult> runs, int workers,
                                      std::uint64_t extra_syncs,
                                      std::chrono::steady_clock::time_point start) {
    EnsembleResult out;
    std::stable_sort(runs.begin(), runs.end(),
                     [](const RunResult& a, const RunResult& b) { return a.run_id < b.run_id; });
    out.runs = std::move(runs);
    out.merged = merge_ensemble(out.runs);
    out.workers = workers;
    out.physical_cores = physical_core_count();
    out.oversubscribed = workers > out.physical_cores;
    out.sync_points = extra_syncs;
    for (const auto& r : out.runs) out.sync_points += r.meta.sync_points;
    out.wall_seconds = seconds_between(start, std::chrono::steady_clock::now());
    return out;
}

}  // namespace detail_exec

inline EnsembleResult sequential_execute(const FlowProblem& prob, int n,
                                         std::uint64_t master_seed) {
    if (n < 1) throw std::invalid_argument("sequential_execute: n must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    std::vector<RunResult> runs;
    runs.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
        runs.push_back(run_unsteady(prob, master_seed, static_cast<std::uint32_t>(r)));
    return detail_exec::finish_ensemble(std::move(runs), 1, 0, start);
}

// Whole runs per worker in contiguous blocks; one join before the merge.
inline EnsembleResult psir_execute(const FlowProblem& prob, int n, int p,
                                   std::uint64_t master_seed) {
    if (n < 1 || p < 1) throw std::invalid_argument("psir_execute: need n >= 1, p >= 1");
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    if (p > n)
        warnings.push_back("psir: p exceeds n; workers beyond the run count stay idle");

    std::vector<RunResult> runs(static_cast<std::size_t>(n));
    const auto blocks = block_assignments(n, p);
    {
        std::vector<std::thread> team;
        team.reserve(static_cast<std::size_t>(p));
        for (int m = 0; m < p; ++m)
            team.emplace_back([&, m] {
                for (int run_id : blocks[static_cast<std::size_t>(m)])
                    runs[static_cast<std::size_t>(run_id)] =
                        run_unsteady(prob, master_seed, static_cast<std::uint32_t>(run_id));
            });
        for (auto& t : team) t.join();
    }
    auto out = detail_exec::finish_ensemble(std::move(runs), p, p > 1 ? 1 : 0, start);
    out.warnings = std::move(warnings);
    return out;
}

// One run split across a static team of p2 workers.
inline RunResult dp_execute(const FlowProblem& prob, std::uint32_t run_id, int p2,
                            std::uint64_t master_seed) {
    StaticTeam team(p2);
    RunResult res = run_unsteady(prob, master_seed, run_id, team);
    res.meta.oversubscribed = p2 > physical_core_count();
    return res;
}

// Runs dealt to p1 leaders, each driving a persistent team of p2 workers;
// one final join across leaders before the merge.
inline EnsembleResult tlp_execute(const FlowProblem& prob, int n, int p1, int p2,
                                  std::uint64_t master_seed) {
    if (n < 1 || p1 < 1 || p2 < 1)
        throw std::invalid_argument("tlp_execute: need n >= 1, p1 >= 1, p2 >= 1");
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    if (n % p1 != 0)
        warnings.push_back("tlp: n is not a multiple of p1; lowest-id leaders carry extra runs");

    const int workers = p1 * p2;
    const int cores = physical_core_count();
    std::vector<RunResult> runs(static_cast<std::size_t>(n));
    const auto blocks = block_assignments(n, p1);
    {
        std::vector<std::thread> leaders;
        leaders.reserve(static_cast<std::size_t>(p1));
        for (int m = 0; m < p1; ++m)
            leaders.emplace_back([&, m] {
                StaticTeam team(p2);
                std::uint64_t seen = 0;
                for (int run_id : blocks[static_cast<std::size_t>(m)]) {
                    RunResult res =
                        run_unsteady(prob, master_seed, static_cast<std::uint32_t>(run_id), team);
                    res.meta.sync_points = team.sync_points() - seen;
                    seen = team.sync_points();
                    res.meta.oversubscribed = workers > cores;
                    runs[static_cast<std::size_t>(run_id)] = std::move(res);
                }
            });
        for (auto& t : leaders) t.join();
    }
    auto out =
        detail_exec::finish_ensemble(std::move(runs), workers, workers > 1 ? 1 : 0, start);
    out.warnings = std::move(warnings);
    return out;
}

// Leaders as in tlp, teams borrowed from the pool per phase. Grants never
// change results, only timing.
inline EnsembleResult tlpdpr_execute(const FlowProblem& prob, int n, int p1, int p, double pri,
                                     std::uint64_t master_seed) {
    if (n < 1 || p1 < 1) throw std::invalid_argument("tlpdpr_execute: need n >= 1, p1 >= 1");
    if (p < p1) throw std::invalid_argument("tlpdpr_execute: p must be >= p1");
    if (!(pri >= 0.0)) throw std::invalid_argument("tlpdpr_execute: pri must be >= 0");
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    if (n % p1 != 0)
        warnings.push_back("tlpdpr: n is not a multiple of p1; lowest-id leaders carry extra runs");

    const int p2 = static_team_size(p, p1);
    const int want = requested_team_size(p2, pri) - 1;
    const int cores = physical_core_count();
    std::vector<RunResult> runs(static_cast<std::size_t>(n));
    const auto blocks = block_assignments(n, p1);
    ProcessorHeap heap(p - p1);
    {
        std::vector<std::thread> leaders;
        leaders.reserve(static_cast<std::size_t>(p1));
        for (int m = 0; m < p1; ++m)
            leaders.emplace_back([&, m] {
                for (int run_id : blocks[static_cast<std::size_t>(m)]) {
                    HeapTeam team(heap, m, want);
                    RunResult res =
                        run_unsteady(prob, master_seed, static_cast<std::uint32_t>(run_id), team);
                    res.meta.oversubscribed = p > cores;
                    runs[static_cast<std::size_t>(run_id)] = std::move(res);
                }
            });
        for (auto& t : leaders) t.join();
    }
    auto out = detail_exec::finish_ensemble(std::move(runs), p, p > 1 ? 1 : 0, start);
    out.alloc_log = heap.log();
    out.warnings = std::move(warnings);
    return out;
}

struct StrategyConfig {
    enum class Strategy { Sequential, Psir, Dp, Tlp, Tlpdpr };
    Strategy strategy = Strategy::Sequential;
    int n = 1;
    int p = 0;   // total workers; derived for dp/tlp when left 0
    int p1 = 1;  // leaders
    int p2 = 1;  // team width per run
    double pri = 0.0;

    // Fills derived counts, checks consistency, returns advisory warnings.
    std::vector<std::string> normalize() {
        std::vector<std::string> warnings;
        if (n < 1) throw std::invalid_argument("strategy: n must be >= 1");
        switch (strategy) {
            case Strategy::Sequential:
                p = p1 = p2 = 1;
                break;
            case Strategy::Psir:
                if (p == 0) p = 1;
                if (p < 1) throw std::invalid_argument("strategy: psir needs p >= 1");
                p1 = p;
                p2 = 1;
                if (p > n)
                    warnings.push_back(
                        "psir: p exceeds n; workers beyond the run count stay idle");
                break;
            case Strategy::Dp:
                if (p2 < 1) throw std::invalid_argument("strategy: dp needs p2 >= 1");
                p = p2;
                p1 = 1;
                break;
            case Strategy::Tlp:
                if (p1 < 1 || p2 < 1)
                    throw std::invalid_argument("strategy: tlp needs p1 >= 1 and p2 >= 1");
                if (p == 0) p = p1 * p2;
                if (p != p1 * p2)
                    throw std::invalid_argument("strategy: tlp requires p = p1 * p2");
                if (n % p1 != 0)
                    warnings.push_back(
                        "tlp: n is not a multiple of p1; lowest-id leaders carry extra runs");
                break;
            case Strategy::Tlpdpr:
                if (p1 < 1) throw std::invalid_argument("strategy: tlpdpr needs p1 >= 1");
                if (p == 0) p = p1;
                if (p < p1) throw std::invalid_argument("strategy: tlpdpr needs p >= p1");
                if (!(pri >= 0.0)) throw std::invalid_argument("strategy: pri must be >= 0");
                p2 = static_team_size(p, p1);
                if (n % p1 != 0)
                    warnings.push_back(
                        "tlpdpr: n is not a multiple of p1; lowest-id leaders carry extra runs");
                break;
        }
        return warnings;
    }
};

inline StrategyConfig::Strategy strategy_from_name(std::string_view name) {
    if (name == "sequential") return StrategyConfig::Strategy::Sequential;
    if (name == "psir") return StrategyConfig::Strategy::Psir;
    if (name == "dp") return StrategyConfig::Strategy::Dp;
    if (name == "tlp") return StrategyConfig::Strategy::Tlp;
    if (name == "tlpdpr") return StrategyConfig::Strategy::Tlpdpr;
    throw std::invalid_argument("unknown strategy: " + std::string(name));
}

inline const char* strategy_name(StrategyConfig::Strategy s) {
    switch (s) {
        case StrategyConfig::Strategy::Sequential: return "sequential";
        case StrategyConfig::Strategy::Psir: return "psir";
        case StrategyConfig::Strategy::Dp: return "dp";
        case StrategyConfig::Strategy::Tlp: return "tlp";
        case StrategyConfig::Strategy::Tlpdpr: return "tlpdpr";
    }
    return "sequential";
}

inline EnsembleResult run_strategy(const FlowProblem& prob, StrategyConfig cfg,
                                   std::uint64_t master_seed) {
    auto warnings = cfg.normalize();
    EnsembleResult out;
    switch (cfg.strategy) {
        case StrategyConfig::Strategy::Sequential:
            out = sequential_execute(prob, cfg.n, master_seed);
            break;
        case StrategyConfig::Strategy::Psir:
            out = psir_execute(prob, cfg.n, cfg.p, master_seed);
            break;
        case StrategyConfig::Strategy::Dp:
            out = tlp_execute(prob, cfg.n, 1, cfg.p2, master_seed);
            break;
        case StrategyConfig::Strategy::Tlp:
            out = tlp_execute(prob, cfg.n, cfg.p1, cfg.p2, master_seed);
            break;
        case StrategyConfig::Strategy::Tlpdpr:
            out = tlpdpr_execute(prob, cfg.n, cfg.p1, cfg.p, cfg.pri, master_seed);
            break;
    }
    for (const auto& w : warnings)
        if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
            out.warnings.push_back(w);
    return out;
}

}  // namespace dsmc
