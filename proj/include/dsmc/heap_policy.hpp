#pragma once

// The helper-pool allocation policy shared by the thread executor and the
// scheduling simulator: team-size arithmetic, first-come-first-served
// partial grants, and the allocation ledger both sides log into. Keeping
// one definition is what makes replaying an executor log through the
// simulator meaningful.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dsmc {

// Baseline team size per leader when p workers are split statically among
// p1 leaders: the leader itself plus an equal share of the rest.
inline int static_team_size(int p, int p1) {
    if (p1 < 1) throw std::invalid_argument("static_team_size: p1 must be >= 1");
    if (p < p1) throw std::invalid_argument("static_team_size: p must be >= p1");
    return (p - p1) / p1 + 1;
}

// Team size a leader asks for under over-allocation: (1 + pri) * p2,
// rounded half-up because it is a worker count.
inline int requested_team_size(int p2, double pri) {
    if (p2 < 1) throw std::invalid_argument("requested_team_size: p2 must be >= 1");
    if (!(pri >= 0.0)) throw std::invalid_argument("requested_team_size: pri must be >= 0");
    return static_cast<int>(std::floor((1.0 + pri) * p2 + 0.5));
}

// Contiguous blocks of ceil/floor(n/p) runs per worker, the extra runs going
// to the lowest worker ids. Used for leader/run assignment everywhere.
inline std::vector<std::vector<int>> block_assignments(int n, int p) {
    if (n < 0 || p < 1) throw std::invalid_argument("block_assignments: need n >= 0, p >= 1");
    std::vector<std::vector<int>> out(static_cast<std::size_t>(p));
    const int q = n / p, r = n % p;
    int next = 0;
    for (int m = 0; m < p; ++m) {
        const int count = q + (m < r ? 1 : 0);
        out[static_cast<std::size_t>(m)].reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(m)].push_back(next++);
    }
    return out;
}

inline constexpr std::uint64_t kNotReleased = std::numeric_limits<std::uint64_t>::max();

struct AllocationRecord {
    std::uint64_t time_ns = 0;  // request instant
    int leader = 0;
    int requested = 0;          // helpers asked for (leader excluded)
    int granted = 0;            // helpers actually handed over
    std::uint64_t released_ns = kNotReleased;
};

// Bookkeeping core of the helper pool. Grants are non-blocking and partial:
// a request gets min(requested, available), possibly zero, and the caller
// proceeds with whatever it got. Not thread-safe by itself; the executor
// wraps it in a mutex, the simulator runs single-threaded.
class HeapLedger {
public:
    explicit HeapLedger(int capacity) : capacity_(capacity), available_(capacity) {
        if (capacity < 0) throw std::invalid_argument("HeapLedger: negative capacity");
    }

    int capacity() const { return capacity_; }
    int available() const { return available_; }
    int outstanding() const { return capacity_ - available_; }

    // Returns the index of the new log entry; its granted field holds the
    // outcome. requested must be positive — zero-size requests are not heap
    // events and must not reach the ledger.
    std::size_t acquire(std::uint64_t time_ns, int leader, int requested) {
        if (requested <= 0) throw std::invalid_argument("HeapLedger: requested must be > 0");
        AllocationRecord rec;
        rec.time_ns = time_ns;
        rec.leader = leader;
        rec.requested = requested;
        rec.granted = requested < available_ ? requested : available_;
        available_ -= rec.granted;
        log_.push_back(rec);
        return log_.size() - 1;
    }

    // Returns the grant at log_index to the pool and stamps its release time.
    void release(std::size_t log_index, std::uint64_t released_ns) {
        if (log_index >= log_.size()) throw std::logic_error("HeapLedger: bad log index");
        AllocationRecord& rec = log_[log_index];
        if (rec.released_ns != kNotReleased)
            throw std::logic_error("HeapLedger: grant released twice");
        rec.released_ns = released_ns;
        available_ += rec.granted;
        if (available_ > capacity_) throw std::logic_error("HeapLedger: pool overflow");
    }

    const std::vector<AllocationRecord>& log() const { return log_; }

private:
    int capacity_;
    int available_;
    std::vector<AllocationRecord> log_;
};

}  // namespace dsmc
