#pragma once

// Closed-form speedup and efficiency model for one- and two-level worker
// teams, the over-allocation (PRI) algebra for heap-assisted teams, and a
// two-phase alpha estimator for timing profiles. All pure functions.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dsmc {

namespace detail {
inline void check_fraction(double a, const char* name) {
    if (!(a >= 0.0 && a <= 1.0))
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}
inline void check_workers(double p, const char* name) {
    if (!(p >= 1.0)) throw std::invalid_argument(std::string(name) + " must be >= 1");
}
}  // namespace detail

// Model parameters. The sequential fraction is derived, never stored, so
// alpha + beta() == 1 cannot drift.
struct PerfParams {
    double alpha = 0.0;  // parallel fraction of the work
    int p = 1;
    int p1 = 1;
    int p2 = 1;
    double pri = 0.0;
    double beta() const { return 1.0 - alpha; }
};

struct Metrics {
    double t1 = 0.0;
    double tp = 0.0;
    double sp = 0.0;  // t1 / tp
    double ep = 0.0;  // sp / p
};

// Tp = [(1 - alpha) + alpha/p] T1.
inline double parallel_time(double t1, double alpha, double p) {
    if (!(t1 > 0.0)) throw std::invalid_argument("t1 must be > 0");
    detail::check_fraction(alpha, "alpha");
    detail::check_workers(p, "p");
    return ((1.0 - alpha) + alpha / p) * t1;
}

// Sp = p / (p - alpha (p - 1)).
inline double amdahl_speedup(double alpha, double p) {
    detail::check_fraction(alpha, "alpha");
    detail::check_workers(p, "p");
    return p / (p - alpha * (p - 1.0));
}

// Ep = 1 / ((1 - alpha) p + alpha).
inline double amdahl_efficiency(double alpha, double p) {
    detail::check_fraction(alpha, "alpha");
    detail::check_workers(p, "p");
    return 1.0 / ((1.0 - alpha) * p + alpha);
}

inline Metrics metrics_for(double t1, double alpha, double p) {
    Metrics m;
    m.t1 = t1;
    m.tp = parallel_time(t1, alpha, p);
    m.sp = m.t1 / m.tp;
    m.ep = m.sp / p;
    return m;
}

// Speedup bound for p -> infinity: 1/(1 - alpha). Fully parallel work has no
// bound; that case is an empty optional, never an infinity in reports.
inline std::optional<double> speedup_limit(double alpha) {
    detail::check_fraction(alpha, "alpha");
    if (alpha == 1.0) return std::nullopt;
    return 1.0 / (1.0 - alpha);
}

// Two-level product law: the run-level and in-run speedups multiply.
inline double tlp_speedup(double alpha1, double alpha2, double p1, double p2) {
    return amdahl_speedup(alpha1, p1) * amdahl_speedup(alpha2, p2);
}

inline double tlp_efficiency(double alpha1, double alpha2, double p1, double p2) {
    return tlp_speedup(alpha1, alpha2, p1, p2) / (p1 * p2);
}

// Effective sequential fraction once the in-run work is split p2 ways:
// beta* = beta / (beta + (1 - beta)/p2).
inline double beta_star(double beta, double p2) {
    detail::check_fraction(beta, "beta");
    detail::check_workers(p2, "p2");
    if (beta == 0.0) return 0.0;
    return beta / (beta + (1.0 - beta) / p2);
}

// Second-level speedup with over-allocated teams:
// S_p2 = 1 / (beta + (1 - beta)/(p2 (1 + PRI))).
inline double s_p2_with_pri(double beta, double p2, double pri) {
    detail::check_fraction(beta, "beta");
    detail::check_workers(p2, "p2");
    if (!(pri >= 0.0)) throw std::invalid_argument("pri must be >= 0");
    return 1.0 / (beta + (1.0 - beta) / (p2 * (1.0 + pri)));
}

// The PRI value beyond which requests outgrow what a uniform spread of the
// idle workers can supply: PRI* = (beta/(1 - beta)) (p2 - 1). Fully
// sequential work (beta = 1) has no finite threshold.
inline std::optional<double> pri_star(double beta, double p2) {
    detail::check_fraction(beta, "beta");
    detail::check_workers(p2, "p2");
    if (beta == 1.0) return std::nullopt;
    return beta / (1.0 - beta) * (p2 - 1.0);
}

// Residual of the uniform-idle-distribution balance:
//   [1 + (p - p1)/((1 - beta*) p1)] - (1 + PRI) p2.
// Zero at PRI = PRI* when p = p1 p2; exposed as a residual because the model
// only uses the equation to locate that threshold.
inline double pri_condition_check(double beta, double p, double p1, double p2, double pri) {
    detail::check_workers(p, "p");
    detail::check_workers(p1, "p1");
    if (!(pri >= 0.0)) throw std::invalid_argument("pri must be >= 0");
    const double bs = beta_star(beta, p2);
    if (bs == 1.0) throw std::invalid_argument("beta* = 1 leaves no parallel part to balance");
    return 1.0 + (p - p1) / ((1.0 - bs) * p1) - (1.0 + pri) * p2;
}

// One timed phase of a profile: either inside a parallel region or not.
struct PhaseSample {
    bool parallel = false;
    double seconds = 0.0;
};

// alpha = (time spent in parallel phases) / (total time). The workload mix
// is whatever the caller profiled; this is a measurement, not a fit.
inline double estimate_alpha(const std::vector<PhaseSample>& profile) {
    if (profile.empty()) throw std::invalid_argument("estimate_alpha: empty profile");
    double par = 0.0, total = 0.0;
    for (const auto& s : profile) {
        if (!(s.seconds >= 0.0))
            throw std::invalid_argument("estimate_alpha: negative phase duration");
        total += s.seconds;
        if (s.parallel) par += s.seconds;
    }
    if (!(total > 0.0)) throw std::invalid_argument("estimate_alpha: zero total time");
    return par / total;
}

}  // namespace dsmc
