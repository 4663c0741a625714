// Command-line front end: run flow problems under a chosen parallel
// strategy, time them against the speedup model, evaluate the model
// directly, and drive the scheduler simulator. All tabular output goes to
// CSV files; the default output directory comes from DSMC_OUT_DIR.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsmc/bench.hpp"
#include "dsmc/config.hpp"
#include "dsmc/csv.hpp"
#include "dsmc/exec.hpp"
#include "dsmc/perf_model.hpp"
#include "dsmc/sched_sim.hpp"

namespace {

// The built-in problem when no config file is given: an equilibrium
// relaxation box, small enough that every subcommand responds in seconds.
dsmc::LoadedConfig default_config() {
    return dsmc::parse_config(R"(
[grid]
kind = 1d
length_x = 1.0
cells_x = 8

[clock]
dt = 0.01
dt_s = 0.1
dt_L = 0.6
dt_av = 0.1

[gas]
particle_weight = 0.001

[surfaces]
left = specular
right = specular

[collision]
enabled = true
diameter = 0.05
crmax_initial = 8.0

[initial_fill]
density = 1.0
temperature = 1.8
)");
}

std::string output_directory() {
    const char* env = std::getenv("DSMC_OUT_DIR");
    return env && *env ? env : ".";
}

std::string resolve_out(const std::string& explicit_path, const std::string& fallback_name) {
    if (!explicit_path.empty()) return explicit_path;
    return output_directory() + "/" + fallback_name;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    return os;
}

void print_value(double v) { std::printf("%.6g\n", v); }

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct StrategyFlags {
    std::string name;
    int n = 0;
    int p = 0;
    int p1 = 0;
    int p2 = 0;
    double pri = -1.0;

    // Config-file values fill anything the command line left unset.
    dsmc::StrategyConfig merge_into(dsmc::StrategyConfig cfg) const {
        if (!name.empty()) cfg.strategy = dsmc::strategy_from_name(name);
        if (n > 0) cfg.n = n;
        if (p1 > 0) cfg.p1 = p1;
        if (p2 > 0) cfg.p2 = p2;
        if (pri >= 0.0) cfg.pri = pri;
        if (p > 0)
            cfg.p = p;
        else if (!name.empty() || p1 > 0 || p2 > 0)
            cfg.p = 0;  // stale total from the config; re-derive from the parts
        return cfg;
    }

    void attach(CLI::App& cmd, bool with_p = true) {
        cmd.add_option("--strategy", name, "sequential, psir, dp, tlp, or tlpdpr");
        cmd.add_option("--n", n, "ensemble size (independent runs)");
        if (with_p) cmd.add_option("--p", p, "total workers");
        cmd.add_option("--p1", p1, "run-level workers (tlp, tlpdpr)");
        cmd.add_option("--p2", p2, "team width per run (dp, tlp)");
        cmd.add_option("--pri", pri, "over-allocation parameter (tlpdpr)");
    }
};

dsmc::HeaderFields strategy_fields(const dsmc::StrategyConfig& cfg) {
    dsmc::HeaderFields out;
    out.emplace_back("strategy", dsmc::strategy_name(cfg.strategy));
    out.emplace_back("n", std::to_string(cfg.n));
    out.emplace_back("p", std::to_string(cfg.p));
    out.emplace_back("p1", std::to_string(cfg.p1));
    out.emplace_back("p2", std::to_string(cfg.p2));
    out.emplace_back("pri", dsmc::format_double(cfg.pri));
    return out;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

int run_simulate(const std::string& config_path, const StrategyFlags& flags,
                 std::uint64_t seed, const std::string& out_path) {
    dsmc::LoadedConfig cfg =
        config_path.empty() ? default_config() : dsmc::load_config(config_path);
    print_warnings(cfg.warnings);
    dsmc::StrategyConfig strategy = flags.merge_into(cfg.strategy);
    strategy.normalize();

    const dsmc::EnsembleResult result = dsmc::run_strategy(cfg.problem, strategy, seed);
    print_warnings(result.warnings);

    const std::string path = resolve_out(out_path, "snapshot.csv");
    dsmc::HeaderFields extra = strategy_fields(strategy);
    for (const auto& kv : cfg.echo) extra.push_back(kv);
    {
        auto os = open_out(path);
        dsmc::write_snapshot_csv(os, cfg.problem, result, seed, extra);
    }
    std::cout << path << "\n";

    if (!result.alloc_log.empty()) {
        const std::string alloc_path = with_suffix(path, "_alloc");
        auto os = open_out(alloc_path);
        dsmc::write_alloc_csv(os, result.alloc_log, seed, strategy_fields(strategy));
        std::cout << alloc_path << "\n";
    }
    return 0;
}

int run_bench_cmd(const std::string& config_path, const StrategyFlags& flags,
                  const std::vector<int>& grid, int reps, std::uint64_t seed,
                  const std::string& out_path) {
    dsmc::LoadedConfig cfg =
        config_path.empty() ? default_config() : dsmc::load_config(config_path);
    print_warnings(cfg.warnings);
    dsmc::StrategyConfig strategy = flags.merge_into(cfg.strategy);
    if (strategy.strategy == dsmc::StrategyConfig::Strategy::Sequential && flags.name.empty())
        throw std::invalid_argument("bench: pick a strategy to time with --strategy");

    const dsmc::BenchReport report =
        dsmc::run_bench(cfg.problem, strategy, grid, reps, seed, cfg.echo);
    for (const auto& row : report.rows)
        if (row.validation_void)
            std::cerr << "warning: " << row.strategy << " at p = " << row.p
                      << " exceeds the " << report.physical_cores
                      << " physical cores; model validation void\n";

    const std::string path = resolve_out(out_path, "bench.csv");
    auto os = open_out(path);
    dsmc::write_bench_csv(os, report);
    std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensemble gas-flow simulator with a parallel speedup model"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::uint64_t seed = 12345;

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a flow problem, write snapshot CSV");
    StrategyFlags sim_flags;
    simulate->add_option("--config", config_path, "problem config file");
    sim_flags.attach(*simulate);
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--out", out_path, "output CSV path");

    // bench
    auto* bench = app.add_subcommand("bench", "time a strategy over a worker grid");
    StrategyFlags bench_flags;
    std::vector<int> bench_grid{1, 2, 4};
    int bench_reps = 3;
    bench->add_option("--config", config_path, "problem config file");
    bench_flags.attach(*bench, /*with_p=*/false);
    bench->add_option("--p", bench_grid, "worker counts, comma separated")->delimiter(',');
    bench->add_option("--reps", bench_reps, "repetitions per point (>= 3)");
    bench->add_option("--seed", seed, "master seed");
    bench->add_option("--out", out_path, "output CSV path");

    // model
    auto* model = app.add_subcommand("model", "evaluate the speedup model");
    model->require_subcommand(1);
    double alpha = 0.0, alpha2 = 0.0, beta = 0.0, pri = 0.0;
    int p = 1, p1 = 1, p2 = 1;

    auto* m_amdahl = model->add_subcommand("amdahl", "first-level speedup");
    m_amdahl->add_option("--alpha", alpha, "parallel fraction")->required();
    m_amdahl->add_option("--p", p, "workers")->required();

    auto* m_eff = model->add_subcommand("efficiency", "first-level efficiency");
    m_eff->add_option("--alpha", alpha, "parallel fraction")->required();
    m_eff->add_option("--p", p, "workers")->required();

    auto* m_limit = model->add_subcommand("limit", "speedup bound for unlimited workers");
    m_limit->add_option("--alpha", alpha, "parallel fraction")->required();

    auto* m_tlp = model->add_subcommand("tlp", "two-level speedup");
    m_tlp->add_option("--alpha1", alpha, "ensemble-level parallel fraction")->required();
    m_tlp->add_option("--alpha2", alpha2, "run-level parallel fraction")->required();
    m_tlp->add_option("--p1", p1, "run-level workers")->required();
    m_tlp->add_option("--p2", p2, "team width")->required();

    auto* m_bstar = model->add_subcommand("betastar", "effective sequential fraction");
    m_bstar->add_option("--beta", beta, "sequential fraction")->required();
    m_bstar->add_option("--p2", p2, "team width")->required();

    auto* m_pstar = model->add_subcommand("pristar", "over-allocation threshold");
    m_pstar->add_option("--beta", beta, "sequential fraction")->required();
    m_pstar->add_option("--p2", p2, "team width")->required();

    auto* m_boost = model->add_subcommand("boosted", "second-level speedup with spare workers");
    m_boost->add_option("--beta", beta, "sequential fraction")->required();
    m_boost->add_option("--p2", p2, "team width")->required();
    m_boost->add_option("--pri", pri, "over-allocation parameter")->required();

    // sweep: model curves on a grid
    auto* sweep = app.add_subcommand("sweep", "tabulate model curves to CSV");
    sweep->require_subcommand(1);

    auto* s_amdahl = sweep->add_subcommand("amdahl", "speedup and efficiency over workers");
    std::vector<int> p_grid{1, 2, 4, 8, 16, 32};
    s_amdahl->add_option("--alpha", alpha, "parallel fraction")->required();
    s_amdahl->add_option("--p", p_grid, "worker counts, comma separated")->delimiter(',');
    s_amdahl->add_option("--seed", seed, "seed stamped in the header");
    s_amdahl->add_option("--out", out_path, "output CSV path");

    auto* s_pri = sweep->add_subcommand("pri", "second-level speedup over request sizes");
    std::vector<double> pri_grid;
    s_pri->add_option("--beta", beta, "sequential fraction")->required();
    s_pri->add_option("--p2", p2, "team width")->required();
    s_pri->add_option("--pri", pri_grid, "request sizes, comma separated")
        ->delimiter(',')
        ->required();
    s_pri->add_option("--seed", seed, "seed stamped in the header");
    s_pri->add_option("--out", out_path, "output CSV path");

    // sim: scheduler model
    auto* sim = app.add_subcommand("sim", "discrete-event scheduler simulation");
    sim->require_subcommand(1);
    double stagger = 0.1;
    int runs = 0, pairs = 4;
    double run_length = 1.0;

    auto* sim_run = sim->add_subcommand("run", "simulate one configuration");
    sim_run->add_option("--beta", beta, "sequential fraction")->required();
    sim_run->add_option("--p1", p1, "leaders")->required();
    sim_run->add_option("--p", p, "total workers")->required();
    sim_run->add_option("--pri", pri, "over-allocation parameter");
    sim_run->add_option("--n", runs, "runs (default 4 per leader)");
    sim_run->add_option("--pairs", pairs, "phase pairs per run");
    sim_run->add_option("--run-length", run_length, "work per run");
    sim_run->add_option("--stagger", stagger, "max random start offset");
    sim_run->add_option("--seed", seed, "offset seed");
    sim_run->add_option("--out", out_path, "allocation log CSV path (optional)");

    auto* sim_pri = sim->add_subcommand("pri", "sweep request sizes against the model");
    std::vector<double> sim_pri_grid;
    sim_pri->add_option("--beta", beta, "sequential fraction")->required();
    sim_pri->add_option("--p1", p1, "leaders")->required();
    sim_pri->add_option("--p", p, "total workers")->required();
    sim_pri->add_option("--pri", sim_pri_grid, "request sizes, comma separated")
        ->delimiter(',')
        ->required();
    sim_pri->add_option("--n", runs, "runs (default 4 per leader)");
    sim_pri->add_option("--pairs", pairs, "phase pairs per run");
    sim_pri->add_option("--run-length", run_length, "work per run");
    sim_pri->add_option("--stagger", stagger, "max random start offset");
    sim_pri->add_option("--seed", seed, "offset seed");
    sim_pri->add_option("--out", out_path, "output CSV path");

    auto* sim_cmp = sim->add_subcommand("compare", "static versus borrowed teams over p2");
    std::vector<int> p2_grid;
    sim_cmp->add_option("--beta", beta, "sequential fraction")->required();
    sim_cmp->add_option("--p1", p1, "leaders")->required();
    sim_cmp->add_option("--p", p, "total workers")->required();
    sim_cmp->add_option("--p2", p2_grid, "team widths, comma separated")
        ->delimiter(',')
        ->required();
    sim_cmp->add_option("--n", runs, "runs (default 4 per leader)");
    sim_cmp->add_option("--stagger", stagger, "max random start offset");
    sim_cmp->add_option("--seed", seed, "offset seed");
    sim_cmp->add_option("--out", out_path, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return run_simulate(config_path, sim_flags, seed, out_path);

        if (bench->parsed())
            return run_bench_cmd(config_path, bench_flags, bench_grid, bench_reps, seed,
                                 out_path);

        if (m_amdahl->parsed()) {
            print_value(dsmc::amdahl_speedup(alpha, p));
            return 0;
        }
        if (m_eff->parsed()) {
            print_value(dsmc::amdahl_efficiency(alpha, p));
            return 0;
        }
        if (m_limit->parsed()) {
            const auto lim = dsmc::speedup_limit(alpha);
            if (lim) print_value(*lim);
            else std::printf("unbounded\n");
            return 0;
        }
        if (m_tlp->parsed()) {
            print_value(dsmc::tlp_speedup(alpha, alpha2, p1, p2));
            return 0;
        }
        if (m_bstar->parsed()) {
            print_value(dsmc::beta_star(beta, p2));
            return 0;
        }
        if (m_pstar->parsed()) {
            const auto star = dsmc::pri_star(beta, p2);
            if (star) print_value(*star);
            else std::printf("unbounded\n");
            return 0;
        }
        if (m_boost->parsed()) {
            print_value(dsmc::s_p2_with_pri(beta, p2, pri));
            return 0;
        }

        if (s_amdahl->parsed()) {
            const std::string path = resolve_out(out_path, "model_amdahl.csv");
            auto os = open_out(path);
            dsmc::detail_csv::write_header(os, "speedup model over workers", seed,
                                           {{"alpha", dsmc::format_double(alpha)}},
                                           "speedup and efficiency dimensionless",
                                           "p,speedup,efficiency");
            for (int point : p_grid)
                os << point << ',' << dsmc::format_double(dsmc::amdahl_speedup(alpha, point))
                   << ',' << dsmc::format_double(dsmc::amdahl_efficiency(alpha, point))
                   << '\n';
            std::cout << path << "\n";
            return 0;
        }
        if (s_pri->parsed()) {
            const std::string path = resolve_out(out_path, "model_pri.csv");
            auto os = open_out(path);
            dsmc::detail_csv::write_header(
                os, "second-level speedup over request sizes", seed,
                {{"beta", dsmc::format_double(beta)}, {"p2", std::to_string(p2)}},
                "pri dimensionless; speedup relative to one leader team", "pri,speedup");
            for (double point : pri_grid)
                os << dsmc::format_double(point) << ','
                   << dsmc::format_double(dsmc::s_p2_with_pri(beta, p2, point)) << '\n';
            std::cout << path << "\n";
            return 0;
        }

        if (sim_run->parsed() || sim_pri->parsed()) {
            dsmc::RunProfile prof;
            prof.phases = dsmc::make_uniform_profile(beta, pairs, run_length);
            prof.p1 = p1;
            prof.p = p;
            prof.n = runs > 0 ? runs : 4 * p1;
            prof.stagger = stagger;
            prof.seed = seed;
            if (sim_run->parsed()) {
                prof.pri = pri;
                const dsmc::SimOutcome out = dsmc::simulate(prof);
                std::printf("makespan %.6g\n", out.makespan);
                std::printf("speedup_vs_one_worker %.6g\n", out.speedup_vs_one_worker);
                std::printf("second_level_speedup %.6g\n", out.second_level_speedup);
                if (!out_path.empty()) {
                    auto os = open_out(out_path);
                    dsmc::write_alloc_csv(os, out.alloc_log, seed);
                    std::cout << out_path << "\n";
                }
                return 0;
            }
            const auto rows = dsmc::sweep_pri(prof, sim_pri_grid);
            const std::string path = resolve_out(out_path, "pri_sweep.csv");
            auto os = open_out(path);
            dsmc::write_pri_sweep_csv(os, rows, seed,
                                      {{"beta", dsmc::format_double(beta)},
                                       {"p1", std::to_string(p1)},
                                       {"p", std::to_string(p)}});
            std::cout << path << "\n";
            return 0;
        }
        if (sim_cmp->parsed()) {
            const auto rows = dsmc::compare_tlp_vs_tlpdpr(beta, p1, p, p2_grid,
                                                          runs > 0 ? runs : 0, stagger, seed);
            const std::string path = resolve_out(out_path, "strategy_sweep.csv");
            auto os = open_out(path);
            dsmc::write_strategy_sweep_csv(os, rows, seed,
                                           {{"beta", dsmc::format_double(beta)},
                                            {"p1", std::to_string(p1)},
                                            {"p", std::to_string(p)}});
            std::cout << path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
