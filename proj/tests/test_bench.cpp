#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "dsmc/bench.hpp"

using namespace dsmc;

static FlowProblem tiny_box() {
    FlowProblem p;
    p.grid = CellGrid::make_1d(1.0, 4);
    p.clock.dt = 0.05;
    p.clock.dt_s = 0.1;
    p.clock.dt_L = 0.2;
    p.clock.dt_av = 0.1;
    p.particle_weight = 0.02;
    p.surfaces[0].kind = SurfaceKind::Specular;
    p.surfaces[1].kind = SurfaceKind::Specular;
    p.collision = {true, 0.1, 6.0};
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.0;
    return p;
}

TEST_CASE("timing summaries report min, median, and spread", "[bench]") {
    const TimingStats odd = summarize_timings({3.0, 1.0, 2.0});
    REQUIRE(odd.repetitions == 3);
    REQUIRE(odd.min_s == 1.0);
    REQUIRE(odd.median_s == 2.0);
    REQUIRE(odd.seconds == std::vector<double>{3.0, 1.0, 2.0});  // order kept

    const TimingStats even = summarize_timings({4.0, 1.0, 3.0, 2.0});
    REQUIRE(even.median_s == 2.5);
    REQUIRE(even.min_s == 1.0);

    const TimingStats flat = summarize_timings({1.0, 1.0, 1.0});
    REQUIRE(flat.cv == 0.0);
    REQUIRE_FALSE(flat.high_variance);

    // mean 1, stddev 0.5: half the mean is far past the 10% flag.
    const TimingStats noisy = summarize_timings({0.5, 1.5});
    REQUIRE(noisy.cv == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(noisy.high_variance);

    REQUIRE_THROWS_AS(summarize_timings({}), std::invalid_argument);
    REQUIRE_THROWS_AS(measure_parent_time([] {}, 0), std::invalid_argument);
}

TEST_CASE("an empty task measures under ten milliseconds", "[bench]") {
    const TimingStats stats = measure_parent_time([] {}, 3);
    REQUIRE(stats.repetitions == 3);
    REQUIRE(stats.median_s >= 0.0);
    REQUIRE(stats.median_s < 0.010);
}

TEST_CASE("stage timings yield parallel fractions inside the unit interval", "[bench]") {
    const EnsembleResult ref = sequential_execute(tiny_box(), 2, 5);
    const AlphaEstimates alpha = estimate_levels(ref);
    REQUIRE(alpha.level1 >= 0.0);
    REQUIRE(alpha.level1 <= 1.0);
    REQUIRE(alpha.level2 >= 0.0);
    REQUIRE(alpha.level2 <= 1.0);
}

TEST_CASE("a bench run reports reference and grid rows with predictions", "[bench]") {
    const FlowProblem prob = tiny_box();
    StrategyConfig base;
    base.strategy = StrategyConfig::Strategy::Psir;
    base.n = 2;

    const BenchReport report = run_bench(prob, base, {1, 2}, 3, 77);
    REQUIRE(report.rows.size() == 3);
    REQUIRE(report.repetitions == 3);
    REQUIRE(report.physical_cores >= 1);

    const BenchRow& ref = report.rows[0];
    REQUIRE(ref.strategy == "sequential");
    REQUIRE(ref.stats.repetitions == 3);
    REQUIRE(ref.measured_speedup == 1.0);
    REQUIRE_FALSE(ref.validation_void);

    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const BenchRow& row = report.rows[i];
        REQUIRE(row.strategy == "psir");
        REQUIRE(row.stats.repetitions == 3);
        REQUIRE(row.stats.min_s <= row.stats.median_s);
        REQUIRE(row.measured_speedup > 0.0);
        REQUIRE(row.predicted_speedup >= 1.0);
        REQUIRE(row.predicted_speedup <= row.p + 1e-12);
        REQUIRE(row.validation_void == (row.p > report.physical_cores));
    }
    REQUIRE(report.rows[1].p == 1);
    REQUIRE(report.rows[2].p == 2);

    REQUIRE_THROWS_AS(run_bench(prob, base, {1, 2}, 2, 77), std::invalid_argument);
    REQUIRE_THROWS_AS(run_bench(prob, base, {}, 3, 77), std::invalid_argument);

    StrategyConfig seq;
    seq.strategy = StrategyConfig::Strategy::Sequential;
    seq.n = 2;
    REQUIRE_THROWS_AS(run_bench(prob, seq, {2}, 3, 77), std::invalid_argument);

    StrategyConfig tlp;
    tlp.strategy = StrategyConfig::Strategy::Tlp;
    tlp.n = 2;
    tlp.p1 = 2;
    REQUIRE_THROWS_AS(run_bench(prob, tlp, {3}, 3, 77), std::invalid_argument);
}

TEST_CASE("bench reports serialize with cores, alphas, and flag columns", "[bench]") {
    const FlowProblem prob = tiny_box();
    StrategyConfig base;
    base.strategy = StrategyConfig::Strategy::Psir;
    base.n = 2;
    const BenchReport report = run_bench(prob, base, {2}, 3, 31, {{"grid.kind", "1d"}});

    std::ostringstream out;
    write_bench_csv(out, report);
    const std::string text = out.str();
    REQUIRE(text.find("# master_seed = 31\n") != std::string::npos);
    REQUIRE(text.find("# physical_cores = ") != std::string::npos);
    REQUIRE(text.find("# alpha1_hat = ") != std::string::npos);
    REQUIRE(text.find("# alpha2_hat = ") != std::string::npos);
    REQUIRE(text.find("# grid.kind = 1d\n") != std::string::npos);
    REQUIRE(text.find("high_variance,validation_void") != std::string::npos);
    REQUIRE(text.find("sequential,2,1,1,1,") != std::string::npos);
    REQUIRE(text.find("psir,2,2,") != std::string::npos);

    std::size_t data_rows = 0;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);)
        if (line.rfind('#', 0) != 0) ++data_rows;
    REQUIRE(data_rows == 2);
}
