#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dsmc/rng.hpp"

using namespace dsmc;

// chi^2 inverse CDF at q = 0.999 for 99 degrees of freedom.
static constexpr double kChi2Crit99 = 148.23035916510173;

static double chi2_uniform(const std::vector<double>& u, int bins) {
    std::vector<int> count(static_cast<std::size_t>(bins), 0);
    for (double x : u) {
        auto b = static_cast<int>(x * bins);
        if (b == bins) b = bins - 1;
        ++count[static_cast<std::size_t>(b)];
    }
    const double expected = static_cast<double>(u.size()) / bins;
    double stat = 0.0;
    for (int c : count) {
        const double d = c - expected;
        stat += d * d / expected;
    }
    return stat;
}

TEST_CASE("run streams replay exactly for equal (seed, run)", "[rng]") {
    RngStream a = stream_for_run(12345, 7);
    RngStream b = stream_for_run(12345, 7);
    for (int i = 0; i < 1'000'000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    REQUIRE(a.counter == 1'000'000);
}

TEST_CASE("distinct runs are uncorrelated", "[rng]") {
    RngStream a = stream_for_run(12345, 0);
    RngStream b = stream_for_run(12345, 1);
    const int n = 1'000'000;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i) {
        const double x = a.uniform();
        const double y = b.uniform();
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double va = saa / n - (sa / n) * (sa / n);
    const double vb = sbb / n - (sb / n) * (sb / n);
    const double corr = cov / std::sqrt(va * vb);
    REQUIRE(std::abs(corr) < 0.01);
}

TEST_CASE("uniform draws pass a chi-square test", "[rng]") {
    RngStream s = stream_for_run(99, 3);
    std::vector<double> u;
    u.reserve(100'000);
    for (int i = 0; i < 100'000; ++i) {
        const double x = s.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        u.push_back(x);
    }
    REQUIRE(chi2_uniform(u, 100) < kChi2Crit99);
}

TEST_CASE("sub-streams are reproducible and mutually distinct", "[rng]") {
    const RngStream run = stream_for_run(2024, 5);

    RngStream c1 = substream(run, StreamDomain::CollisionCell, 17, 4);
    RngStream c2 = substream(run, StreamDomain::CollisionCell, 17, 4);
    for (int i = 0; i < 100; ++i) REQUIRE(c1.next_u64() == c2.next_u64());

    RngStream cell = substream(run, StreamDomain::CollisionCell, 17, 4);
    RngStream other_id = substream(run, StreamDomain::CollisionCell, 18, 4);
    RngStream other_step = substream(run, StreamDomain::CollisionCell, 17, 5);
    RngStream other_domain = substream(run, StreamDomain::MotionParticle, 17, 4);
    REQUIRE(cell.block != other_id.block);
    REQUIRE(cell.block != other_step.block);
    REQUIRE(cell.block != other_domain.block);
    REQUIRE(cell.next_u64() != other_id.next_u64());
    REQUIRE(cell.next_u64() != other_step.next_u64());
    REQUIRE(cell.next_u64() != other_domain.next_u64());

    // The cell-id convenience overload is the collision domain.
    RngStream a = substream(run, 17u, std::uint64_t{4});
    RngStream b = substream(run, StreamDomain::CollisionCell, 17, 4);
    REQUIRE(a.block == b.block);
    REQUIRE(a.key == b.key);
}

TEST_CASE("first outputs pooled across sub-streams stay uniform", "[rng]") {
    const RngStream run = stream_for_run(77, 1);
    std::vector<double> u;
    u.reserve(100'000);
    for (std::uint32_t cell = 0; cell < 100'000; ++cell) {
        RngStream s = substream(run, cell, std::uint64_t{12});
        u.push_back(s.uniform());
    }
    REQUIRE(chi2_uniform(u, 100) < kChi2Crit99);
}

TEST_CASE("sub-stream field widths are enforced", "[rng]") {
    const RngStream run = stream_for_run(1, 0);
    REQUIRE_THROWS_AS(substream(run, StreamDomain::CollisionCell, 1u << 30, 0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(substream(run, StreamDomain::CollisionCell, 0, 1ull << 32),
                      std::invalid_argument);
    REQUIRE_NOTHROW(substream(run, StreamDomain::CollisionCell, (1u << 30) - 1,
                              (1ull << 32) - 1));
}

TEST_CASE("maxwellian samples have the requested moments", "[rng]") {
    const double T = 2.5;
    const std::array<double, 3> drift{0.3, -0.1, 0.2};
    const int n = 100'000;

    RngStream s = stream_for_run(31415, 2);
    std::array<double, 3> sum{0, 0, 0};
    std::array<double, 3> sum2{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const auto v = sample_maxwellian(s, T, drift);
        for (int a = 0; a < 3; ++a) {
            sum[static_cast<std::size_t>(a)] += v[static_cast<std::size_t>(a)];
            sum2[static_cast<std::size_t>(a)] +=
                v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
        }
    }
    const double var_expected = 0.5 * T;  // per component
    const double mean_tol = 3.0 * std::sqrt(var_expected / n);
    const double var_tol = 3.0 * std::sqrt(2.0 * var_expected * var_expected / n);
    for (int a = 0; a < 3; ++a) {
        const double mean = sum[static_cast<std::size_t>(a)] / n;
        const double var =
            sum2[static_cast<std::size_t>(a)] / n - mean * mean;
        REQUIRE(std::abs(mean - drift[static_cast<std::size_t>(a)]) < mean_tol);
        REQUIRE(std::abs(var - var_expected) < var_tol);
    }
}

TEST_CASE("maxwellian sampling rejects nonpositive temperature", "[rng]") {
    RngStream s = stream_for_run(1, 0);
    REQUIRE_THROWS_AS(sample_maxwellian(s, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_maxwellian(s, -1.5), std::invalid_argument);
}
