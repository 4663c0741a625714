#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dsmc/kernel.hpp"

using namespace dsmc;

// Kolmogorov-Smirnov acceptance threshold at significance 0.001.
static constexpr double kKs999 = 1.9494746035204051;

static double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

static FlowProblem closed_box_1d(int nx, double dt, double dt_s, double dt_L) {
    FlowProblem p;
    p.grid = CellGrid::make_1d(1.0, nx);
    p.clock.dt = dt;
    p.clock.dt_s = dt_s;
    p.clock.dt_L = dt_L;
    p.clock.dt_av = dt_s;
    p.surfaces[0].kind = SurfaceKind::Specular;
    p.surfaces[1].kind = SurfaceKind::Specular;
    p.collision.enabled = false;
    return p;
}

TEST_CASE("no inflow generates nothing", "[kernel][generation]") {
    FlowProblem p = closed_box_1d(4, 0.1, 0.1, 0.2);
    KernelState st;
    st.root = stream_for_run(1, 0);
    st.crmax.assign(4, 1.0);
    REQUIRE(generate_particles(st, p, 1) == 0);
    REQUIRE(st.store.empty());
}

TEST_CASE("generation count tracks the effusive flux", "[kernel][generation]") {
    FlowProblem p;
    p.grid = CellGrid::make_1d(10.0, 10);
    p.clock.dt = 0.5;
    p.clock.dt_s = 0.5;
    p.clock.dt_L = 1.0;
    p.clock.dt_av = 0.5;
    p.particle_weight = 0.01;
    p.surfaces[0].kind = SurfaceKind::Vacuum;
    p.surfaces[1].kind = SurfaceKind::Vacuum;
    p.collision.enabled = false;
    InflowSpec in;
    in.face = Face::Left;
    in.density = 2.0;
    in.temperature = 1.0;
    p.inflows.push_back(in);

    const double rate = p.inflow_rate_per_step(in);
    REQUIRE(rate == Catch::Approx(2.0 * 0.282094791773878 * 0.5 / 0.01).epsilon(1e-12));

    KernelState st;
    st.root = stream_for_run(2718, 0);
    st.crmax.assign(10, 1.0);
    const int steps = 3000;
    std::uint64_t born = 0;
    for (int s = 1; s <= steps; ++s) {
        born += generate_particles(st, p, static_cast<std::uint64_t>(s));
        st.store.clear();  // only the counts matter here
    }
    const double frac = rate - std::floor(rate);
    const double expected = rate * steps;
    const double sigma = std::sqrt(steps * frac * (1.0 - frac));
    REQUIRE(std::abs(static_cast<double>(born) - expected) < 3.0 * sigma);
}

TEST_CASE("inbound flux speeds match the tilted-Rayleigh law", "[kernel][generation]") {
    // CDF of w with density ~ w exp(-(w/vmp - s)^2), via
    // G(z) = -exp(-z^2)/2 + s sqrt(pi)/2 erf(z).
    const double T = 2.0;
    const double s = 1.5;
    const double vmp = std::sqrt(T);
    auto G = [&](double z) {
        return -0.5 * std::exp(-z * z) + 0.5 * s * std::sqrt(M_PI) * std::erf(z);
    };
    const double lo = G(-s);
    const double norm = 0.5 * s * std::sqrt(M_PI) - lo;
    auto cdf = [&](double w) { return (G(w / vmp - s) - lo) / norm; };

    RngStream rng = stream_for_run(90210, 0);
    std::vector<double> xs;
    const int n = 20'000;
    xs.reserve(n);
    for (int i = 0; i < n; ++i)
        xs.push_back(detail::sample_flux_normal_speed(T, s * vmp, rng));
    REQUIRE(ks_statistic(xs, cdf) < kKs999 / std::sqrt(n));
}

TEST_CASE("zero-drift flux speeds match the plain Rayleigh law", "[kernel][generation]") {
    const double T = 0.5;
    const double vmp = std::sqrt(T);
    auto cdf = [&](double w) { return 1.0 - std::exp(-(w / vmp) * (w / vmp)); };
    RngStream rng = stream_for_run(90211, 0);
    std::vector<double> xs;
    const int n = 20'000;
    xs.reserve(n);
    for (int i = 0; i < n; ++i) xs.push_back(detail::sample_flux_normal_speed(T, 0.0, rng));
    REQUIRE(ks_statistic(xs, cdf) < kKs999 / std::sqrt(n));
}

TEST_CASE("specular walls fold the trajectory exactly", "[kernel][motion]") {
    FlowProblem p = closed_box_1d(4, 1.0, 1.0, 2.0);
    RngStream rng = stream_for_run(5, 0);

    Particle a;
    a.position = {0.3, 0.0};
    a.velocity = {-1.0, 0.0, 0.0};
    REQUIRE(detail::advance_with_boundaries(a, p, 1.0, rng));
    REQUIRE(a.position[0] == Catch::Approx(0.7).margin(1e-12));
    REQUIRE(a.velocity[0] == 1.0);

    Particle b;
    b.position = {0.3, 0.0};
    b.velocity = {-2.6, 0.0, 0.0};
    REQUIRE(detail::advance_with_boundaries(b, p, 1.0, rng));
    REQUIRE(b.position[0] == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(b.velocity[0] == 2.6);  // three reflections
}

TEST_CASE("open faces absorb, including a hit exactly at the step end", "[kernel][motion]") {
    FlowProblem p = closed_box_1d(4, 1.0, 1.0, 2.0);
    p.surfaces[1].kind = SurfaceKind::Vacuum;
    RngStream rng = stream_for_run(6, 0);

    Particle a;
    a.position = {0.9, 0.0};
    a.velocity = {1.0, 0.0, 0.0};
    REQUIRE_FALSE(detail::advance_with_boundaries(a, p, 0.2, rng));

    Particle b;
    b.position = {0.8, 0.0};
    b.velocity = {1.0, 0.0, 0.0};
    REQUIRE_FALSE(detail::advance_with_boundaries(b, p, 0.2, rng));  // lands on the face
}

TEST_CASE("diffuse re-emission obeys the wall Maxwellian", "[kernel][motion]") {
    const double Tw = 2.0;
    const double vmp = std::sqrt(Tw);
    RngStream rng = stream_for_run(333, 0);
    const int n = 100'000;
    std::vector<double> normal_speed;
    normal_speed.reserve(n);
    double tsum = 0.0, tsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Velocity v{0, 0, 0};
        detail::diffuse_emit(v, Tw, 0, 1.0, rng);
        REQUIRE(v[0] >= 0.0);
        normal_speed.push_back(v[0]);
        tsum += v[1];
        tsum2 += v[1] * v[1];
    }
    auto cdf = [&](double w) { return 1.0 - std::exp(-(w / vmp) * (w / vmp)); };
    REQUIRE(ks_statistic(normal_speed, cdf) < kKs999 / std::sqrt(n));

    const double mean = tsum / n;
    const double var = tsum2 / n - mean * mean;
    REQUIRE(std::abs(mean) < 3.0 * std::sqrt(0.5 * Tw / n));
    REQUIRE(std::abs(var - 0.5 * Tw) < 3.0 * std::sqrt(2.0) * 0.5 * Tw / std::sqrt(n));
}

TEST_CASE("diffuse wall turns the particle back into the domain", "[kernel][motion]") {
    FlowProblem p = closed_box_1d(4, 1.0, 1.0, 2.0);
    p.surfaces[0] = {SurfaceKind::Diffuse, 1.5};
    RngStream rng = stream_for_run(7, 0);
    for (int i = 0; i < 200; ++i) {
        Particle a;
        a.position = {0.05, 0.0};
        a.velocity = {-5.0, 0.0, 0.0};
        REQUIRE(detail::advance_with_boundaries(a, p, 0.02, rng));
        REQUIRE(a.position[0] >= 0.0);
        REQUIRE(a.velocity[0] >= 0.0);
    }
}

TEST_CASE("internal body reflects and never swallows a surface particle", "[kernel][motion]") {
    FlowProblem p;
    p.grid = CellGrid::make_2d(1.0, 1.0, 4, 4);
    p.clock.dt = 1.0;
    p.clock.dt_s = 1.0;
    p.clock.dt_L = 2.0;
    p.clock.dt_av = 1.0;
    p.surfaces[0].kind = SurfaceKind::Specular;
    p.surfaces[1].kind = SurfaceKind::Specular;
    p.surfaces[2].kind = SurfaceKind::Specular;
    p.surfaces[3].kind = SurfaceKind::Specular;
    p.body = BodySpec{{0.4, 0.4}, {0.6, 0.6}, SurfaceKind::Specular, 1.0};
    p.collision.enabled = false;
    RngStream rng = stream_for_run(8, 0);

    Particle a;  // bounces off the body, then the left wall
    a.position = {0.1, 0.5};
    a.velocity = {1.0, 0.0, 0.0};
    REQUIRE(detail::advance_with_boundaries(a, p, 1.0, rng));
    REQUIRE(a.position[0] == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(a.position[1] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(a.velocity[0] == 1.0);

    Particle b;  // starts on the body face moving away; must not be captured
    b.position = {0.4, 0.5};
    b.velocity = {-1.0, 0.0, 0.0};
    REQUIRE(detail::advance_with_boundaries(b, p, 1.0, rng));
    REQUIRE(b.position[0] == Catch::Approx(0.2).margin(1e-12));
    REQUIRE(b.velocity[0] == -1.0);

    Particle c;  // passes beside the body untouched
    c.position = {0.1, 0.2};
    c.velocity = {0.5, 0.0, 0.0};
    REQUIRE(detail::advance_with_boundaries(c, p, 1.0, rng));
    REQUIRE(c.position[0] == Catch::Approx(0.6).margin(1e-12));
    REQUIRE(c.position[1] == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("collisions conserve momentum and energy", "[kernel][collision]") {
    FlowProblem p = closed_box_1d(1, 0.05, 0.05, 0.1);
    p.collision = {true, 0.2, 8.0};
    p.particle_weight = 0.5;

    KernelState st;
    st.root = stream_for_run(1234, 3);
    st.crmax.assign(1, p.collision.crmax_initial);
    RngStream init = stream_for_run(999, 0);
    for (int i = 0; i < 200; ++i) {
        Particle q;
        q.position = {init.uniform(), 0.0};
        q.velocity = sample_maxwellian(init, 1.3);
        st.store.append(q);
    }
    const CellIndex idx = enumerate_and_index(st.store, p.grid);

    Velocity mom0{0, 0, 0};
    double e0 = 0.0;
    for (const auto& q : st.store.items()) {
        for (int k = 0; k < 3; ++k) mom0[k] += q.velocity[k];
        e0 += speed_squared(q.velocity);
    }

    std::uint64_t acc = 0;
    for (std::uint64_t s = 1; s <= 50; ++s) acc += collide_one_cell(st, p, idx, 0, s);
    REQUIRE(acc > 100);  // the check must actually exercise collisions

    Velocity mom1{0, 0, 0};
    double e1 = 0.0;
    for (const auto& q : st.store.items()) {
        for (int k = 0; k < 3; ++k) mom1[k] += q.velocity[k];
        e1 += speed_squared(q.velocity);
    }
    for (int k = 0; k < 3; ++k) REQUIRE(std::abs(mom1[k] - mom0[k]) < 1e-12 * e0);
    REQUIRE(std::abs(e1 - e0) < 1e-12 * e0);
}

TEST_CASE("equilibrium collision tally matches the hard-sphere rate", "[kernel][collision]") {
    FlowProblem p = closed_box_1d(1, 0.05, 0.05, 0.1);
    p.collision = {true, 0.02, 8.0};
    p.particle_weight = 0.01;

    KernelState st;
    st.root = stream_for_run(4242, 1);
    st.crmax.assign(1, p.collision.crmax_initial);
    RngStream init = stream_for_run(555, 0);
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        Particle q;
        q.position = {init.uniform(), 0.0};
        q.velocity = sample_maxwellian(init, 1.0);
        st.store.append(q);
    }
    const CellIndex idx = enumerate_and_index(st.store, p.grid);

    // Rate oracle from the realized sample: mean pair relative speed at t=0.
    double cr_sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Velocity r{st.store[i].velocity[0] - st.store[j].velocity[0],
                       st.store[i].velocity[1] - st.store[j].velocity[1],
                       st.store[i].velocity[2] - st.store[j].velocity[2]};
            cr_sum += std::sqrt(speed_squared(r));
        }
    const double cr_mean = cr_sum / (0.5 * n * (n - 1.0));
    // Against the Maxwellian value 2 sqrt(2T/pi) this sits within a percent.
    REQUIRE(cr_mean == Catch::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(0.02));

    const double coeff = 0.5 * n * (n - 1.0) * p.particle_weight * M_PI *
                         p.collision.diameter * p.collision.diameter * p.clock.dt /
                         p.grid.cell_volume;
    const int steps = 1500;
    std::uint64_t acc = 0;
    for (std::uint64_t s = 1; s <= steps; ++s) acc += collide_one_cell(st, p, idx, 0, s);

    const double mu = coeff * cr_mean * steps;
    // Poisson scatter plus a small drift allowance for the relaxing sample.
    const double tol = 3.0 * std::sqrt(mu) + 0.02 * mu;
    REQUIRE(std::abs(static_cast<double>(acc) - mu) < tol);
}

TEST_CASE("snapshot sums agree with a hand count", "[kernel][sampling]") {
    FlowProblem p = closed_box_1d(2, 0.1, 0.1, 0.2);
    KernelState st;
    st.root = stream_for_run(1, 1);
    st.crmax.assign(2, 1.0);
    st.store.append({{0.1, 0.0}, {1.0, 2.0, 0.0}});
    st.store.append({{0.2, 0.0}, {-1.0, 0.0, 1.0}});
    st.store.append({{0.9, 0.0}, {0.5, 0.0, 0.0}});
    const CellIndex idx = enumerate_and_index(st.store, p.grid);
    const Snapshot snap = take_snapshot(st, p.grid, idx, 0.3);

    REQUIRE(snap.t == 0.3);
    REQUIRE(snap.cells.size() == 2);
    REQUIRE(snap.cells[0].sample_count == 1);
    REQUIRE(snap.cells[0].sum_n == 2.0);
    REQUIRE(snap.cells[0].sum_v[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(snap.cells[0].sum_v[1] == Catch::Approx(2.0));
    REQUIRE(snap.cells[0].sum_v2 == Catch::Approx(5.0 + 2.0));
    REQUIRE(snap.cells[1].sum_n == 1.0);
    REQUIRE(snap.cells[1].sum_v2 == Catch::Approx(0.25));
}

TEST_CASE("closed box keeps every particle for a thousand steps", "[kernel][run]") {
    FlowProblem p = closed_box_1d(4, 0.01, 0.1, 10.0);
    p.collision = {true, 0.05, 8.0};
    p.particle_weight = 0.002;
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.0;

    const RunResult r = run_unsteady(p, 77, 0);
    REQUIRE(r.particle_count_history.size() == 1000);
    const std::uint64_t n0 = r.particle_count_history.front();
    REQUIRE(n0 > 400);
    for (std::uint64_t c : r.particle_count_history) REQUIRE(c == n0);
    REQUIRE(r.collision_count > 0);
    REQUIRE(r.snapshots.size() == 99);
    REQUIRE(r.meta.sync_points == 0);  // serial executor
}

TEST_CASE("specular box with collisions conserves energy over a run", "[kernel][run]") {
    FlowProblem p = closed_box_1d(4, 0.01, 0.05, 0.5);
    p.collision = {true, 0.1, 8.0};
    p.particle_weight = 0.002;
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.8;

    // Drive the stages by hand to see the store at both ends.
    KernelState st;
    st.root = stream_for_run(31, 0);
    st.crmax.assign(4, p.collision.crmax_initial);
    initial_fill_particles(st, p);
    double e0 = 0.0;
    for (const auto& q : st.store.items()) e0 += speed_squared(q.velocity);

    SerialExecutor exec;
    for (std::int64_t s = 1; s <= p.clock.total_steps(); ++s) {
        const std::size_t n_pre = st.store.size();
        generate_particles(st, p, static_cast<std::uint64_t>(s));
        move_particles(st, p, static_cast<std::uint64_t>(s), n_pre, exec);
        const CellIndex idx = readdress_particles(st, p);
        collide_cells(st, p, idx, static_cast<std::uint64_t>(s), exec);
    }
    double e1 = 0.0;
    for (const auto& q : st.store.items()) e1 += speed_squared(q.velocity);
    REQUIRE(e1 == Catch::Approx(e0).epsilon(1e-9));
}

TEST_CASE("equilibrium box reproduces the fill temperature", "[kernel][run]") {
    FlowProblem p = closed_box_1d(1, 0.02, 0.1, 0.6);
    p.collision = {true, 0.05, 8.0};
    p.particle_weight = 0.0005;
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.8;

    const RunResult r = run_unsteady(p, 1001, 4);
    REQUIRE(r.snapshots.size() == 5);
    const std::size_t n = static_cast<std::size_t>(r.snapshots.back().cells[0].sum_n);
    REQUIRE(n > 1000);
    const Macroparameters m =
        derive_macroparameters(r.snapshots.back().cells[0], p.particle_weight, p.grid.cell_volume);
    REQUIRE(m.density == Catch::Approx(1.0).epsilon(0.1));
    // Var(T-hat) ~ 2T^2/(3N) for a Maxwellian sample of size N.
    const double sigma = 1.8 * std::sqrt(2.0 / (3.0 * static_cast<double>(n)));
    REQUIRE(std::abs(m.temperature - 1.8) < 3.0 * sigma);
    REQUIRE(std::abs(m.bulk[0]) < 3.0 * std::sqrt(0.5 * 1.8 / static_cast<double>(n)));
}

TEST_CASE("all-vacuum box drains", "[kernel][run]") {
    // Ballistic survival to t = 4 at vmp = 1 keeps ~14% of a unit slab.
    FlowProblem p = closed_box_1d(4, 0.05, 0.1, 4.0);
    p.surfaces[0].kind = SurfaceKind::Vacuum;
    p.surfaces[1].kind = SurfaceKind::Vacuum;
    p.collision.enabled = false;
    p.particle_weight = 0.005;
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.0;

    const RunResult r = run_unsteady(p, 88, 0);
    const auto& h = r.particle_count_history;
    REQUIRE(h.front() > 0);
    for (std::size_t i = 1; i < h.size(); ++i) REQUIRE(h[i] <= h[i - 1]);
    REQUIRE(h.back() < h.front() / 3);
}

TEST_CASE("a run shorter than two sampling intervals takes no snapshots", "[kernel][run]") {
    FlowProblem p = closed_box_1d(2, 0.1, 0.5, 0.5);
    p.initial_fill.density = 1.0;
    p.particle_weight = 0.01;
    const RunResult r = run_unsteady(p, 5, 0);
    REQUIRE(r.snapshots.empty());
    REQUIRE(r.particle_count_history.size() == 5);
}

TEST_CASE("the run loop is exactly the composition of its stages", "[kernel][run]") {
    FlowProblem p;
    p.grid = CellGrid::make_1d(2.0, 8);
    p.clock.dt = 0.02;
    p.clock.dt_s = 0.1;
    p.clock.dt_L = 0.5;
    p.clock.dt_av = 0.1;
    p.particle_weight = 0.01;
    p.surfaces[0].kind = SurfaceKind::Vacuum;
    p.surfaces[1].kind = SurfaceKind::Diffuse;
    p.surfaces[1].temperature = 1.0;
    p.collision = {true, 0.1, 6.0};
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.0;
    p.inflows.push_back({Face::Left, 1.5, 1.2, {0.8, 0.0, 0.0}});

    const std::uint64_t seed = 20260815;
    const RunResult r = run_unsteady(p, seed, 2);

    KernelState st;
    st.root = stream_for_run(seed, 2);
    st.crmax.assign(static_cast<std::size_t>(p.grid.total_cells()), p.collision.crmax_initial);
    initial_fill_particles(st, p);

    SerialExecutor exec;
    std::vector<Snapshot> snaps(static_cast<std::size_t>(p.clock.snapshot_count()));
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        snaps[k].t = static_cast<double>(k + 2) * p.clock.dt_s;
        snaps[k].cells.resize(static_cast<std::size_t>(p.grid.total_cells()));
    }
    std::uint64_t collisions = 0;
    std::vector<std::uint64_t> history;
    for (std::int64_t s = 1; s <= p.clock.total_steps(); ++s) {
        const std::size_t n_pre = st.store.size();
        generate_particles(st, p, static_cast<std::uint64_t>(s));
        move_particles(st, p, static_cast<std::uint64_t>(s), n_pre, exec);
        const CellIndex idx = readdress_particles(st, p);
        collisions += collide_cells(st, p, idx, static_cast<std::uint64_t>(s), exec);
        if (p.clock.is_sampling_step(s)) {
            auto& snap = snaps[static_cast<std::size_t>(s / p.clock.steps_per_sample() - 2)];
            for (int c = 0; c < p.grid.total_cells(); ++c)
                sample_cell(st, idx, c, snap.cells[static_cast<std::size_t>(c)]);
        }
        history.push_back(st.store.size());
    }

    REQUIRE(r.collision_count == collisions);
    REQUIRE(r.particle_count_history == history);
    REQUIRE(r.snapshots.size() == snaps.size());
    for (std::size_t k = 0; k < snaps.size(); ++k) REQUIRE(r.snapshots[k] == snaps[k]);
}

TEST_CASE("same seed and run id replay; different run ids do not", "[kernel][run]") {
    FlowProblem p = closed_box_1d(4, 0.02, 0.1, 0.4);
    p.collision = {true, 0.1, 6.0};
    p.particle_weight = 0.01;
    p.initial_fill.density = 1.0;

    const RunResult a = run_unsteady(p, 42, 0);
    const RunResult b = run_unsteady(p, 42, 0);
    REQUIRE(a.collision_count == b.collision_count);
    REQUIRE(a.particle_count_history == b.particle_count_history);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        REQUIRE(a.snapshots[k] == b.snapshots[k]);

    const RunResult c = run_unsteady(p, 42, 1);
    REQUIRE((c.particle_count_history != a.particle_count_history ||
             c.snapshots != a.snapshots));
}

TEST_CASE("free expansion against a wall matches the erf profile", "[kernel][run]") {
    // Gas fills [0,1] of a [0,4] domain at T=1; the left wall is specular, the
    // right face open, collisions off. By images,
    //   n(x,t)/n0 = [erf((1-x)/t) + erf((1+x)/t)] / 2   (vmp = 1).
    FlowProblem p;
    p.grid = CellGrid::make_1d(4.0, 40);
    p.clock.dt = 0.01;
    p.clock.dt_s = 0.05;
    p.clock.dt_L = 0.2;
    p.clock.dt_av = 0.05;
    p.particle_weight = 2e-5;
    p.surfaces[0].kind = SurfaceKind::Specular;
    p.surfaces[1].kind = SurfaceKind::Vacuum;
    p.collision.enabled = false;
    p.initial_fill.density = 1.0;
    p.initial_fill.temperature = 1.0;
    p.initial_fill.region = {{{0.0, 0.0}, {1.0, 0.0}}};

    const RunResult r = run_unsteady(p, 314159, 0);
    REQUIRE(r.snapshots.size() == 3);
    for (const auto& snap : r.snapshots) {
        const double t = snap.t;
        for (int c = 0; c < p.grid.total_cells(); ++c) {
            const auto& acc = snap.cells[static_cast<std::size_t>(c)];
            const double x = (c + 0.5) * p.grid.cell_width(0);
            const double expect =
                0.5 * (std::erf((1.0 - x) / t) + std::erf((1.0 + x) / t));
            if (expect < 0.05) continue;  // skip the statistical far tail
            const Macroparameters m =
                derive_macroparameters(acc, p.particle_weight, p.grid.cell_volume);
            REQUIRE(m.density == Catch::Approx(expect).epsilon(0.10));
        }
    }
}
