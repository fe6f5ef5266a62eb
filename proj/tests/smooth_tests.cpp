#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "arratia/analysis.hpp"
#include "arratia/smooth_flow.hpp"

using namespace arratia;

namespace {

QuantileState state_of(std::vector<double> values) {
    QuantileState q;
    q.cells = static_cast<int>(values.size());
    q.values = std::move(values);
    return q;
}

SmoothConfig config_of(QuantileState initial, GridSpec grid, double sigma, double epsilon) {
    SmoothConfig cfg;
    cfg.mollifier = make_mollifier(sigma);
    cfg.epsilon = epsilon;
    cfg.grid = grid;
    cfg.initial = std::move(initial);
    return cfg;
}

// Dense O(M^2) oracle for one kernel row.
std::vector<std::pair<int, double>> dense_row(const SmoothState& state, const SmoothConfig& cfg,
                                              int i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < static_cast<int>(state.values.size()); ++j) {
        if (std::abs(state.values[i] - state.values[j]) < cfg.mollifier.support_end())
            row.emplace_back(j, mollifier_eval(cfg.mollifier, state.values[i] - state.values[j]));
    }
    return row;
}

}  // namespace

TEST_CASE("config validation") {
    auto cfg = config_of(from_initial(InitialSpec{}, 8), GridSpec{8, 4, 0.1}, 0.2, 0.01);
    CHECK_NOTHROW(validate(cfg));
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.epsilon = 0.01;
    cfg.grid.m_space = 9;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("kernel row structure") {
    SUBCASE("all values equal: full row of ones") {
        const auto cfg = config_of(state_of({0.5, 0.5, 0.5, 0.5}), GridSpec{4, 1, 0.1}, 0.2, 0.01);
        const SmoothState state = make_smooth_state(cfg.initial.values, cfg);
        const auto row = kernel_row(state, cfg, 2);
        REQUIRE(row.size() == 4);
        for (const auto& [j, phi] : row) CHECK(phi == 1.0);
        CHECK(state.mass[2] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("clusters farther apart than sigma do not interact") {
        const auto cfg =
            config_of(state_of({0.0, 0.0, 1.0, 1.0}), GridSpec{4, 1, 0.1}, 0.2, 0.01);
        const SmoothState state = make_smooth_state(cfg.initial.values, cfg);
        const auto row = kernel_row(state, cfg, 0);
        REQUIRE(row.size() == 2);
        CHECK(row[0].first == 0);
        CHECK(row[1].first == 1);
        CHECK(state.mass[0] == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("window scan equals the dense kernel exactly") {
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values;
        double level = 0.0;
        for (int i = 0; i < 32; ++i) {
            level += std::abs(normal_at(15000, trial, i)) * 0.05;
            values.push_back(level);
        }
        const auto cfg = config_of(state_of(values), GridSpec{32, 1, 0.1}, 0.15, 0.01);
        const SmoothState state = make_smooth_state(cfg.initial.values, cfg);
        for (int i = 0; i < 32; i += 5) {
            const auto sparse = kernel_row(state, cfg, i);
            const auto dense = dense_row(state, cfg, i);
            REQUIRE(sparse.size() == dense.size());
            for (std::size_t e = 0; e < sparse.size(); ++e) {
                CHECK(sparse[e].first == dense[e].first);
                CHECK(sparse[e].second == dense[e].second);
            }
        }
    }
}

TEST_CASE("parallel euler step is bit-identical to the serial reference") {
    const auto cfg = config_of(from_initial(InitialSpec{}, 64), GridSpec{64, 16, 0.1}, 0.2, 0.01);
    const SheetGrid sheet = generate(cfg.grid, 321);
    SmoothState serial = make_smooth_state(cfg.initial.values, cfg);
    SmoothState parallel = serial;
    for (int k = 0; k < cfg.grid.k_time; ++k) {
        serial = euler_step_serial(serial, cfg, sheet, k);
        parallel = euler_step(parallel, cfg, sheet, k);
        REQUIRE(serial.values == parallel.values);
        REQUIRE(serial.mass == parallel.mass);
    }
}

TEST_CASE("constant profile translates rigidly") {
    InitialSpec spec;
    spec.kind = InitialSpec::Kind::Constant;
    spec.constant = 0.3;
    const auto cfg = config_of(from_initial(spec, 16), GridSpec{16, 32, 0.1}, 0.2, 0.01);
    const SheetGrid sheet = generate(cfg.grid, 5);
    SmoothState state = make_smooth_state(cfg.initial.values, cfg);
    for (int k = 0; k < cfg.grid.k_time; ++k) {
        state = euler_step(state, cfg, sheet, k);
        for (int i = 1; i < 16; ++i) CHECK(state.values[i] == state.values[0]);
        // Mass stays 1, so the increment per step is the column sum / (1+eps).
    }
}

TEST_CASE("isolated particle increment variance") {
    // A particle with no neighbors within sigma/2 moves by dW_i / (eps + du):
    // variance du*dt / (eps + du)^2.
    std::vector<double> values;
    for (int i = 0; i < 8; ++i) values.push_back(i * 10.0);
    const GridSpec grid{8, 1, 0.01};
    const auto cfg = config_of(state_of(values), grid, 0.2, 0.01);
    const double predicted =
        grid.du() * grid.dt() / ((cfg.epsilon + grid.du()) * (cfg.epsilon + grid.du()));

    const int replicas = 10000;
    BatchMean inc_sq(replicas);
    for (int r = 0; r < replicas; ++r) {
        const SheetGrid sheet = generate(grid, 40000 + r);
        const SmoothState state = make_smooth_state(cfg.initial.values, cfg);
        const SmoothState next = euler_step(state, cfg, sheet, 0);
        const double inc = next.values[3] - state.values[3];
        inc_sq.add(inc * inc);
    }
    CHECK(std::abs(inc_sq.z(predicted)) < 3.0);
}

TEST_CASE("distant particles accumulate no covariation") {
    std::vector<double> v(8, -5.0);
    for (int i = 4; i < 8; ++i) v[i] = 5.0;  // two clusters, far beyond sigma
    const GridSpec grid{8, 100, 0.05};
    const auto cfg = config_of(state_of(v), grid, 0.2, 0.01);
    const int replicas = 400;
    BatchMean cov(replicas);
    for (int r = 0; r < replicas; ++r) {
        const SmoothRun run = simulate_smooth(cfg, generate(grid, 41000 + r));
        cov.add(realized_cov(run.path.cell_series(1), run.path.cell_series(6)));
    }
    CHECK(std::abs(cov.z(0.0)) < 3.0);
}

TEST_CASE("equal starting points share one path forever") {
    std::vector<double> v{0.1, 0.4, 0.4, 0.4, 0.9, 1.2};
    const GridSpec grid{6, 64, 0.1};
    const auto cfg = config_of(state_of(v), grid, 0.3, 0.02);
    const SmoothRun run = simulate_smooth(cfg, generate(grid, 6));
    for (const auto& s : run.path.states) {
        CHECK(s.values[1] == s.values[2]);
        CHECK(s.values[2] == s.values[3]);
    }
}

TEST_CASE("mass bounds hold along the flow") {
    const GridSpec grid{16, 64, 0.1};
    const auto cfg = config_of(from_initial(InitialSpec{}, 16), grid, 0.25, 0.01);
    const SmoothRun run = simulate_smooth(cfg, generate(grid, 17));
    for (const auto& masses : run.path.masses) {
        for (double m : masses) {
            CHECK(m >= grid.du() - 1e-15);  // the particle counts itself
            CHECK(m <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("order violations are monitored and shrink with dt") {
    // The continuum theorem preserves order; the Euler scheme can cross at
    // coarse dt, and the run reports how often. Refining dt must cut the
    // per-step violation rate.
    const auto rate_at = [](int k_time) {
        const GridSpec grid{32, k_time, 0.05};
        SmoothConfig cfg;
        cfg.mollifier = make_mollifier(0.2);
        cfg.epsilon = 0.05;
        cfg.grid = grid;
        cfg.initial = from_initial(InitialSpec{}, 32);
        double steps = 0.0, violations = 0.0;
        for (int seed = 230; seed < 234; ++seed) {
            const SmoothRun run = simulate_smooth(cfg, generate(grid, seed));
            steps += static_cast<double>(run.total_steps);
            violations += static_cast<double>(run.order_violation_steps);
        }
        return violations / steps;
    };
    const double coarse = rate_at(128);
    const double fine = rate_at(2048);
    CHECK(coarse > 0.0);  // crossings do happen at this resolution
    CHECK(fine < coarse);
}

TEST_CASE("isotonic projection") {
    SUBCASE("pool adjacent violators on a known vector") {
        std::vector<double> v{1.0, 3.0, 2.0, 4.0};
        isotonic_project(v);
        const std::vector<double> expected{1.0, 2.5, 2.5, 4.0};
        for (int i = 0; i < 4; ++i) CHECK(v[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    }
    SUBCASE("projection preserves the mean and fixes monotone inputs") {
        std::vector<double> v{0.3, 0.1, 0.7, 0.2};
        const double mean_before = (0.3 + 0.1 + 0.7 + 0.2) / 4.0;
        isotonic_project(v);
        double mean_after = 0.0;
        for (double x : v) mean_after += x / 4.0;
        CHECK(mean_after == doctest::Approx(mean_before).epsilon(1e-14));
        CHECK(std::is_sorted(v.begin(), v.end()));

        std::vector<double> sorted{0.0, 0.5, 0.5, 1.0};
        isotonic_project(sorted);
        CHECK(sorted == std::vector<double>{0.0, 0.5, 0.5, 1.0});
    }
    SUBCASE("repair keeps every emitted state monotone") {
        const GridSpec grid{16, 64, 0.4};  // coarse dt to force violations
        auto cfg = config_of(from_initial(InitialSpec{}, 16), grid, 0.2, 0.01);
        cfg.isotonic_repair = true;
        const SmoothRun run = simulate_smooth(cfg, generate(grid, 29));
        for (const auto& s : run.path.states) CHECK_NOTHROW(validate(s));
    }
}

TEST_CASE("full-interaction regime: QV close to the single-block value") {
    // sigma far larger than the spread, epsilon small: every particle sees
    // mass 1 and each path has QV rate 1/(1+eps)^2.
    const GridSpec grid{16, 400, 0.2};
    const auto cfg = config_of(from_initial(InitialSpec{}, 16), grid, 60.0, 0.005);
    const int replicas = 200;
    BatchMean qv(replicas);
    for (int r = 0; r < replicas; ++r) {
        const SmoothRun run = simulate_smooth(cfg, generate(grid, 42000 + r));
        qv.add(realized_qv(run.path.cell_series(8)));
    }
    const double predicted =
        grid.horizon_t / ((1.0 + cfg.epsilon) * (1.0 + cfg.epsilon));
    const double rel = std::abs(qv.mean() - predicted) / predicted;
    CHECK(rel < 0.05);
}

TEST_CASE("picard map fixes the euler path exactly") {
    const GridSpec grid{16, 32, 0.1};
    const auto cfg = config_of(from_initial(InitialSpec{}, 16), grid, 0.3, 0.02);
    const SheetGrid sheet = generate(grid, 91);
    const SmoothRun run = simulate_smooth(cfg, sheet);
    const DiscretePath star = path_values(run.path);
    const DiscretePath mapped = picard_map(star, cfg, sheet);
    for (std::size_t k = 0; k < star.size(); ++k) REQUIRE(mapped[k] == star[k]);
}

TEST_CASE("picard iterates contract onto the fixed point") {
    const GridSpec grid{32, 64, 0.1};
    const auto cfg = config_of(from_initial(InitialSpec{}, 32), grid, 0.3, 0.05);
    const SheetGrid sheet = generate(grid, 92);

    SUBCASE("iteration from the frozen initial condition converges") {
        DiscretePath z(grid.k_time + 1, cfg.initial.values);
        double last = 1e300;
        int needed = -1;
        for (int n = 0; n < 50; ++n) {
            const DiscretePath next = picard_map(z, cfg, sheet);
            const double dist = path_distance(next, z);
            if (n > 5) CHECK(dist <= last + 1e-12);
            last = dist;
            z = next;
            if (dist < 1e-8) {
                needed = n + 1;
                break;
            }
        }
        CHECK(needed > 0);
        CHECK(needed <= 50);
    }

    SUBCASE("two arbitrary starting paths are drawn together") {
        DiscretePath z1(grid.k_time + 1, cfg.initial.values);
        DiscretePath z2 = z1;
        for (std::size_t k = 0; k < z2.size(); ++k)
            for (std::size_t i = 0; i < z2[k].size(); ++i)
                z2[k][i] += 0.1 * normal_at(93, k, i);
        double prev = path_distance(z1, z2);
        double ratio_tail = 1e300;
        for (int n = 0; n < 12; ++n) {
            z1 = picard_map(z1, cfg, sheet);
            z2 = picard_map(z2, cfg, sheet);
            const double dist = path_distance(z1, z2);
            if (prev > 0.0) ratio_tail = dist / prev;
            prev = dist;
        }
        CHECK(ratio_tail < 1.0);  // eventually contracting
        CHECK(prev < 1e-3);
    }
}
