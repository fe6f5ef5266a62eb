#include "arratia/run.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "arratia/analysis.hpp"
#include "arratia/coalescing_flow.hpp"
#include "arratia/representation.hpp"
#include "arratia/smooth_flow.hpp"

namespace arratia {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::uint64_t kReplicaSalt = 0x5EED;

std::string output_root(const RunConfig& cfg) {
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("ARRATIA_OUTPUT_ROOT")) return env;
    return "runs";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

ordered_json check_entry(const std::string& name, double statistic, double threshold,
                         long n_samples, bool pass) {
    return ordered_json{{"test_name", name},
                        {"statistic", statistic},
                        {"threshold", threshold},
                        {"n_samples", n_samples},
                        {"pass", pass}};
}

// Exact path properties: monotone states, mass conservation, block count
// non-increasing after t=0, coalescence permanence.
ordered_json path_invariants(const FlowPath& path, bool coalescing, bool& pass) {
    bool monotone = true, mass_ok = true, blocks_ok = true, permanent = true;
    int prev_blocks = -1;
    for (std::size_t k = 0; k < path.states.size(); ++k) {
        const auto& v = path.states[k].values;
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (v[i] > v[i + 1]) monotone = false;
        double total = 0.0;
        if (coalescing) {
            for (std::size_t i = 0; i < v.size(); ++i)
                if (i == 0 || path.cell_block[k][i] != path.cell_block[k][i - 1])
                    total += path.masses[k][i];
            if (std::abs(total - 1.0) > 1e-12) mass_ok = false;
            const int blocks = cluster_count(path.states[k]);
            if (k >= 1 && prev_blocks >= 0 && blocks > prev_blocks) blocks_ok = false;
            if (k >= 1) prev_blocks = blocks;
            if (k + 1 < path.states.size()) {
                for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                    if (path.cell_block[k][i] == path.cell_block[k][i + 1] &&
                        path.cell_block[k + 1][i] != path.cell_block[k + 1][i + 1])
                        permanent = false;
                }
            }
        }
    }
    ordered_json checks = ordered_json::array();
    checks.push_back(check_entry("states_monotone", monotone ? 0.0 : 1.0, 0.5, 1, monotone));
    if (coalescing) {
        checks.push_back(check_entry("mass_conservation", mass_ok ? 0.0 : 1.0, 0.5, 1, mass_ok));
        checks.push_back(
            check_entry("block_count_non_increasing", blocks_ok ? 0.0 : 1.0, 0.5, 1, blocks_ok));
        checks.push_back(
            check_entry("coalescence_permanent", permanent ? 0.0 : 1.0, 0.5, 1, permanent));
        pass = monotone && mass_ok && blocks_ok && permanent;
    } else {
        pass = true;  // smooth-state violations are reported, not gated
    }
    return checks;
}

int run_simulate(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const QuantileState g = cfg.initial_state();
    const SheetGrid sheet = generate(cfg.grid, cfg.seed);
    FlowPath path;
    ordered_json report;
    bool pass = true;
    if (cfg.mode == RunMode::Coalescing) {
        path = simulate_coalescing(g, sheet, CoalescingOptions{cfg.refine_depth});
        report["checks"] = path_invariants(path, true, pass);
    } else {
        SmoothConfig scfg;
        scfg.mollifier = cfg.eta ? make_mollifier(cfg.sigma, *cfg.eta) : make_mollifier(cfg.sigma);
        scfg.epsilon = cfg.epsilon;
        scfg.grid = cfg.grid;
        scfg.initial = g;
        scfg.isotonic_repair = cfg.isotonic_repair;
        const SmoothRun run = simulate_smooth(scfg, sheet);
        path = run.path;
        report["checks"] = path_invariants(path, false, pass);
        report["order_violation_steps"] = run.order_violation_steps;
        report["total_steps"] = run.total_steps;
        report["order_violation_rate"] =
            static_cast<double>(run.order_violation_steps) /
            static_cast<double>(std::max(1L, run.total_steps));
    }
    report["pass"] = pass;

    std::ostringstream flow;
    write_flow_csv(path, flow);
    write_file(dir / "flow.csv", flow.str());
    if (cfg.mode == RunMode::Coalescing) {
        std::ostringstream merges;
        write_merges_csv(path, merges);
        write_file(dir / "merges.csv", merges.str());
    }
    write_file(dir / "report_path.json", report.dump(2));
    result.messages.push_back("flow written to " + (dir / "flow.csv").string());
    return pass ? 0 : 1;
}

int run_compare(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const QuantileState g = cfg.initial_state();
    std::vector<std::pair<double, double>> sig_eps;
    for (std::size_t i = 0; i < cfg.compare_sigmas.size(); ++i)
        sig_eps.emplace_back(cfg.compare_sigmas[i], cfg.compare_epsilons[i]);
    std::vector<std::int64_t> seeds;
    for (int r = 0; r < cfg.replicas; ++r)
        seeds.push_back(static_cast<std::int64_t>(
            derive_seed(static_cast<std::uint64_t>(cfg.seed), r, kReplicaSalt)));

    // Figure-layout artifacts: both trajectories from the first shared sheet.
    const SheetGrid sheet = generate(cfg.grid, seeds[0]);
    const FlowPath coal = simulate_coalescing(g, sheet);
    std::ostringstream coal_csv;
    write_flow_csv(coal, coal_csv);
    write_file(dir / "coalescing.csv", coal_csv.str());
    for (const auto& [sigma, epsilon] : sig_eps) {
        SmoothConfig scfg;
        scfg.mollifier = make_mollifier(sigma);
        scfg.epsilon = epsilon;
        scfg.grid = cfg.grid;
        scfg.initial = g;
        std::ostringstream csv;
        write_flow_csv(simulate_smooth(scfg, sheet).path, csv);
        std::ostringstream name;
        name << "smooth_sigma" << sigma << "_eps" << epsilon << ".csv";
        write_file(dir / name.str(), csv.str());
    }

    const CompareReport report = compare_same_sheet(g, cfg.grid, sig_eps, seeds);
    write_file(dir / "report_compare.json", compare_json(report));
    result.messages.push_back("compare study written to " + dir.string());
    return 0;
}

int run_verify(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    ordered_json checks = ordered_json::array();
    bool all_pass = true;

    // Sheet battery on a small grid, native generator.
    const int battery_replicas = std::max(1000, cfg.replicas);
    const GridSpec battery_grid{4, 4, 1.0};
    const BatteryReport battery = sheet_battery(
        [&](int r) {
            return generate(battery_grid, static_cast<std::int64_t>(derive_seed(
                                              static_cast<std::uint64_t>(cfg.seed), r, 1)));
        },
        battery_replicas);
    for (const auto& c : battery.checks) {
        checks.push_back(check_entry("sheet_" + c.name, c.statistic, c.threshold,
                                     battery.replicas, c.pass));
        all_pass = all_pass && c.pass;
    }

    // Martingale property of the coalescing cells over replicas.
    const QuantileState g = cfg.initial_state();
    const int mart_replicas = std::max(100, cfg.replicas);
    std::vector<std::vector<double>> series(mart_replicas);
    std::vector<double> times;
    BatchMean mean_qv(mart_replicas);
    for (int r = 0; r < mart_replicas; ++r) {
        const auto seed = static_cast<std::int64_t>(
            derive_seed(static_cast<std::uint64_t>(cfg.seed), r, 2));
        const FlowPath path = simulate_coalescing(g, generate(cfg.grid, seed));
        if (times.empty()) times = path.times;
        std::vector<double> mean_series(path.times.size());
        for (std::size_t k = 0; k < path.times.size(); ++k) mean_series[k] = path.mean_at(k);
        mean_qv.add(realized_qv(mean_series));
        series[r] = path.cell_series(path.grid.m_space / 2);
    }
    const double T = cfg.grid.horizon_t;
    const MartingaleReport mart = martingale_test(
        series, times, {{0.0, 0.5 * T}, {0.25 * T, 0.75 * T}, {0.5 * T, T}});
    checks.push_back(check_entry("coalescing_cell_martingale_max_z", mart.max_abs_z, 3.0,
                                 mart.replicas, mart.pass));
    all_pass = all_pass && mart.pass;

    // The mean of the coalescing measure is a rate-1 Brownian motion.
    const double mean_z = std::abs(mean_qv.z(T));
    checks.push_back(check_entry("coalescing_mean_qv_z", mean_z, 3.0, mart_replicas,
                                 mean_z < 3.0));
    all_pass = all_pass && mean_z < 3.0;

    ordered_json report{{"pass", all_pass}, {"checks", checks}};
    write_file(dir / "report_verify.json", report.dump(2));
    result.messages.push_back("verify report: " + (dir / "report_verify.json").string());
    return all_pass ? 0 : 1;
}

int run_ito(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const QuantileState g = cfg.initial_state();
    ordered_json checks = ordered_json::array();
    bool all_pass = true;

    CylinderFunctional mean_u{outer_coordinate(), {BasisFunction{BasisFunction::Kind::Identity}},
                              true};
    CylinderFunctional sin_u{outer_coordinate(), {BasisFunction{BasisFunction::Kind::Sin}},
                             false};
    for (const auto* u : {&mean_u, &sin_u}) {
        validate(*u);
        BatchMean realized(cfg.replicas), predicted(cfg.replicas);
        std::vector<std::vector<double>> residuals(cfg.replicas);
        std::vector<double> times;
        for (int r = 0; r < cfg.replicas; ++r) {
            const auto seed = static_cast<std::int64_t>(
                derive_seed(static_cast<std::uint64_t>(cfg.seed), r, 3));
            const FlowPath path = simulate_coalescing(g, generate(cfg.grid, seed));
            if (times.empty()) times = path.times;
            const ItoResidualResult res = ito_residual(path, *u);
            realized.add(res.realized_qv);
            predicted.add(res.predicted_qv);
            residuals[r] = res.residual;
        }
        const std::string name = u == &mean_u ? "mean" : "int_sin";
        const double rel =
            std::abs(realized.mean() - predicted.mean()) / std::max(1e-300, predicted.mean());
        const MartingaleReport mart = martingale_test(
            residuals, times,
            {{0.0, 0.5 * cfg.grid.horizon_t}, {0.5 * cfg.grid.horizon_t, cfg.grid.horizon_t}});
        checks.push_back(check_entry("ito_" + name + "_qv_rel_error", rel, 0.10, cfg.replicas,
                                     rel < 0.10));
        checks.push_back(check_entry("ito_" + name + "_residual_martingale_max_z",
                                     mart.max_abs_z, 3.0, mart.replicas, mart.pass));
        all_pass = all_pass && rel < 0.10 && mart.pass;
    }

    ordered_json report{{"pass", all_pass},
                        {"unbounded_basis_note",
                         "the mean functional uses the identity basis behind the unbounded flag"},
                        {"checks", checks}};
    write_file(dir / "report_ito.json", report.dump(2));
    result.messages.push_back("ito report: " + (dir / "report_ito.json").string());
    return all_pass ? 0 : 1;
}

int run_sheet_check(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const BatteryReport battery = sheet_battery(
        [&](int r) {
            return generate(cfg.grid, static_cast<std::int64_t>(derive_seed(
                                          static_cast<std::uint64_t>(cfg.seed), r, 4)));
        },
        cfg.replicas);
    write_file(dir / "report_sheet.json", battery_json(battery));
    result.messages.push_back("sheet report: " + (dir / "report_sheet.json").string());
    return battery.pass ? 0 : 1;
}

int run_mass_stats(const RunConfig& cfg, const fs::path& dir, RunResult& result) {
    const QuantileState g = cfg.initial_state();
    const MassMomentScan scan = mass_moment_scan(
        [&](int r) {
            const auto seed = static_cast<std::int64_t>(
                derive_seed(static_cast<std::uint64_t>(cfg.seed), r, 5));
            return simulate_coalescing(g, generate(cfg.grid, seed));
        },
        cfg.mass_beta, cfg.mass_t_points, cfg.replicas);
    write_file(dir / "report_mass.json", mass_moment_json(scan));
    if (!scan.beta_admissible)
        result.messages.push_back("warning: beta outside the admissible range (0, 3/2 - 1/p)");
    result.messages.push_back("mass report: " + (dir / "report_mass.json").string());
    bool finite = true;
    for (double e : scan.estimates) finite = finite && std::isfinite(e);
    return finite ? 0 : 1;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    RunResult result;
    const fs::path dir = fs::path(output_root(cfg)) /
                         (to_string(cfg.mode) + "-" + config_hash(cfg));
    fs::create_directories(dir);
    result.run_dir = dir.string();
    write_file(dir / "manifest.txt", manifest_text(cfg));

    switch (cfg.mode) {
        case RunMode::Coalescing:
        case RunMode::Smooth: result.exit_code = run_simulate(cfg, dir, result); break;
        case RunMode::Compare: result.exit_code = run_compare(cfg, dir, result); break;
        case RunMode::Verify: result.exit_code = run_verify(cfg, dir, result); break;
        case RunMode::Ito: result.exit_code = run_ito(cfg, dir, result); break;
        case RunMode::SheetCheck: result.exit_code = run_sheet_check(cfg, dir, result); break;
        case RunMode::MassStats: result.exit_code = run_mass_stats(cfg, dir, result); break;
    }
    return result;
}

RunResult run_from_file(const std::string& config_path) {
    RunResult result;
    try {
        return run(load_config(config_path));
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.messages.push_back(e.what());
        return result;
    }
}

}  // namespace arratia
