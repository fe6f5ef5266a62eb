#include "arratia/representation.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "arratia/analysis.hpp"

namespace arratia {

SheetGrid construct_sheet(const FlowPath& path, const SheetGrid& eta) {
    const GridSpec& spec = eta.spec;
    if (!(path.grid == spec))
        throw std::invalid_argument("construct_sheet: path and eta grids must match");
    if (path.cell_block.empty())
        throw std::invalid_argument("construct_sheet: path carries no block records");

    SheetGrid w;
    w.spec = spec;
    w.seed = eta.seed;
    w.increments.resize(eta.increments.size());
    const double du = spec.du();
    std::vector<double> block_eta(spec.m_space);
    for (int k = 0; k < spec.k_time; ++k) {
        const auto& blocks = path.cell_block[k];
        // One eta sum per block, shared by the block's cells.
        for (int i = 0; i < spec.m_space; ++i) {
            if (i == 0 || blocks[i] != blocks[i - 1]) {
                double sum = 0.0;
                for (int j = i; j < spec.m_space && blocks[j] == blocks[i]; ++j)
                    sum += eta.at(j, k);
                block_eta[blocks[i]] = sum;
            }
        }
        for (int i = 0; i < spec.m_space; ++i) {
            const double dy = path.states[k + 1].values[i] - path.states[k].values[i];
            const double m = path.masses[k][i];
            w.at(i, k) = eta.at(i, k) + dy * du - (du / m) * block_eta[blocks[i]];
        }
    }
    return w;
}

double representation_residual(const FlowPath& path, const SheetGrid& w) {
    const GridSpec& spec = w.spec;
    if (!(path.grid == spec))
        throw std::invalid_argument("representation_residual: grids must match");
    std::vector<double> integral(spec.m_space, 0.0);
    std::vector<double> block_w(spec.m_space);
    double worst = 0.0;
    for (int k = 0; k < spec.k_time; ++k) {
        const auto& blocks = path.cell_block[k];
        for (int i = 0; i < spec.m_space; ++i) {
            if (i == 0 || blocks[i] != blocks[i - 1]) {
                double sum = 0.0;
                for (int j = i; j < spec.m_space && blocks[j] == blocks[i]; ++j)
                    sum += w.at(j, k);
                block_w[blocks[i]] = sum;
            }
        }
        for (int i = 0; i < spec.m_space; ++i) {
            integral[i] += block_w[blocks[i]] / path.masses[k][i];
            const double resid = path.states[k + 1].values[i] - path.states[0].values[i] -
                                 integral[i];
            worst = std::max(worst, std::abs(resid));
        }
    }
    return worst;
}

BatteryReport sheet_battery(const std::function<SheetGrid(int)>& make_replica, int replicas) {
    if (replicas < BatchMean::kBatches * 2)
        throw std::invalid_argument("sheet_battery: too few replicas");

    const SheetGrid first = make_replica(0);
    const GridSpec spec = first.spec;
    const int cells = spec.m_space * spec.k_time;
    const double cell_var = spec.du() * spec.dt();

    // Fixed pair family: all distinct pairs on small grids, adjacent plus
    // half-stride pairs otherwise.
    std::vector<std::pair<int, int>> pairs;
    if (cells <= 16) {
        for (int a = 0; a < cells; ++a)
            for (int b = a + 1; b < cells; ++b) pairs.emplace_back(a, b);
    } else {
        for (int a = 0; a < cells; ++a) {
            pairs.emplace_back(a, (a + 1) % cells);
            pairs.emplace_back(a, (a + cells / 2) % cells);
        }
    }

    BatchMean pooled_m2(static_cast<long>(replicas) * cells);
    BatchMean pooled_cov(static_cast<long>(replicas) * static_cast<long>(pairs.size()));
    std::vector<BatchMean> cell_m2(cells, BatchMean(replicas));
    std::vector<BatchMean> pair_cov(pairs.size(), BatchMean(replicas));
    bool additivity_exact = true;
    double grouped_rel = 0.0;

    for (int r = 0; r < replicas; ++r) {
        const SheetGrid grid = r == 0 ? first : make_replica(r);
        if (!(grid.spec == spec))
            throw std::invalid_argument("sheet_battery: replicas must share the grid spec");
        for (int c = 0; c < cells; ++c) {
            const double normalized = grid.increments[c] * grid.increments[c] / cell_var;
            pooled_m2.add(normalized);
            cell_m2[c].add(normalized);
        }
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double prod =
                grid.increments[pairs[p].first] * grid.increments[pairs[p].second] / cell_var;
            pooled_cov.add(prod);
            pair_cov[p].add(prod);
        }
        if (r < 8) {
            // Partition the full rectangle into quadrants. Consuming the cells
            // in the fixed row-major order reproduces the whole-rectangle sum
            // bit-exactly; regrouped partial sums agree to rounding error.
            const int mi = spec.m_space / 2, mk = spec.k_time / 2;
            const double whole = rect_increment(grid, 0, spec.m_space, 0, spec.k_time);
            double canonical = 0.0;
            for (int i = 0; i < spec.m_space; ++i)
                for (int k = 0; k < spec.k_time; ++k) canonical += grid.at(i, k);
            additivity_exact = additivity_exact && (canonical == whole);
            const double grouped = rect_increment(grid, 0, mi, 0, mk) +
                                   rect_increment(grid, 0, mi, mk, spec.k_time) +
                                   rect_increment(grid, mi, spec.m_space, 0, mk) +
                                   rect_increment(grid, mi, spec.m_space, mk, spec.k_time);
            grouped_rel = std::max(grouped_rel, std::abs(grouped - whole) /
                                                    std::max(1.0, std::abs(whole)));
        }
    }

    double max_cell_z = 0.0;
    for (const auto& bm : cell_m2) max_cell_z = std::max(max_cell_z, std::abs(bm.z(1.0)));
    double max_pair_z = 0.0;
    for (const auto& bm : pair_cov) max_pair_z = std::max(max_pair_z, std::abs(bm.z(0.0)));

    // Per-cell and per-pair families use a Bonferroni-style threshold so the
    // family-wise level matches the pooled 3-sigma checks.
    const auto bonferroni = [](std::size_t n) {
        return inverse_normal_cdf(1.0 - 0.00135 / static_cast<double>(n));
    };

    BatteryReport report;
    report.replicas = replicas;
    report.checks = {
        {"cell_second_moment_pooled_z", std::abs(pooled_m2.z(1.0)), 3.0, false},
        {"disjoint_cell_covariance_pooled_z", std::abs(pooled_cov.z(0.0)), 3.0, false},
        {"cell_second_moment_max_z", max_cell_z, bonferroni(cell_m2.size()), false},
        {"disjoint_cell_covariance_max_z", max_pair_z, bonferroni(pairs.size()), false},
        {"rect_additivity_canonical_exact", additivity_exact ? 0.0 : 1.0, 0.5, false},
        {"rect_additivity_grouped_rel", grouped_rel, 1e-12, false},
    };
    for (auto& check : report.checks) {
        check.pass = check.statistic <= check.threshold;
        report.pass = report.pass && check.pass;
    }
    return report;
}

std::string battery_json(const BatteryReport& report) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"test_name", c.name},
                          {"statistic", c.statistic},
                          {"threshold", c.threshold},
                          {"n_samples", report.replicas},
                          {"pass", c.pass}});
    }
    nlohmann::ordered_json j{{"replicas", report.replicas}, {"pass", report.pass},
                             {"checks", checks}};
    return j.dump(2);
}

}  // namespace arratia
