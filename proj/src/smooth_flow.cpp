#include "arratia/smooth_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace arratia {

void validate(const SmoothConfig& cfg) {
    validate(cfg.mollifier);
    validate(cfg.grid);
    validate(cfg.initial);
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("SmoothConfig: epsilon must be positive");
    if (cfg.initial.cells != cfg.grid.m_space)
        throw std::invalid_argument("SmoothConfig: initial state and grid must share the cells");
}

namespace {

// Index window and evaluation order for one kernel row. The state values are
// normally sorted (monotone state) and the window comes from two binary
// searches; on the rare non-monotone state we search a sorted copy instead,
// so the window is exact for any input. Ascending value order with ties by
// index keeps the summation order fixed and identical for equal-value rows.
struct RowLookup {
    const std::vector<double>* values;
    std::vector<int> order;           // empty when already sorted
    std::vector<double> sorted;       // empty when already sorted

    explicit RowLookup(const std::vector<double>& v) : values(&v) {
        if (std::is_sorted(v.begin(), v.end())) return;
        order.resize(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return v[a] < v[b]; });
        sorted.resize(v.size());
        for (std::size_t r = 0; r < order.size(); ++r) sorted[r] = v[order[r]];
    }

    // Calls fn(j) for every j with |center - values[j]| < radius, ascending
    // by value.
    template <typename Fn>
    void for_window(double center, double radius, Fn&& fn) const {
        const auto& v = order.empty() ? *values : sorted;
        const auto lo = std::lower_bound(v.begin(), v.end(), center - radius);
        const auto hi = std::upper_bound(v.begin(), v.end(), center + radius);
        for (auto it = lo; it != hi; ++it) {
            const int r = static_cast<int>(it - v.begin());
            fn(order.empty() ? r : order[r]);
        }
    }
};

std::vector<double> masses_from_values(const std::vector<double>& values,
                                       const MollifierParams& phi, double du) {
    const RowLookup lookup(values);
    const double radius = phi.support_end();
    std::vector<double> mass(values.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < values.size(); ++i) {
        double sum = 0.0;
        lookup.for_window(values[i], radius, [&](int j) {
            const double f = mollifier_eval(phi, values[i] - values[j]);
            sum += f * f;
        });
        mass[i] = sum * du;
    }
    return mass;
}

}  // namespace

SmoothState make_smooth_state(std::vector<double> values, const SmoothConfig& cfg) {
    SmoothState state;
    state.values = std::move(values);
    state.mass = masses_from_values(state.values, cfg.mollifier, cfg.grid.du());
    state.reg_mass.resize(state.mass.size());
    for (std::size_t i = 0; i < state.mass.size(); ++i)
        state.reg_mass[i] = cfg.epsilon + state.mass[i];
    return state;
}

std::vector<std::pair<int, double>> kernel_row(const SmoothState& state, const SmoothConfig& cfg,
                                               int i) {
    const RowLookup lookup(state.values);
    std::vector<std::pair<int, double>> row;
    lookup.for_window(state.values[i], cfg.mollifier.support_end(), [&](int j) {
        row.emplace_back(j, mollifier_eval(cfg.mollifier, state.values[i] - state.values[j]));
    });
    return row;
}

namespace {

SmoothState euler_step_impl(const SmoothState& state, const SmoothConfig& cfg,
                            const SheetGrid& sheet, int k, bool parallel) {
    const int cells = cfg.grid.m_space;
    const RowLookup lookup(state.values);
    const double radius = cfg.mollifier.support_end();
    std::vector<double> next(cells);
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < cells; ++i) {
        double noise = 0.0;
        lookup.for_window(state.values[i], radius, [&](int j) {
            noise += mollifier_eval(cfg.mollifier, state.values[i] - state.values[j]) *
                     sheet.at(j, k);
        });
        next[i] = state.values[i] + noise / state.reg_mass[i];
    }
    return make_smooth_state(std::move(next), cfg);
}

}  // namespace

SmoothState euler_step(const SmoothState& state, const SmoothConfig& cfg, const SheetGrid& sheet,
                       int k) {
    return euler_step_impl(state, cfg, sheet, k, true);
}

SmoothState euler_step_serial(const SmoothState& state, const SmoothConfig& cfg,
                              const SheetGrid& sheet, int k) {
    return euler_step_impl(state, cfg, sheet, k, false);
}

SmoothRun simulate_smooth(const SmoothConfig& cfg, const SheetGrid& sheet) {
    validate(cfg);
    if (!(sheet.spec == cfg.grid))
        throw std::invalid_argument("simulate_smooth: sheet does not match the grid");

    SmoothRun run;
    run.path.grid = cfg.grid;
    const double dt = cfg.grid.dt();

    SmoothState state = make_smooth_state(cfg.initial.values, cfg);
    const auto snapshot = [&](double t) {
        run.path.times.push_back(t);
        QuantileState q;
        q.cells = cfg.grid.m_space;
        q.values = state.values;
        run.path.states.push_back(std::move(q));
        run.path.masses.push_back(state.mass);
    };

    snapshot(0.0);
    for (int k = 0; k < cfg.grid.k_time; ++k) {
        state = euler_step(state, cfg, sheet, k);
        const bool violated = !std::is_sorted(state.values.begin(), state.values.end());
        if (violated) ++run.order_violation_steps;
        if (violated && cfg.isotonic_repair) {
            isotonic_project(state.values);
            state = make_smooth_state(std::move(state.values), cfg);
        }
        ++run.total_steps;
        snapshot((k + 1) * dt);
    }
    return run;
}

DiscretePath picard_map(const DiscretePath& z, const SmoothConfig& cfg, const SheetGrid& sheet) {
    validate(cfg);
    if (static_cast<int>(z.size()) != cfg.grid.k_time + 1)
        throw std::invalid_argument("picard_map: path must cover every time node");

    DiscretePath out(z.size());
    out[0] = cfg.initial.values;
    const int cells = cfg.grid.m_space;
    const double radius = cfg.mollifier.support_end();
    for (int k = 0; k < cfg.grid.k_time; ++k) {
        const auto& frozen = z[k];
        const auto mass = masses_from_values(frozen, cfg.mollifier, cfg.grid.du());
        const RowLookup lookup(frozen);
        out[k + 1].resize(cells);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < cells; ++i) {
            double noise = 0.0;
            lookup.for_window(frozen[i], radius, [&](int j) {
                noise += mollifier_eval(cfg.mollifier, frozen[i] - frozen[j]) * sheet.at(j, k);
            });
            out[k + 1][i] = out[k][i] + noise / (cfg.epsilon + mass[i]);
        }
    }
    return out;
}

DiscretePath path_values(const FlowPath& path) {
    DiscretePath out;
    out.reserve(path.states.size());
    for (const auto& s : path.states) out.push_back(s.values);
    return out;
}

double path_distance(const DiscretePath& a, const DiscretePath& b) {
    if (a.size() != b.size() || a.empty() || a[0].size() != b[0].size())
        throw std::invalid_argument("path_distance: paths must share the grid");
    const double du = 1.0 / static_cast<double>(a[0].size());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            const double d = a[k][i] - b[k][i];
            sum += d * d;
        }
        worst = std::max(worst, sum * du);
    }
    return std::sqrt(worst);
}

double corr_mass_pair(const SmoothState& state, const SmoothConfig& cfg, int i, int j) {
    const RowLookup lookup(state.values);
    double sum = 0.0;
    lookup.for_window(state.values[i], cfg.mollifier.support_end(), [&](int v) {
        sum += mollifier_eval(cfg.mollifier, state.values[i] - state.values[v]) *
               mollifier_eval(cfg.mollifier, state.values[j] - state.values[v]);
    });
    const double du = 1.0 / static_cast<double>(state.values.size());
    return sum * du;
}

std::vector<std::vector<double>> corr_mass_matrix(const SmoothState& state,
                                                  const SmoothConfig& cfg) {
    const int cells = static_cast<int>(state.values.size());
    std::vector<std::vector<double>> out(cells, std::vector<double>(cells));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) out[i][j] = corr_mass_pair(state, cfg, i, j);
    return out;
}

void isotonic_project(std::vector<double>& values) {
    const std::size_t n = values.size();
    // Pool-adjacent-violators with equal weights: merge decreasing runs into
    // their mean, sweeping left to right with a block stack.
    std::vector<double> block_sum(n);
    std::vector<std::size_t> block_count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        block_sum[blocks] = values[i];
        block_count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && block_sum[blocks - 2] * static_cast<double>(block_count[blocks - 1]) >=
                                 block_sum[blocks - 1] * static_cast<double>(block_count[blocks - 2])) {
            block_sum[blocks - 2] += block_sum[blocks - 1];
            block_count[blocks - 2] += block_count[blocks - 1];
            --blocks;
        }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double mean = block_sum[b] / static_cast<double>(block_count[b]);
        for (std::size_t c = 0; c < block_count[b]; ++c) values[i++] = mean;
    }
}

}  // namespace arratia
