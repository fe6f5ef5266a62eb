#include "arratia/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "arratia/coalescing_flow.hpp"
#include "arratia/smooth_flow.hpp"

namespace arratia {

BatchMean::BatchMean(long planned_samples)
    : sums_(kBatches, 0.0), counts_(kBatches, 0), planned_(std::max(1L, planned_samples)) {}

void BatchMean::add(double x) {
    const int b = std::min<long>((total_ * kBatches) / planned_, kBatches - 1);
    sums_[b] += x;
    counts_[b] += 1;
    ++total_;
}

double BatchMean::mean() const {
    double s = 0.0;
    for (double x : sums_) s += x;
    return s / static_cast<double>(total_);
}

double BatchMean::se() const {
    const double grand = mean();
    double var = 0.0;
    int used = 0;
    for (int b = 0; b < kBatches; ++b) {
        if (counts_[b] == 0) continue;
        const double d = sums_[b] / static_cast<double>(counts_[b]) - grand;
        var += d * d;
        ++used;
    }
    if (used < 2) return 0.0;
    return std::sqrt(var / (used - 1) / used);
}

double BatchMean::z(double target) const {
    const double s = se();
    return s > 0.0 ? (mean() - target) / s : 0.0;
}

double realized_qv(std::span<const double> series) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double d = series[k + 1] - series[k];
        sum += d * d;
    }
    return sum;
}

double realized_cov(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("realized_cov: series length mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < a.size(); ++k)
        sum += (a[k + 1] - a[k]) * (b[k + 1] - b[k]);
    return sum;
}

namespace {

std::size_t node_index(const std::vector<double>& times, double t) {
    // Closest node; the test grids are chosen on nodes.
    std::size_t best = 0;
    double gap = std::abs(times[0] - t);
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (std::abs(times[k] - t) < gap) {
            gap = std::abs(times[k] - t);
            best = k;
        }
    }
    return best;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

MartingaleReport martingale_test(const std::vector<std::vector<double>>& replica_series,
                                 const std::vector<double>& times,
                                 const std::vector<std::pair<double, double>>& st_pairs) {
    if (replica_series.size() < 100)
        throw std::invalid_argument("martingale_test: need at least 100 replicas");

    MartingaleReport report;
    report.replicas = static_cast<int>(replica_series.size());
    for (const auto& [s, t] : st_pairs) {
        const std::size_t ks = node_index(times, s);
        const std::size_t kt = node_index(times, t);
        for (const char* weight : {"1", "sign"}) {
            BatchMean acc(static_cast<long>(replica_series.size()));
            for (const auto& series : replica_series) {
                const double inc = series[kt] - series[ks];
                const double f = weight[0] == '1' ? 1.0 : sign_of(series[ks]);
                acc.add(inc * f);
            }
            report.entries.push_back(
                MartingaleEntry{times[ks], times[kt], weight, acc.mean(), acc.se(),
                                acc.z(0.0)});
        }
    }
    for (const auto& e : report.entries)
        report.max_abs_z = std::max(report.max_abs_z, std::abs(e.z));
    report.pass = report.max_abs_z < 3.0;
    report.note = "per-entry 3-sigma bands; no multiplicity correction (Bonferroni-conservative "
                  "readers should widen by the entry count)";
    return report;
}

MassMomentScan mass_moment_scan(const std::function<FlowPath(int)>& simulate_replica,
                                double beta, const std::vector<double>& t_points, int replicas,
                                MassKind kind, double epsilon, double beta_limit) {
    MassMomentScan scan;
    scan.beta = beta;
    scan.t_points = t_points;
    scan.beta_admissible = beta > 0.0 && beta < beta_limit;

    std::vector<BatchMean> acc(t_points.size(), BatchMean(replicas));
    for (int r = 0; r < replicas; ++r) {
        const FlowPath path = simulate_replica(r);
        const double dt = path.grid.dt();
        const double du = path.grid.du();
        // One pass over time; flush each horizon as it is reached.
        std::vector<double> integral_at(t_points.size(), 0.0);
        double integral = 0.0;
        for (int k = 0; k < path.steps(); ++k) {
            double slice = 0.0;
            for (double m : path.masses[k]) {
                const double denom = kind == MassKind::Plain
                                         ? m
                                         : (epsilon + m) * (epsilon + m) / m;
                slice += std::pow(denom, -beta);
            }
            integral += slice * du * dt;
            for (std::size_t p = 0; p < t_points.size(); ++p)
                if (path.times[k + 1] <= t_points[p] + 0.5 * dt) integral_at[p] = integral;
        }
        for (std::size_t p = 0; p < t_points.size(); ++p) acc[p].add(integral_at[p]);
    }

    for (const auto& a : acc) {
        scan.estimates.push_back(a.mean());
        scan.ses.push_back(a.se());
    }

    // Least-squares slope of log estimate against log t.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(t_points.size());
    for (std::size_t p = 0; p < t_points.size(); ++p) {
        const double x = std::log(t_points[p]);
        const double y = std::log(std::max(scan.estimates[p], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    scan.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return scan;
}

namespace {

double evaluate_on_cells(const CylinderFunctional& u, const QuantileState& q) {
    const double du = q.du();
    std::vector<double> integrals(u.basis.size(), 0.0);
    for (std::size_t i = 0; i < u.basis.size(); ++i)
        for (int c = 0; c < q.cells; ++c) integrals[i] += du * u.basis[i].value(q.values[c]);
    return u.outer.value(integrals);
}

double grad_squared_on_cells(const CylinderFunctional& u, const QuantileState& q) {
    const double du = q.du();
    std::vector<double> integrals(u.basis.size(), 0.0);
    for (std::size_t i = 0; i < u.basis.size(); ++i)
        for (int c = 0; c < q.cells; ++c) integrals[i] += du * u.basis[i].value(q.values[c]);
    const auto grad = u.outer.gradient(integrals);
    double sum = 0.0;
    for (int c = 0; c < q.cells; ++c) {
        double g = 0.0;
        for (std::size_t i = 0; i < u.basis.size(); ++i)
            g += grad[i] * u.basis[i].d1(q.values[c]);
        sum += du * g * g;
    }
    return sum;
}

}  // namespace

ItoResidualResult ito_residual(const FlowPath& path, const CylinderFunctional& u) {
    ItoResidualResult out;
    const double dt = path.grid.dt();
    const double u0 = evaluate_on_cells(u, path.states[0]);
    double drift = 0.0;
    out.residual.reserve(path.times.size());
    out.residual.push_back(0.0);
    for (int k = 0; k < path.steps(); ++k) {
        const auto gen = generators(u, path.states[k], path.masses[k]);
        drift += 0.5 * (gen.l1 + gen.l2) * dt;
        out.predicted_qv += grad_squared_on_cells(u, path.states[k]) * dt;
        out.residual.push_back(evaluate_on_cells(u, path.states[k + 1]) - u0 - drift);
    }
    out.realized_qv = realized_qv(out.residual);
    return out;
}

WassersteinTable discretized_measure_convergence(const FlowPath& path,
                                                 const std::vector<int>& ns) {
    WassersteinTable table;
    const int cells = path.states[0].cells;
    const double dt = path.grid.dt();
    const double du = path.grid.du();
    for (int n : ns) {
        if (n <= 0 || n > cells)
            throw std::invalid_argument("discretized_measure_convergence: need 0 < n <= cells");
        // Cell c of the n-atom quantile copies the path value at u = k/n with
        // k = ceil((c+1) n / cells).
        std::vector<int> source(cells);
        for (int c = 0; c < cells; ++c) {
            const int k = (c * n) / cells + 1;
            source[c] = (k * cells + n - 1) / n - 1;
        }
        double integrated = 0.0;
        for (std::size_t t = 0; t < path.times.size(); ++t) {
            const auto& v = path.states[t].values;
            double sq = 0.0;
            for (int c = 0; c < cells; ++c) {
                const double d = v[source[c]] - v[c];
                sq += d * d;
            }
            integrated += sq * du * (t + 1 < path.times.size() ? dt : 0.0);
        }
        table.n.push_back(n);
        table.integrated_sq.push_back(integrated);
    }
    return table;
}

CompareReport compare_same_sheet(const QuantileState& g, const GridSpec& grid,
                                 const std::vector<std::pair<double, double>>& sigma_epsilon,
                                 const std::vector<std::int64_t>& seeds) {
    CompareReport report;
    report.seeds = static_cast<int>(seeds.size());

    std::vector<double> coal_means;
    std::vector<double> coal_blocks;
    std::vector<std::vector<double>> smooth_means(sigma_epsilon.size());
    std::vector<std::vector<double>> smooth_blocks(sigma_epsilon.size());
    std::vector<std::vector<double>> smooth_w2(sigma_epsilon.size());
    std::vector<double> last_median(sigma_epsilon.size(), 0.0);

    for (const auto seed : seeds) {
        const SheetGrid sheet = generate(grid, seed);
        const FlowPath coal = simulate_coalescing(g, sheet);
        const int last = coal.steps();
        coal_means.push_back(coal.mean_at(last));
        coal_blocks.push_back(cluster_count(coal.states[last]));

        for (std::size_t c = 0; c < sigma_epsilon.size(); ++c) {
            SmoothConfig cfg;
            cfg.mollifier = make_mollifier(sigma_epsilon[c].first);
            cfg.epsilon = sigma_epsilon[c].second;
            cfg.grid = grid;
            cfg.initial = g;
            const SmoothRun run = simulate_smooth(cfg, sheet);
            smooth_means[c].push_back(run.path.mean_at(last));
            double proxy = 0.0;
            for (double m : run.path.masses[last]) proxy += grid.du() / m;
            smooth_blocks[c].push_back(proxy);

            double integrated = 0.0;
            for (int k = 0; k <= last; ++k) {
                const double d = wasserstein2(run.path.states[k], coal.states[k]);
                integrated += d * d * (k < last ? grid.dt() : 0.0);
            }
            smooth_w2[c].push_back(std::sqrt(integrated));

            std::vector<double> masses = run.path.masses[last];
            std::sort(masses.begin(), masses.end());
            last_median[c] = masses[masses.size() / 2];
        }
    }

    const auto variance = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        return var / std::max<std::size_t>(1, xs.size() - 1);
    };
    const auto average = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        return mean / static_cast<double>(xs.size());
    };

    report.coalescing_var_mean = variance(coal_means);
    report.coalescing_mean_blocks = average(coal_blocks);
    for (std::size_t c = 0; c < sigma_epsilon.size(); ++c) {
        report.entries.push_back(CompareEntry{sigma_epsilon[c].first, sigma_epsilon[c].second,
                                              variance(smooth_means[c]),
                                              average(smooth_blocks[c]), last_median[c],
                                              average(smooth_w2[c])});
    }
    return report;
}

std::string martingale_json(const MartingaleReport& report) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"test_name", "martingale_increment_s" + format_double(e.s) + "_t" +
                                             format_double(e.t) + "_f" + e.weight},
                           {"statistic", e.z},
                           {"threshold", 3.0},
                           {"n_samples", report.replicas},
                           {"pass", std::abs(e.z) < 3.0}});
    }
    nlohmann::ordered_json j{{"replicas", report.replicas},
                             {"max_abs_z", report.max_abs_z},
                             {"pass", report.pass},
                             {"note", report.note},
                             {"checks", entries}};
    return j.dump(2);
}

std::string mass_moment_json(const MassMomentScan& scan) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < scan.t_points.size(); ++p) {
        points.push_back({{"t", scan.t_points[p]},
                          {"estimate", scan.estimates[p]},
                          {"se", scan.ses[p]}});
    }
    nlohmann::ordered_json j{{"beta", scan.beta},
                             {"beta_admissible", scan.beta_admissible},
                             {"fitted_exponent", scan.fitted_exponent},
                             {"points", points}};
    return j.dump(2);
}

std::string compare_json(const CompareReport& report) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"sigma", e.sigma},
                           {"epsilon", e.epsilon},
                           {"var_mean_horizon", e.var_mean_horizon},
                           {"mean_block_proxy", e.mean_block_proxy},
                           {"median_mass", e.median_mass},
                           {"diag_pathwise_w2", e.diag_pathwise_w2}});
    }
    nlohmann::ordered_json j{{"seeds", report.seeds},
                             {"coalescing_var_mean", report.coalescing_var_mean},
                             {"coalescing_mean_blocks", report.coalescing_mean_blocks},
                             {"smooth", entries}};
    return j.dump(2);
}

}  // namespace arratia
