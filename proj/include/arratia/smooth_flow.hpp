#pragma once

#include <utility>
#include <vector>

#include "arratia/flow_path.hpp"
#include "arratia/mollifier.hpp"
#include "arratia/quantile.hpp"
#include "arratia/sheet.hpp"

namespace arratia {

struct SmoothConfig {
    MollifierParams mollifier;
    double epsilon = 0.01;
    GridSpec grid;
    QuantileState initial;
    // Pool-adjacent-violators projection after every step; opt-in because it
    // perturbs the law. When off, order violations are counted and reported.
    bool isotonic_repair = false;
};

void validate(const SmoothConfig& cfg);

/// State of the mollified flow at one time node. mass[i] is the interaction
/// mass m(u_i) = du * sum_j phi^2(values[i]-values[j]); reg_mass adds epsilon.
struct SmoothState {
    std::vector<double> values;
    std::vector<double> mass;
    std::vector<double> reg_mass;
};

struct SmoothRun {
    FlowPath path;
    long order_violation_steps = 0;  // steps with at least one adjacent inversion
    long total_steps = 0;
};

// Builds the state (masses included) from raw values.
SmoothState make_smooth_state(std::vector<double> values, const SmoothConfig& cfg);

// Sparse kernel row: entries (j, phi(values[i]-values[j])) for the indices
// with |values[i]-values[j]| < sigma/2, in ascending value order.
std::vector<std::pair<int, double>> kernel_row(const SmoothState& state,
                                               const SmoothConfig& cfg, int i);

// One Euler step driven by sheet column k: values[i] += row noise sum divided
// by (epsilon + mass[i]); masses recomputed from the new values. The parallel
// flavor runs the row loop under OpenMP and is bit-identical to the serial
// reference (per-row summation order is fixed).
SmoothState euler_step(const SmoothState& state, const SmoothConfig& cfg, const SheetGrid& sheet,
                       int k);
SmoothState euler_step_serial(const SmoothState& state, const SmoothConfig& cfg,
                              const SheetGrid& sheet, int k);

SmoothRun simulate_smooth(const SmoothConfig& cfg, const SheetGrid& sheet);

/// A discrete path on the full space-time grid: values[k][i] at node t_k.
using DiscretePath = std::vector<std::vector<double>>;

// The fixed-point map of the defining equation: evaluates the stochastic
// integral with the integrand frozen at z (left-point rule), same sheet.
// The Euler-simulated path is its exact fixed point.
DiscretePath picard_map(const DiscretePath& z, const SmoothConfig& cfg, const SheetGrid& sheet);

DiscretePath path_values(const FlowPath& path);

// sup over time nodes of the L2(du) distance between two discrete paths.
double path_distance(const DiscretePath& a, const DiscretePath& b);

// Correlated mass m(u_i, u_j) = du * sum_v phi(y_i - y_v) phi(y_j - y_v).
double corr_mass_pair(const SmoothState& state, const SmoothConfig& cfg, int i, int j);
std::vector<std::vector<double>> corr_mass_matrix(const SmoothState& state,
                                                  const SmoothConfig& cfg);

// In-place pool-adjacent-violators projection onto non-decreasing vectors
// (equal weights); preserves the mean.
void isotonic_project(std::vector<double>& values);

}  // namespace arratia
