#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arratia/flow_path.hpp"
#include "arratia/functionals.hpp"
#include "arratia/quantile.hpp"

namespace arratia {

/// Monte Carlo mean with the SE taken from 20 consecutive batch means;
/// accumulation order is fixed, so results are reproducible.
class BatchMean {
  public:
    static constexpr int kBatches = 20;

    explicit BatchMean(long planned_samples);

    void add(double x);
    double mean() const;
    double se() const;
    double z(double target) const;
    long count() const { return total_; }

  private:
    std::vector<double> sums_;
    std::vector<long> counts_;
    long total_ = 0;
    long planned_;
};

// Realized quadratic variation / covariation over a uniform time grid:
// sums of products of consecutive increments.
double realized_qv(std::span<const double> series);
double realized_cov(std::span<const double> a, std::span<const double> b);

struct MartingaleEntry {
    double s, t;
    std::string weight;  // "1" or "sign"
    double mean, se, z;
};

struct MartingaleReport {
    std::vector<MartingaleEntry> entries;
    int replicas = 0;
    double max_abs_z = 0.0;
    bool pass = false;
    std::string note;
};

// Tests E[(X_t - X_s) f(X_s)] = 0 for f in {1, sign} on a grid of (s,t)
// pairs, at 3 standard errors per entry. Needs >= 100 replicas.
MartingaleReport martingale_test(const std::vector<std::vector<double>>& replica_series,
                                 const std::vector<double>& times,
                                 const std::vector<std::pair<double, double>>& st_pairs);

enum class MassKind {
    Plain,     // 1 / m^beta
    Modified,  // 1 / M^beta with M = (eps + m)^2 / m
};

struct MassMomentScan {
    double beta = 1.0;
    bool beta_admissible = true;
    std::vector<double> t_points;
    std::vector<double> estimates;  // E int_0^t int_0^1 denom^-beta du dr
    std::vector<double> ses;
    double fitted_exponent = 0.0;   // log-log slope of estimate vs t
};

// beta is admissible below 3/2 - 1/p; bounded initial conditions allow any
// beta < 3/2. Inadmissible beta only flags the report, it does not abort.
MassMomentScan mass_moment_scan(const std::function<FlowPath(int)>& simulate_replica,
                                double beta, const std::vector<double>& t_points, int replicas,
                                MassKind kind = MassKind::Plain, double epsilon = 0.0,
                                double beta_limit = 1.5);

struct ItoResidualResult {
    std::vector<double> residual;  // per time node
    double realized_qv = 0.0;
    double predicted_qv = 0.0;  // int int (lions gradient)^2 du ds
};

// Residual of the measure-valued Ito formula along one path:
//   R_t = U(mu_t) - U(mu_0) - 1/2 int L1 ds - 1/2 int L2 ds.
ItoResidualResult ito_residual(const FlowPath& path, const CylinderFunctional& u);

struct WassersteinTable {
    std::vector<int> n;
    std::vector<double> integrated_sq;  // int_0^T W2(mu~^n_t, mu_t)^2 dt
};

// Discretized empirical measures at n uniform atoms y(k/n, t) against the
// path's own measure, per requested n (each n <= path cells).
WassersteinTable discretized_measure_convergence(const FlowPath& path, const std::vector<int>& ns);

struct CompareEntry {
    double sigma, epsilon;
    double var_mean_horizon;    // variance over seeds of the mean at T
    double mean_block_proxy;    // mean over seeds of du * sum 1/m at T
    double median_mass;         // median of the mass field at T (last seed)
    double diag_pathwise_w2;    // mean time-integrated W2 to the coalescing run
};

struct CompareReport {
    int seeds = 0;
    double coalescing_var_mean = 0.0;
    double coalescing_mean_blocks = 0.0;
    std::vector<CompareEntry> entries;
};

// Same-sheet study: one shared sheet per seed drives the coalescing flow and
// every (sigma, epsilon) smooth flow; distributional statistics per config,
// pathwise distance reported as a diagnostic only.
CompareReport compare_same_sheet(const QuantileState& g, const GridSpec& grid,
                                 const std::vector<std::pair<double, double>>& sigma_epsilon,
                                 const std::vector<std::int64_t>& seeds);

std::string martingale_json(const MartingaleReport& report);
std::string mass_moment_json(const MassMomentScan& scan);
std::string compare_json(const CompareReport& report);

}  // namespace arratia
