#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arratia {

/// Non-decreasing step function on [0,1] sampled on M uniform cells: the
/// quantile function of a probability measure on R. values[i] is the value
/// on cell ((i)/M, (i+1)/M].
struct QuantileState {
    int cells = 0;
    std::vector<double> values;

    double du() const { return 1.0 / cells; }
    double u_right(int i) const { return (i + 1) * du(); }
    double u_mid(int i) const { return (i + 0.5) * du(); }
};

/// Purely atomic probability measure: strictly increasing atoms, positive
/// weights summing to 1.
struct StepMeasure {
    std::vector<double> atoms;
    std::vector<double> weights;
};

// Two cell values belong to the same block iff |a-b| <= 1e-9 * max(1, |a|).
// Coalesced particles are stored bit-identically, so the tolerance only has
// to absorb formatting round-trips.
bool same_block_value(double a, double b);

// Throws std::invalid_argument on empty, size-mismatched or decreasing values.
void validate(const QuantileState& q);

// m(u_i) = du * (size of the block of cells sharing values[i]); in (0,1].
std::vector<double> mass_field(const QuantileState& q);

// Number of distinct value-blocks; equals round(sum du/m(u_i)).
int cluster_count(const QuantileState& q);

// L2-Wasserstein distance between the pushforward measures of two states on
// the same grid (the monotone coupling is optimal in dimension one).
double wasserstein2(const QuantileState& a, const QuantileState& b);

StepMeasure to_measure(const QuantileState& q);
QuantileState from_measure(const StepMeasure& m, int cells);

/// Initial-condition spec: uniform quantile g(u)=u, an explicit value list
/// (one value per cell, interpreted directly), a standard normal quantile,
/// or a constant.
struct InitialSpec {
    enum class Kind { Uniform, List, Gaussian, Constant } kind = Kind::Uniform;
    std::vector<double> list_values;
    double constant = 0.0;
};

// Cell-midpoint discretization of the chosen quantile function.
QuantileState from_initial(const InitialSpec& spec, int cells);

// Inverse standard normal CDF (Acklam's rational approximation).
double inverse_normal_cdf(double p);
// Standard normal CDF.
double normal_cdf(double x);

// CSV with header "u,value", u = right cell endpoints, 17 significant digits.
void write_quantile_csv(const QuantileState& q, std::ostream& out);
QuantileState read_quantile_csv(std::istream& in);

std::string format_double(double x);

}  // namespace arratia
