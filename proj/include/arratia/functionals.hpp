#pragma once

#include <functional>
#include <string>
#include <vector>

#include "arratia/quantile.hpp"

namespace arratia {

/// One inner basis function of a cylinder functional, with closed-form first
/// and second derivatives. The paper-facing family is bounded; Identity is
/// allowed behind the unbounded flag for the mean functional.
struct BasisFunction {
    enum class Kind { Sin, Cos, Tanh, Identity } kind = Kind::Sin;
    double scale = 1.0;  // sin(kx), cos(kx), tanh(x/c); ignored by Identity

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    bool bounded() const { return kind != Kind::Identity; }
    std::string name() const;
};

/// Outer map V: R^m -> R with gradient and Hessian evaluators.
struct OuterMap {
    int arity = 1;
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
    std::function<std::vector<std::vector<double>>(const std::vector<double>&)> hessian;
};

OuterMap outer_constant(double c);
OuterMap outer_coordinate();                                  // V(x) = x_1
OuterMap outer_quadratic(std::vector<std::vector<double>> q); // V(x) = x'Qx/2

/// U(mu) = V(integral of alpha_1 d mu, ..., integral of alpha_m d mu).
struct CylinderFunctional {
    OuterMap outer;
    std::vector<BasisFunction> basis;
    bool allow_unbounded = false;
};

// Throws unless arity matches and every basis function is bounded (or the
// unbounded flag is set); checks derivative evaluators against finite
// differences on a fixed sweep.
void validate(const CylinderFunctional& u);

std::vector<double> basis_integrals(const CylinderFunctional& u, const StepMeasure& mu);

double evaluate(const CylinderFunctional& u, const StepMeasure& mu);

// The measure derivative at point v: sum_i dV_i(integrals) * alpha_i'(v).
double lions_grad(const CylinderFunctional& u, const StepMeasure& mu, double v);

struct GeneratorValues {
    double l1;  // sum_i dV_i * integral of alpha_i''(y(u)) / m(u) du
    double l2;  // sum_ij d2V_ij * integral of alpha_i'(y(u)) alpha_j'(y(u)) du
};

// Throws std::domain_error on a non-positive mass cell.
GeneratorValues generators(const CylinderFunctional& u, const QuantileState& q,
                           const std::vector<double>& mass);

}  // namespace arratia
