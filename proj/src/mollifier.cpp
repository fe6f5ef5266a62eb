#include "arratia/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arratia {

namespace {

// Quintic smoothstep: s(0)=0, s(1)=1, s' = s'' = 0 at both ends.
double smoothstep5(double t) {
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

double MollifierParams::plateau_end() const {
    return rule == PlateauRule::SigmaThird ? sigma / 3.0 : 0.5 * (sigma - eta);
}

MollifierParams make_mollifier(double sigma) {
    MollifierParams p{sigma, 0.25 * sigma, PlateauRule::TransitionBand};
    validate(p);
    return p;
}

MollifierParams make_mollifier(double sigma, double eta, PlateauRule rule) {
    MollifierParams p{sigma, eta, rule};
    validate(p);
    return p;
}

void validate(const MollifierParams& p) {
    if (!(p.sigma > 0.0))
        throw std::invalid_argument("MollifierParams: sigma must be positive");
    if (!(p.eta > 0.0 && p.eta < p.sigma / 3.0))
        throw std::invalid_argument("MollifierParams: need 0 < eta < sigma/3");
}

double mollifier_eval(const MollifierParams& p, double x) {
    const double a = p.plateau_end();
    const double b = p.support_end();
    const double r = std::abs(x);
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    // Clamp away the rounding of 1 - s(t) for t near 1.
    return std::max(0.0, 1.0 - smoothstep5((r - a) / (b - a)));
}

LipschitzBounds lipschitz_bounds(const MollifierParams& p) {
    // max |s'| = 15/8 at the band midpoint; divide by the band width.
    const double width = p.support_end() - p.plateau_end();
    const double lip_phi = (15.0 / 8.0) / width;
    return LipschitzBounds{lip_phi, 2.0 * lip_phi};
}

double derivative_continuity_gap(const MollifierParams& p, double h) {
    const auto central = [&](double x) {
        return (mollifier_eval(p, x + h) - mollifier_eval(p, x - h)) / (2.0 * h);
    };
    double gap = 0.0;
    for (double edge : {p.plateau_end(), p.support_end()}) {
        gap = std::max(gap, std::abs(central(edge + h) - central(edge - h)));
    }
    return gap;
}

}  // namespace arratia
