#pragma once

namespace arratia {

/// Plateau convention for the interaction bump: the profile is 1 on
/// [0, plateau_end], 0 on [sigma/2, inf), with a quintic smoothstep between.
enum class PlateauRule {
    TransitionBand,  // plateau ends at (sigma - eta)/2
    SigmaThird,      // plateau ends at sigma/3
};

struct MollifierParams {
    double sigma = 0.1;
    double eta = 0.025;  // transition width; must satisfy 0 < eta < sigma/3
    PlateauRule rule = PlateauRule::TransitionBand;

    double plateau_end() const;
    double support_end() const { return 0.5 * sigma; }
};

// Defaults eta = sigma/4.
MollifierParams make_mollifier(double sigma);
MollifierParams make_mollifier(double sigma, double eta,
                               PlateauRule rule = PlateauRule::TransitionBand);

// Throws std::invalid_argument unless 0 < eta < sigma/3.
void validate(const MollifierParams& p);

/// Even bump in [0,1]: exactly 1 on [0, plateau_end], exactly 0 for
/// |x| >= sigma/2 (by branch, so neighbor pruning is sound), quintic
/// smoothstep in between.
double mollifier_eval(const MollifierParams& p, double x);

struct LipschitzBounds {
    double phi;          // upper bound on Lip(phi)
    double phi_squared;  // upper bound on Lip(phi^2)
};

LipschitzBounds lipschitz_bounds(const MollifierParams& p);

// Max mismatch of the central finite-difference derivative across the two
// smoothness edges (plateau end and support end), sampled at distance h.
double derivative_continuity_gap(const MollifierParams& p, double h);

}  // namespace arratia
