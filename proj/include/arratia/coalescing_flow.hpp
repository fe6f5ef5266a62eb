#pragma once

#include <span>
#include <vector>

#include "arratia/flow_path.hpp"
#include "arratia/quantile.hpp"
#include "arratia/sheet.hpp"

namespace arratia {

/// One mass-carrying particle: the cells [cell_begin, cell_end) of u-space it
/// carries, their total width as mass, and its current position.
struct Particle {
    double position;
    double mass;
    int cell_begin;
    int cell_end;
};

/// The coalescing system at one time instant: strictly increasing positions,
/// masses summing to 1, contiguous u-blocks covering [0,1].
struct ParticleSystem {
    int cells = 0;
    std::vector<Particle> particles;

    QuantileState to_state() const;
    std::vector<int> block_ids() const;  // per cell, first cell of its block
};

struct CoalescingOptions {
    // When a step produces a crossing, recursively bisect it with Brownian
    // bridge noise before merging, up to this depth. 0 = plain fixed step.
    int refine_depth = 0;
};

// Collapses equal-value blocks of g into particles (mass = block width).
ParticleSystem init_particles(const QuantileState& g);

// Moves particle j by block_noise[j] / mass_j, then resolves crossings.
// block_noise[j] must be the sum of the sheet increments over the particle's
// u-cells (variance mass_j * dt), so the displacement variance is dt/mass_j.
ParticleSystem step_particles(const ParticleSystem& sys, double dt,
                              std::span<const double> block_noise,
                              std::vector<MergeEvent>* events = nullptr, double event_time = 0.0);

// Merges adjacent order violations at the mass-weighted mean position until
// positions are strictly increasing (preserves the mean position exactly).
ParticleSystem merge_resolve(const ParticleSystem& raw,
                             std::vector<MergeEvent>* events = nullptr, double event_time = 0.0);

// Drives the particle system with block-aggregated noise from the shared
// sheet; pure function of (g, sheet, options).
FlowPath simulate_coalescing(const QuantileState& g, const SheetGrid& sheet,
                             const CoalescingOptions& options = {});

}  // namespace arratia
