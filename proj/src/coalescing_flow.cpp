#include "arratia/coalescing_flow.hpp"

#include <cmath>
#include <stdexcept>

namespace arratia {

QuantileState ParticleSystem::to_state() const {
    QuantileState q;
    q.cells = cells;
    q.values.resize(cells);
    for (const auto& p : particles)
        for (int i = p.cell_begin; i < p.cell_end; ++i) q.values[i] = p.position;
    return q;
}

std::vector<int> ParticleSystem::block_ids() const {
    std::vector<int> ids(cells);
    for (const auto& p : particles)
        for (int i = p.cell_begin; i < p.cell_end; ++i) ids[i] = p.cell_begin;
    return ids;
}

ParticleSystem init_particles(const QuantileState& g) {
    validate(g);
    ParticleSystem sys;
    sys.cells = g.cells;
    const double du = g.du();
    int begin = 0;
    for (int i = 1; i <= g.cells; ++i) {
        if (i == g.cells || !same_block_value(g.values[i - 1], g.values[i])) {
            sys.particles.push_back(Particle{g.values[begin], (i - begin) * du, begin, i});
            begin = i;
        }
    }
    return sys;
}

ParticleSystem merge_resolve(const ParticleSystem& raw, std::vector<MergeEvent>* events,
                             double event_time) {
    ParticleSystem out;
    out.cells = raw.cells;
    const double du = 1.0 / raw.cells;
    for (const auto& p : raw.particles) {
        Particle cur = p;
        while (!out.particles.empty() && out.particles.back().position >= cur.position) {
            const Particle left = out.particles.back();
            out.particles.pop_back();
            if (events)
                events->push_back(MergeEvent{event_time, left.cell_begin, cur.cell_begin});
            const double total = left.mass + cur.mass;
            cur = Particle{(left.mass * left.position + cur.mass * cur.position) / total,
                           (cur.cell_end - left.cell_begin) * du, left.cell_begin, cur.cell_end};
        }
        out.particles.push_back(cur);
    }
    return out;
}

ParticleSystem step_particles(const ParticleSystem& sys, double dt,
                              std::span<const double> block_noise,
                              std::vector<MergeEvent>* events, double event_time) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_particles: dt must be positive");
    if (block_noise.size() != sys.particles.size())
        throw std::invalid_argument("step_particles: one noise sum per particle required");
    ParticleSystem raw = sys;
    for (std::size_t j = 0; j < raw.particles.size(); ++j)
        raw.particles[j].position += block_noise[j] / raw.particles[j].mass;
    return merge_resolve(raw, events, event_time);
}

namespace {

constexpr std::uint64_t kBridgeSalt = 0xB51D6E;

std::vector<double> block_sums(const ParticleSystem& sys, std::span<const double> cell_noise) {
    std::vector<double> sums(sys.particles.size(), 0.0);
    for (std::size_t j = 0; j < sys.particles.size(); ++j)
        for (int i = sys.particles[j].cell_begin; i < sys.particles[j].cell_end; ++i)
            sums[j] += cell_noise[i];
    return sums;
}

bool has_crossing(const ParticleSystem& sys, std::span<const double> block_noise) {
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sys.particles.size(); ++j) {
        const double pos = sys.particles[j].position + block_noise[j] / sys.particles[j].mass;
        if (pos <= prev) return true;
        prev = pos;
    }
    return false;
}

struct BridgeStream {
    std::uint64_t seed;
    std::uint64_t counter = 0;
    double next() { return normal_at(seed, 0, counter++); }
};

// Advances one interval of length dt whose per-cell noise is cell_noise.
// On a crossing, splits the interval by a Brownian bridge and recurses, so
// merge positions are resolved closer to the actual meeting time.
ParticleSystem advance(const ParticleSystem& sys, std::span<const double> cell_noise, double dt,
                       double cell_var, int depth, double t_end, BridgeStream& bridge,
                       std::vector<MergeEvent>* events) {
    const auto sums = block_sums(sys, cell_noise);
    if (depth <= 0 || !has_crossing(sys, sums))
        return step_particles(sys, dt, sums, events, t_end);

    const double half_sd = 0.5 * std::sqrt(cell_var);
    std::vector<double> first(cell_noise.size()), second(cell_noise.size());
    for (std::size_t i = 0; i < cell_noise.size(); ++i) {
        first[i] = 0.5 * cell_noise[i] + half_sd * bridge.next();
        second[i] = cell_noise[i] - first[i];
    }
    ParticleSystem mid = advance(sys, first, 0.5 * dt, 0.25 * cell_var, depth - 1,
                                 t_end - 0.5 * dt, bridge, events);
    return advance(mid, second, 0.5 * dt, 0.25 * cell_var, depth - 1, t_end, bridge, events);
}

}  // namespace

FlowPath simulate_coalescing(const QuantileState& g, const SheetGrid& sheet,
                             const CoalescingOptions& options) {
    const GridSpec& spec = sheet.spec;
    if (g.cells != spec.m_space)
        throw std::invalid_argument("simulate_coalescing: initial state does not match the grid");

    FlowPath path;
    path.grid = spec;
    path.times.reserve(spec.k_time + 1);
    path.states.reserve(spec.k_time + 1);
    path.masses.reserve(spec.k_time + 1);
    path.cell_block.reserve(spec.k_time + 1);

    ParticleSystem sys = init_particles(g);
    const double dt = spec.dt();
    BridgeStream bridge{derive_seed(static_cast<std::uint64_t>(sheet.seed), 0, kBridgeSalt)};

    const auto snapshot = [&](double t) {
        path.times.push_back(t);
        QuantileState q = sys.to_state();
        std::vector<double> mass(spec.m_space);
        for (const auto& p : sys.particles)
            for (int i = p.cell_begin; i < p.cell_end; ++i) mass[i] = p.mass;
        path.states.push_back(std::move(q));
        path.masses.push_back(std::move(mass));
        path.cell_block.push_back(sys.block_ids());
    };

    snapshot(0.0);
    std::vector<double> column(spec.m_space);
    for (int k = 0; k < spec.k_time; ++k) {
        for (int i = 0; i < spec.m_space; ++i) column[i] = sheet.at(i, k);
        const double t_end = (k + 1) * dt;
        sys = advance(sys, column, dt, spec.du() * dt, options.refine_depth, t_end, bridge,
                      &path.merges);
        snapshot(t_end);
    }
    return path;
}

}  // namespace arratia
