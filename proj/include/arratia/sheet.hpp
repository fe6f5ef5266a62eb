#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arratia {

/// Uniform grid over [0,1] x [0,T]: m_space cells of width du = 1/m_space,
/// k_time cells of width dt = T/k_time.
struct GridSpec {
    int m_space = 1;
    int k_time = 1;
    double horizon_t = 1.0;

    double du() const { return 1.0 / m_space; }
    double dt() const { return horizon_t / k_time; }

    bool operator==(const GridSpec&) const = default;
};

// Throws std::invalid_argument on non-positive cell counts or horizon.
void validate(const GridSpec& spec);

/// Discretized space-time white noise: one N(0, du*dt) increment per cell,
/// a pure function of (spec, seed). Immutable after construction.
struct SheetGrid {
    GridSpec spec;
    std::int64_t seed = 0;
    std::vector<double> increments;  // row-major: cell (i,k) at i*k_time + k

    double at(int i, int k) const { return increments[static_cast<std::size_t>(i) * spec.k_time + k]; }
    double& at(int i, int k) { return increments[static_cast<std::size_t>(i) * spec.k_time + k]; }
};

/// Cumulative field w(u_i, t_k) on the (m_space+1) x (k_time+1) lattice of
/// cell corners, with w(0,.) = 0 and w(.,0) = 0.
struct SheetField {
    GridSpec spec;
    std::vector<double> values;  // (m_space+1) x (k_time+1), row-major

    double at(int i, int k) const { return values[static_cast<std::size_t>(i) * (spec.k_time + 1) + k]; }
};

// Counter-based standard normal draw keyed on (seed, i, k, stream).
// Stateless, so any cell can be generated independently of the others.
double normal_at(std::uint64_t seed, std::uint64_t i, std::uint64_t k, std::uint64_t stream = 0);

// Derives an independent child seed (replica index, auxiliary streams).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t salt = 0);

SheetGrid generate(const GridSpec& spec, std::int64_t seed);

SheetField cumulate(const SheetGrid& grid);

// Sum of the increments of cells [i0,i1) x [k0,k1), row-major (time inner).
double rect_increment(const SheetGrid& grid, int i0, int i1, int k0, int k1);

// Sums factor_space x factor_time blocks of cells; factors must divide the
// grid dimensions. Coarsening a fine sheet yields the coupled coarse sheet.
SheetGrid coarsen(const SheetGrid& grid, int factor_space, int factor_time);

// Binary dump: 32-byte header (magic "ARRSHEET", u32 m_space, u32 k_time,
// f64 horizon_t, i64 seed), then increments row-major as little-endian f64.
void write_sheet(const SheetGrid& grid, const std::string& path);
SheetGrid read_sheet(const std::string& path);

}  // namespace arratia
