#include "arratia/sheet.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace arratia {

namespace {

// SplitMix64 finalizer; full avalanche over 64 bits.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in (0,1], safe as a log argument.
double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

void validate(const GridSpec& spec) {
    if (spec.m_space <= 0)
        throw std::invalid_argument("GridSpec: m_space must be positive");
    if (spec.k_time <= 0)
        throw std::invalid_argument("GridSpec: k_time must be positive");
    if (!(spec.horizon_t > 0.0))
        throw std::invalid_argument("GridSpec: horizon_t must be positive");
}

double normal_at(std::uint64_t seed, std::uint64_t i, std::uint64_t k, std::uint64_t stream) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ i);
    h = mix64(h ^ k);
    h = mix64(h ^ stream);
    const double u1 = to_unit(mix64(h ^ 0xA5A5A5A5A5A5A5A5ull));
    const double u2 = to_unit(mix64(h ^ 0x5A5A5A5A5A5A5A5Aull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t salt) {
    std::uint64_t h = mix64(base ^ (0xD1B54A32D192ED03ull * (salt + 1)));
    return mix64(h ^ index);
}

SheetGrid generate(const GridSpec& spec, std::int64_t seed) {
    validate(spec);
    SheetGrid grid;
    grid.spec = spec;
    grid.seed = seed;
    grid.increments.resize(static_cast<std::size_t>(spec.m_space) * spec.k_time);
    const double sd = std::sqrt(spec.du() * spec.dt());
    const auto useed = static_cast<std::uint64_t>(seed);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < spec.m_space; ++i) {
        for (int k = 0; k < spec.k_time; ++k) {
            grid.at(i, k) = sd * normal_at(useed, static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(k));
        }
    }
    return grid;
}

SheetField cumulate(const SheetGrid& grid) {
    const auto& spec = grid.spec;
    SheetField field;
    field.spec = spec;
    field.values.assign(static_cast<std::size_t>(spec.m_space + 1) * (spec.k_time + 1), 0.0);
    // Row-major accumulation, time inner loop; order fixed for reproducibility.
    for (int i = 1; i <= spec.m_space; ++i) {
        double row_sum = 0.0;
        for (int k = 1; k <= spec.k_time; ++k) {
            row_sum += grid.at(i - 1, k - 1);
            field.values[static_cast<std::size_t>(i) * (spec.k_time + 1) + k] =
                field.at(i - 1, k) + row_sum;
        }
    }
    return field;
}

double rect_increment(const SheetGrid& grid, int i0, int i1, int k0, int k1) {
    double sum = 0.0;
    for (int i = i0; i < i1; ++i)
        for (int k = k0; k < k1; ++k)
            sum += grid.at(i, k);
    return sum;
}

SheetGrid coarsen(const SheetGrid& grid, int factor_space, int factor_time) {
    const auto& spec = grid.spec;
    if (factor_space <= 0 || factor_time <= 0 || spec.m_space % factor_space != 0 ||
        spec.k_time % factor_time != 0)
        throw std::invalid_argument("coarsen: factors must divide the grid dimensions");
    SheetGrid out;
    out.spec = GridSpec{spec.m_space / factor_space, spec.k_time / factor_time, spec.horizon_t};
    out.seed = grid.seed;
    out.increments.resize(static_cast<std::size_t>(out.spec.m_space) * out.spec.k_time);
    for (int i = 0; i < out.spec.m_space; ++i)
        for (int k = 0; k < out.spec.k_time; ++k)
            out.at(i, k) = rect_increment(grid, i * factor_space, (i + 1) * factor_space,
                                          k * factor_time, (k + 1) * factor_time);
    return out;
}

namespace {
constexpr char kSheetMagic[8] = {'A', 'R', 'R', 'S', 'H', 'E', 'E', 'T'};
}

void write_sheet(const SheetGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_sheet: cannot open " + path);
    char header[32];
    std::memcpy(header, kSheetMagic, 8);
    const auto ms = static_cast<std::uint32_t>(grid.spec.m_space);
    const auto kt = static_cast<std::uint32_t>(grid.spec.k_time);
    std::memcpy(header + 8, &ms, 4);
    std::memcpy(header + 12, &kt, 4);
    std::memcpy(header + 16, &grid.spec.horizon_t, 8);
    std::memcpy(header + 24, &grid.seed, 8);
    out.write(header, 32);
    out.write(reinterpret_cast<const char*>(grid.increments.data()),
              static_cast<std::streamsize>(grid.increments.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_sheet: short write to " + path);
}

SheetGrid read_sheet(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_sheet: cannot open " + path);
    char header[32];
    in.read(header, 32);
    if (!in || std::memcmp(header, kSheetMagic, 8) != 0)
        throw std::runtime_error("read_sheet: bad header in " + path);
    std::uint32_t ms, kt;
    SheetGrid grid;
    std::memcpy(&ms, header + 8, 4);
    std::memcpy(&kt, header + 12, 4);
    std::memcpy(&grid.spec.horizon_t, header + 16, 8);
    std::memcpy(&grid.seed, header + 24, 8);
    grid.spec.m_space = static_cast<int>(ms);
    grid.spec.k_time = static_cast<int>(kt);
    validate(grid.spec);
    grid.increments.resize(static_cast<std::size_t>(ms) * kt);
    in.read(reinterpret_cast<char*>(grid.increments.data()),
            static_cast<std::streamsize>(grid.increments.size() * sizeof(double)));
    if (!in) throw std::runtime_error("read_sheet: truncated data in " + path);
    return grid;
}

}  // namespace arratia
