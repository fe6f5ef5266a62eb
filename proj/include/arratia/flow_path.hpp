#pragma once

#include <iosfwd>
#include <vector>

#include "arratia/quantile.hpp"
#include "arratia/sheet.hpp"

namespace arratia {

struct MergeEvent {
    double time;
    int left_block;   // first u-cell of the surviving (left) block
    int right_block;  // first u-cell of the absorbed (right) block
};

/// Full trajectory record of either flow on the space-time grid: one
/// QuantileState snapshot and one mass field per time node. For the
/// coalescing flow, cell_block[k][i] is the exact block id (first cell of the
/// particle) carrying cell i at time k; empty for the smooth flow.
struct FlowPath {
    GridSpec grid;
    std::vector<double> times;                   // K+1 nodes
    std::vector<QuantileState> states;           // K+1 snapshots
    std::vector<std::vector<double>> masses;     // per snapshot, per cell
    std::vector<std::vector<int>> cell_block;    // coalescing flow only
    std::vector<MergeEvent> merges;

    int steps() const { return static_cast<int>(times.size()) - 1; }

    // du * sum of cell values: the mean of the pushforward measure.
    double mean_at(int k) const;
    // One scalar series y(u_cell, t) across all time nodes.
    std::vector<double> cell_series(int cell) const;
};

// CSV with header "t,u,value,mass", one row per (time node, cell).
void write_flow_csv(const FlowPath& path, std::ostream& out);
// CSV with header "t,left_block,right_block".
void write_merges_csv(const FlowPath& path, std::ostream& out);

}  // namespace arratia
