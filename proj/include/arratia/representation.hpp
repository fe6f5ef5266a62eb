#pragma once

#include <functional>
#include <string>
#include <vector>

#include "arratia/flow_path.hpp"
#include "arratia/sheet.hpp"

namespace arratia {

// Assembles the driving sheet of a coalescing path from the path and an
// independent sheet eta: per cell (i,k),
//   w = eta(i,k) + dy(u_i,t_k)*du - (du/m(u_i,t_k)) * sum over the block of
//       eta(.,k),
// with blocks and masses taken from the path's exact records at t_k.
SheetGrid construct_sheet(const FlowPath& path, const SheetGrid& eta);

// Residual of the singular integral representation: for every cell and time
// node, y(u_i,t_k) - g(u_i) - sum of block-averaged w increments up to t_k.
// Algebraically zero at the discrete level; returns the max absolute value.
double representation_residual(const FlowPath& path, const SheetGrid& w);

struct BatteryCheck {
    std::string name;
    double statistic;
    double threshold;
    bool pass;
};

struct BatteryReport {
    std::vector<BatteryCheck> checks;
    int replicas = 0;
    bool pass = true;
};

/// Distribution battery for sheet generators: cell second moments match
/// du*dt, distinct cells are uncorrelated (all checks at 3 standard errors,
/// batch-mean SEs), and rectangle additivity is exact for the fixed
/// cell-summation order.
BatteryReport sheet_battery(const std::function<SheetGrid(int)>& make_replica, int replicas);

std::string battery_json(const BatteryReport& report);

}  // namespace arratia
