#include "arratia/flow_path.hpp"

#include <ostream>

namespace arratia {

double FlowPath::mean_at(int k) const {
    const auto& v = states[k].values;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum * states[k].du();
}

std::vector<double> FlowPath::cell_series(int cell) const {
    std::vector<double> series;
    series.reserve(states.size());
    for (const auto& s : states) series.push_back(s.values[cell]);
    return series;
}

void write_flow_csv(const FlowPath& path, std::ostream& out) {
    out << "t,u,value,mass\n";
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        const auto& state = path.states[k];
        for (int i = 0; i < state.cells; ++i) {
            out << format_double(path.times[k]) << ',' << format_double(state.u_right(i)) << ','
                << format_double(state.values[i]) << ',' << format_double(path.masses[k][i])
                << '\n';
        }
    }
}

void write_merges_csv(const FlowPath& path, std::ostream& out) {
    out << "t,left_block,right_block\n";
    for (const auto& e : path.merges)
        out << format_double(e.time) << ',' << e.left_block << ',' << e.right_block << '\n';
}

}  // namespace arratia
