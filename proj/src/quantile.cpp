#include "arratia/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace arratia {

bool same_block_value(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

void validate(const QuantileState& q) {
    if (q.cells <= 0) throw std::invalid_argument("QuantileState: cells must be positive");
    if (static_cast<int>(q.values.size()) != q.cells)
        throw std::invalid_argument("QuantileState: values size does not match cells");
    for (int i = 0; i + 1 < q.cells; ++i) {
        if (q.values[i] > q.values[i + 1])
            throw std::invalid_argument("QuantileState: values must be non-decreasing");
    }
    for (double v : q.values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("QuantileState: values must be finite");
    }
}

namespace {

// Left-to-right scan of maximal runs of block-equal adjacent values.
// Returns the first cell index of each block plus a final sentinel.
std::vector<int> block_starts(const QuantileState& q) {
    std::vector<int> starts{0};
    for (int i = 1; i < q.cells; ++i) {
        if (!same_block_value(q.values[i - 1], q.values[i])) starts.push_back(i);
    }
    starts.push_back(q.cells);
    return starts;
}

}  // namespace

std::vector<double> mass_field(const QuantileState& q) {
    validate(q);
    std::vector<double> mass(q.cells);
    const auto starts = block_starts(q);
    for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
        const double m = (starts[b + 1] - starts[b]) * q.du();
        for (int i = starts[b]; i < starts[b + 1]; ++i) mass[i] = m;
    }
    return mass;
}

int cluster_count(const QuantileState& q) {
    validate(q);
    return static_cast<int>(block_starts(q).size()) - 1;
}

double wasserstein2(const QuantileState& a, const QuantileState& b) {
    validate(a);
    validate(b);
    if (a.cells != b.cells)
        throw std::invalid_argument("wasserstein2: states must share the grid");
    double sum = 0.0;
    for (int i = 0; i < a.cells; ++i) {
        const double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return std::sqrt(sum * a.du());
}

StepMeasure to_measure(const QuantileState& q) {
    validate(q);
    StepMeasure m;
    const auto starts = block_starts(q);
    for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
        m.atoms.push_back(q.values[starts[b]]);
        m.weights.push_back((starts[b + 1] - starts[b]) * q.du());
    }
    return m;
}

QuantileState from_measure(const StepMeasure& m, int cells) {
    if (m.atoms.empty() || m.atoms.size() != m.weights.size())
        throw std::invalid_argument("from_measure: invalid measure");
    QuantileState q;
    q.cells = cells;
    q.values.reserve(cells);
    double cum = 0.0;
    std::size_t a = 0;
    for (int i = 0; i < cells; ++i) {
        const double u = (i + 0.5) / cells;
        while (a + 1 < m.atoms.size() && u > cum + m.weights[a]) cum += m.weights[a++];
        q.values.push_back(m.atoms[a]);
    }
    validate(q);
    return q;
}

QuantileState from_initial(const InitialSpec& spec, int cells) {
    if (cells <= 0) throw std::invalid_argument("from_initial: cells must be positive");
    QuantileState q;
    q.cells = cells;
    switch (spec.kind) {
        case InitialSpec::Kind::Uniform:
            for (int i = 0; i < cells; ++i) q.values.push_back(q.u_mid(i));
            break;
        case InitialSpec::Kind::List:
            if (static_cast<int>(spec.list_values.size()) != cells)
                throw std::invalid_argument("from_initial: list length must equal cells");
            q.values = spec.list_values;
            break;
        case InitialSpec::Kind::Gaussian:
            for (int i = 0; i < cells; ++i) q.values.push_back(inverse_normal_cdf(q.u_mid(i)));
            break;
        case InitialSpec::Kind::Constant:
            q.values.assign(cells, spec.constant);
            break;
    }
    validate(q);
    return q;
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");
    // Acklam's rational approximation, |relative error| < 1.15e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double qv = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * qv + c[1]) * qv + c[2]) * qv + c[3]) * qv + c[4]) * qv + c[5]) /
               ((((d[0] * qv + d[1]) * qv + d[2]) * qv + d[3]) * qv + 1.0);
    }
    if (p > 1.0 - plow) {
        const double qv = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * qv + c[1]) * qv + c[2]) * qv + c[3]) * qv + c[4]) * qv + c[5]) /
               ((((d[0] * qv + d[1]) * qv + d[2]) * qv + d[3]) * qv + 1.0);
    }
    const double qv = p - 0.5;
    const double r = qv * qv;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * qv /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_quantile_csv(const QuantileState& q, std::ostream& out) {
    out << "u,value\n";
    for (int i = 0; i < q.cells; ++i)
        out << format_double(q.u_right(i)) << ',' << format_double(q.values[i]) << '\n';
}

QuantileState read_quantile_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "u,value")
        throw std::runtime_error("read_quantile_csv: bad header");
    QuantileState q;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_quantile_csv: malformed row: " + line);
        q.values.push_back(std::stod(line.substr(comma + 1)));
    }
    q.cells = static_cast<int>(q.values.size());
    validate(q);
    return q;
}

}  // namespace arratia
