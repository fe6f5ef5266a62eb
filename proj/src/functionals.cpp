#include "arratia/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace arratia {

double BasisFunction::value(double x) const {
    switch (kind) {
        case Kind::Sin: return std::sin(scale * x);
        case Kind::Cos: return std::cos(scale * x);
        case Kind::Tanh: return std::tanh(x / scale);
        case Kind::Identity: return x;
    }
    return 0.0;
}

double BasisFunction::d1(double x) const {
    switch (kind) {
        case Kind::Sin: return scale * std::cos(scale * x);
        case Kind::Cos: return -scale * std::sin(scale * x);
        case Kind::Tanh: {
            const double t = std::tanh(x / scale);
            return (1.0 - t * t) / scale;
        }
        case Kind::Identity: return 1.0;
    }
    return 0.0;
}

double BasisFunction::d2(double x) const {
    switch (kind) {
        case Kind::Sin: return -scale * scale * std::sin(scale * x);
        case Kind::Cos: return -scale * scale * std::cos(scale * x);
        case Kind::Tanh: {
            const double t = std::tanh(x / scale);
            return -2.0 * t * (1.0 - t * t) / (scale * scale);
        }
        case Kind::Identity: return 0.0;
    }
    return 0.0;
}

std::string BasisFunction::name() const {
    switch (kind) {
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Tanh: return "tanh";
        case Kind::Identity: return "id";
    }
    return "?";
}

OuterMap outer_constant(double c) {
    OuterMap v;
    v.arity = 1;
    v.value = [c](const std::vector<double>&) { return c; };
    v.gradient = [](const std::vector<double>& x) { return std::vector<double>(x.size(), 0.0); };
    v.hessian = [](const std::vector<double>& x) {
        return std::vector<std::vector<double>>(x.size(), std::vector<double>(x.size(), 0.0));
    };
    return v;
}

OuterMap outer_coordinate() {
    OuterMap v;
    v.arity = 1;
    v.value = [](const std::vector<double>& x) { return x[0]; };
    v.gradient = [](const std::vector<double>& x) {
        std::vector<double> g(x.size(), 0.0);
        g[0] = 1.0;
        return g;
    };
    v.hessian = [](const std::vector<double>& x) {
        return std::vector<std::vector<double>>(x.size(), std::vector<double>(x.size(), 0.0));
    };
    return v;
}

OuterMap outer_quadratic(std::vector<std::vector<double>> q) {
    OuterMap v;
    v.arity = static_cast<int>(q.size());
    v.value = [q](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) s += x[i] * q[i][j] * x[j];
        return 0.5 * s;
    };
    v.gradient = [q](const std::vector<double>& x) {
        std::vector<double> g(q.size(), 0.0);
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j)
                g[i] += 0.5 * (q[i][j] + q[j][i]) * x[j];
        return g;
    };
    v.hessian = [q](const std::vector<double>&) {
        std::vector<std::vector<double>> h(q.size(), std::vector<double>(q.size()));
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) h[i][j] = 0.5 * (q[i][j] + q[j][i]);
        return h;
    };
    return v;
}

void validate(const CylinderFunctional& u) {
    if (u.outer.arity != static_cast<int>(u.basis.size()))
        throw std::invalid_argument("CylinderFunctional: outer arity must match basis size");
    if (!u.outer.value || !u.outer.gradient || !u.outer.hessian)
        throw std::invalid_argument("CylinderFunctional: outer map evaluators missing");
    for (const auto& alpha : u.basis) {
        if (!alpha.bounded() && !u.allow_unbounded)
            throw std::invalid_argument("CylinderFunctional: unbounded basis needs the flag");
        // Boundedness sweep and finite-difference cross-check of the
        // derivative evaluators.
        const double h = 1e-5;
        for (double x = -10.0; x <= 10.0; x += 0.41) {
            if (alpha.bounded()) {
                if (std::abs(alpha.value(x)) > 1.5 || std::abs(alpha.d1(x)) > 10.0 ||
                    std::abs(alpha.d2(x)) > 100.0)
                    throw std::invalid_argument("CylinderFunctional: basis bounds violated");
            }
            const double fd1 = (alpha.value(x + h) - alpha.value(x - h)) / (2.0 * h);
            const double fd2 =
                (alpha.value(x + h) - 2.0 * alpha.value(x) + alpha.value(x - h)) / (h * h);
            const double tol1 = 1e-6 * std::max(1.0, std::abs(alpha.d1(x)));
            const double tol2 = 1e-4 * std::max(1.0, std::abs(alpha.d2(x)));
            if (std::abs(fd1 - alpha.d1(x)) > tol1 || std::abs(fd2 - alpha.d2(x)) > tol2)
                throw std::invalid_argument("CylinderFunctional: derivative evaluator mismatch");
        }
    }
}

std::vector<double> basis_integrals(const CylinderFunctional& u, const StepMeasure& mu) {
    std::vector<double> integrals(u.basis.size(), 0.0);
    for (std::size_t i = 0; i < u.basis.size(); ++i)
        for (std::size_t a = 0; a < mu.atoms.size(); ++a)
            integrals[i] += mu.weights[a] * u.basis[i].value(mu.atoms[a]);
    return integrals;
}

double evaluate(const CylinderFunctional& u, const StepMeasure& mu) {
    return u.outer.value(basis_integrals(u, mu));
}

double lions_grad(const CylinderFunctional& u, const StepMeasure& mu, double v) {
    const auto grad = u.outer.gradient(basis_integrals(u, mu));
    double out = 0.0;
    for (std::size_t i = 0; i < u.basis.size(); ++i) out += grad[i] * u.basis[i].d1(v);
    return out;
}

GeneratorValues generators(const CylinderFunctional& u, const QuantileState& q,
                           const std::vector<double>& mass) {
    if (static_cast<int>(mass.size()) != q.cells)
        throw std::invalid_argument("generators: mass field size mismatch");
    for (double m : mass)
        if (!(m > 0.0)) throw std::domain_error("generators: zero-mass cell outside the domain");

    const double du = q.du();
    std::vector<double> integrals(u.basis.size(), 0.0);
    for (std::size_t i = 0; i < u.basis.size(); ++i)
        for (int c = 0; c < q.cells; ++c) integrals[i] += du * u.basis[i].value(q.values[c]);

    const auto grad = u.outer.gradient(integrals);
    const auto hess = u.outer.hessian(integrals);

    GeneratorValues out{0.0, 0.0};
    for (std::size_t i = 0; i < u.basis.size(); ++i) {
        double weighted = 0.0;
        for (int c = 0; c < q.cells; ++c) weighted += du * u.basis[i].d2(q.values[c]) / mass[c];
        out.l1 += grad[i] * weighted;
    }
    for (std::size_t i = 0; i < u.basis.size(); ++i) {
        for (std::size_t j = 0; j < u.basis.size(); ++j) {
            double cross = 0.0;
            for (int c = 0; c < q.cells; ++c)
                cross += du * u.basis[i].d1(q.values[c]) * u.basis[j].d1(q.values[c]);
            out.l2 += hess[i][j] * cross;
        }
    }
    return out;
}

}  // namespace arratia
