#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arratia/quantile.hpp"
#include "arratia/sheet.hpp"

using namespace arratia;

namespace {

QuantileState state_of(std::vector<double> values) {
    QuantileState q;
    q.cells = static_cast<int>(values.size());
    q.values = std::move(values);
    return q;
}

// Exhaustive optimal-assignment transport cost between two equal-weight
// 4-atom measures: minimum over all permutations.
double assignment_w2(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<int> perm{0, 1, 2, 3};
    double best = 1e300;
    do {
        double cost = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double d = a[i] - b[perm[i]];
            cost += 0.25 * d * d;
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best);
}

}  // namespace

TEST_CASE("validation rejects bad states") {
    CHECK_THROWS_AS(validate(state_of({})), std::invalid_argument);
    CHECK_THROWS_AS(validate(state_of({0.2, 0.1})), std::invalid_argument);
    QuantileState wrong = state_of({0.1, 0.2});
    wrong.cells = 3;
    CHECK_THROWS_AS(validate(wrong), std::invalid_argument);
    CHECK_NOTHROW(validate(state_of({0.1, 0.1, 0.4})));
}

TEST_CASE("mass field on blocks") {
    SUBCASE("constant state carries full mass") {
        const auto m = mass_field(state_of({0.3, 0.3, 0.3, 0.3}));
        for (double x : m) CHECK(x == 1.0);
    }
    SUBCASE("two half blocks") {
        const auto m = mass_field(state_of({0.1, 0.1, 0.7, 0.7}));
        for (double x : m) CHECK(x == 0.5);
    }
    SUBCASE("strictly increasing values are singletons") {
        const auto m = mass_field(state_of({0.1, 0.2, 0.3, 0.4, 0.5}));
        for (double x : m) CHECK(x == doctest::Approx(0.2).epsilon(1e-15));
    }
}

TEST_CASE("cluster count agrees with the inverse-mass integral") {
    const std::vector<std::vector<double>> cases = {
        {0.5, 0.5, 0.5, 0.5},
        {0.1, 0.2, 0.3, 0.4},
        {0.1, 0.1, 0.4, 0.9},
        {-1.0, -1.0, -1.0, 2.0},
    };
    for (const auto& values : cases) {
        const auto q = state_of(values);
        const auto mass = mass_field(q);
        double inv = 0.0;
        for (double m : mass) inv += q.du() / m;
        CHECK(cluster_count(q) == static_cast<int>(std::lround(inv)));
    }
    CHECK(cluster_count(state_of({1.0, 1.0, 1.0})) == 1);
    CHECK(cluster_count(state_of({1.0, 2.0, 3.0})) == 3);
}

TEST_CASE("cluster count is invariant under strictly increasing maps") {
    // Hand-rolled generator over random block patterns.
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values;
        double level = normal_at(7000, trial, 0);
        for (int i = 0; i < 12; ++i) {
            if (normal_at(7001, trial, i) > 0.3) level += std::abs(normal_at(7002, trial, i));
            values.push_back(level);
        }
        const auto q = state_of(values);
        auto mapped = values;
        for (double& v : mapped) v = std::atan(2.0 * v) + 3.0 * v;
        CHECK(cluster_count(q) == cluster_count(state_of(mapped)));
    }
}

TEST_CASE("wasserstein distance basics") {
    const auto a = state_of({0.1, 0.4, 0.6});
    CHECK(wasserstein2(a, a) == 0.0);
    const auto dirac_x = state_of({2.0, 2.0});
    const auto dirac_y = state_of({-1.0, -1.0});
    CHECK(wasserstein2(dirac_x, dirac_y) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(wasserstein2(a, dirac_x), std::invalid_argument);
}

TEST_CASE("wasserstein matches the exhaustive assignment oracle") {
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> a, b;
        for (int i = 0; i < 4; ++i) {
            a.push_back(normal_at(8100, trial, i));
            b.push_back(normal_at(8200, trial, i));
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const double direct = wasserstein2(state_of(a), state_of(b));
        CHECK(std::abs(direct - assignment_w2(a, b)) < 1e-10);
    }
}

TEST_CASE("wasserstein is a metric on fixed-grid states") {
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a, b, c;
        for (int i = 0; i < 6; ++i) {
            a.push_back(normal_at(8300, trial, i));
            b.push_back(normal_at(8400, trial, i));
            c.push_back(normal_at(8500, trial, i));
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::sort(c.begin(), c.end());
        const auto qa = state_of(a), qb = state_of(b), qc = state_of(c);
        CHECK(wasserstein2(qa, qb) == wasserstein2(qb, qa));
        CHECK(wasserstein2(qa, qc) <= wasserstein2(qa, qb) + wasserstein2(qb, qc) + 1e-12);
    }
}

TEST_CASE("uniform initial condition lands on cell midpoints") {
    const QuantileState q = from_initial(InitialSpec{}, 5);
    const std::vector<double> expected{0.1, 0.3, 0.5, 0.7, 0.9};
    for (int i = 0; i < 5; ++i) CHECK(q.values[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    // Midpoint discretization converges to g(u) = u in L2.
    double err_coarse = 0.0, err_fine = 0.0;
    const QuantileState fine = from_initial(InitialSpec{}, 80);
    for (int i = 0; i < q.cells; ++i) {
        const double lo = i * q.du(), hi = lo + q.du(), v = q.values[i];
        // integral of (u - v)^2 over the cell, closed form
        err_coarse += (std::pow(hi - v, 3) - std::pow(lo - v, 3)) / 3.0;
    }
    for (int i = 0; i < fine.cells; ++i) {
        const double lo = i * fine.du(), hi = lo + fine.du(), v = fine.values[i];
        err_fine += (std::pow(hi - v, 3) - std::pow(lo - v, 3)) / 3.0;
    }
    // Second-order accuracy: error scales like du^2, i.e. by (5/80)^2.
    CHECK(err_fine < err_coarse / 100.0);
}

TEST_CASE("measure round trips") {
    SUBCASE("constant list is a single atom") {
        const StepMeasure m = to_measure(state_of({0.7, 0.7, 0.7}));
        REQUIRE(m.atoms.size() == 1);
        CHECK(m.atoms[0] == 0.7);
        CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("five equal-mass particles, regularly spaced") {
        const StepMeasure m = to_measure(from_initial(InitialSpec{}, 5));
        REQUIRE(m.atoms.size() == 5);
        for (double w : m.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("to_measure then from_measure preserves the state") {
        const auto q = state_of({-0.5, -0.5, 0.25, 0.75});
        const QuantileState back = from_measure(to_measure(q), 4);
        CHECK(back.values == q.values);
    }
}

TEST_CASE("gaussian initial condition is the normal quantile") {
    const QuantileState q = from_initial(InitialSpec{InitialSpec::Kind::Gaussian, {}, 0.0}, 9);
    CHECK(q.values[4] == doctest::Approx(0.0).epsilon(1e-9));  // median cell
    CHECK(std::abs(normal_cdf(q.values[1]) - q.u_mid(1)) < 1e-8);
    CHECK(std::abs(normal_cdf(q.values[7]) - q.u_mid(7)) < 1e-8);
}

TEST_CASE("csv round trip") {
    const auto q = state_of({-1.25, 0.3333333333333333, 0.3333333333333333, 7.5});
    std::stringstream buf;
    write_quantile_csv(q, buf);
    const QuantileState back = read_quantile_csv(buf);
    CHECK(back.cells == q.cells);
    CHECK(back.values == q.values);

    std::stringstream bad("not,a,header\n");
    CHECK_THROWS(read_quantile_csv(bad));
}
