#include <cmath>

#include <doctest.h>

#include "ezmfg/errors.hpp"
#include "ezmfg/model.hpp"

using namespace ezmfg;

namespace {

// gamma = 2, psi = 0.4: the preference pair used throughout the benchmarks
ModelParams bench() {
    ModelParams p;
    p.rho = 0.05;
    p.gamma = 2.0;
    p.psi = 0.4;
    p.x_low = -0.15;
    p.y = {0.1, 0.5};
    p.lam = {0.4, 0.4};
    return p;
}

}  // namespace

TEST_CASE("derived constants") {
    ModelParams p = bench();
    DerivedConstants d = validate(p);
    CHECK(d.theta == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(d.zeta == doctest::Approx(0.05 / 1.5).epsilon(1e-15));
    CHECK(!d.gamma_psi_warning);
}

TEST_CASE("parameter validation rejects each broken assumption") {
    ModelParams p = bench();
    CHECK_NOTHROW(validate(p));

    SUBCASE("discount rate") {
        p.rho = 0.0;
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
    }
    SUBCASE("risk aversion at or below 1") {
        p.gamma = 0.5;
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
        p.gamma = 1.0;
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
    }
    SUBCASE("EIS outside (0,1)") {
        p.psi = 1.2;
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
        p.psi = 0.0;
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
    }
    SUBCASE("income order") {
        p.y = {0.5, 0.1};
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
    }
    SUBCASE("borrowing limit must stay repayable") {
        p.x_low = -2.5;  // rho*x_low + y1 < 0
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
    }
    SUBCASE("switching intensities") {
        p.lam[0] = 0.0;
        CHECK_THROWS_AS(validate(p), AssumptionViolation);
    }
    SUBCASE("gamma*psi < 1 only binds in strict mode") {
        p.gamma = 2.0;
        p.psi = 0.8;
        CHECK_THROWS_AS(validate(p, Mode::strict), AssumptionViolation);
        DerivedConstants d = validate(p, Mode::permissive);
        CHECK(d.gamma_psi_warning);
    }
}

TEST_CASE("aggregator value frozen against an independent evaluation") {
    ModelParams p = bench();
    // mpmath at 40 digits: f(1, -2) for rho=0.05, gamma=2, psi=0.4
    CHECK(aggregator_f(1.0, -2.0, p) ==
          doctest::Approx(0.043096440627115082).epsilon(1e-14));
    CHECK(aggregator_F(1.0, -2.0, p) ==
          doctest::Approx(aggregator_f(1.0, -2.0, p) + (0.05 / 1.5) * (-2.0)).epsilon(1e-14));
}

TEST_CASE("aggregator collapses to additive CRRA at gamma*psi = 1") {
    ModelParams p = bench();
    p.psi = 0.5;  // gamma = 2, so gamma*psi = 1 exactly
    for (double c : {0.2, 0.7, 1.0, 2.3}) {
        for (double v : {-5.0, -1.0, -0.3}) {
            const double crra = p.rho * (std::pow(c, 1.0 - p.gamma) / (1.0 - p.gamma) - v);
            CHECK(aggregator_f(c, v, p) == doctest::Approx(crra).epsilon(1e-13));
        }
    }
}

TEST_CASE("b parameter: frozen values and the defining identity") {
    ModelParams p = bench();
    CHECK(b_param(0.03, p) == doctest::Approx(0.031646522299232413).epsilon(1e-14));
    CHECK(b_param(0.0246, p) == doctest::Approx(0.027278445013426845).epsilon(1e-14));
    // rho^psi b^{1-psi} = r + psi (rho - r), and r <= b <= rho on [0, rho]
    for (double r : {0.0, 0.01, 0.0246, 0.04, 0.05}) {
        const double b = b_param(r, p);
        CHECK(std::pow(p.rho, p.psi) * std::pow(b, 1.0 - p.psi) ==
              doctest::Approx(r + p.psi * (p.rho - r)).epsilon(1e-14));
        CHECK(b >= r - 1e-15);
        CHECK(b <= p.rho + 1e-15);
    }
    CHECK(b_param(p.rho, p) == doctest::Approx(p.rho).epsilon(1e-14));
}

TEST_CASE("consumption and dual slope invert each other") {
    ModelParams p = bench();
    const double v = -3.0;
    for (double slope : {0.5, 2.0, 11.0}) {
        const double c = optimal_consumption(v, slope, p);
        CHECK(c > 0.0);
        CHECK(dual_slope(c, v, p) == doctest::Approx(slope).epsilon(1e-13));
    }
}

TEST_CASE("hamiltonian attains the consumption envelope") {
    ModelParams p = bench();
    const double x = 1.0, y = 0.5, v = -3.0, slope = 2.0, r = 0.03;
    const double H = hamiltonian(x, y, v, slope, r, p);
    const double cstar = optimal_consumption(v, slope, p);
    CHECK(H == doctest::Approx(aggregator_F(cstar, v, p) + (r * x + y - cstar) * slope)
                   .epsilon(1e-13));
    for (double c : {0.5 * cstar, 0.9 * cstar, 1.1 * cstar, 2.0 * cstar}) {
        CHECK(H >= aggregator_F(c, v, p) + (r * x + y - c) * slope - 1e-12);
    }
}

TEST_CASE("analytic dH/dv matches a centered difference") {
    ModelParams p = bench();
    const double x = 1.0, y = 0.1, slope = 2.0, r = 0.03;
    for (double v : {-4.0, -1.5}) {
        const double h = 1e-6 * std::fabs(v);
        const double fd = (hamiltonian(x, y, v + h, slope, r, p) -
                           hamiltonian(x, y, v - h, slope, r, p)) /
                          (2.0 * h);
        CHECK(hamiltonian_v(v, slope, p) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("production validation") {
    ProductionParams prod;
    prod.A = 0.95;
    prod.alpha = 0.35;
    prod.delta = 0.1;
    CHECK_NOTHROW(validate_production(prod));
    SUBCASE("TFP") {
        prod.A = 0.0;
        CHECK_THROWS_AS(validate_production(prod), AssumptionViolation);
    }
    SUBCASE("capital share") {
        prod.alpha = 1.0;
        CHECK_THROWS_AS(validate_production(prod), AssumptionViolation);
    }
    SUBCASE("depreciation") {
        prod.delta = -0.1;
        CHECK_THROWS_AS(validate_production(prod), AssumptionViolation);
    }
}
