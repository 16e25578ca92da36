#include <cmath>
#include <utility>

#include <doctest.h>

#include "ezmfg/asymptotics.hpp"
#include "ezmfg/errors.hpp"
#include "ezmfg/grid.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/model.hpp"

using namespace ezmfg;

namespace {

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

TEST_CASE("far-field expansion constants frozen against mpmath") {
    FarFieldExpansion e = far_field_expansion(bench());
    CHECK(e.leading[0] == doctest::Approx(-0.18823529411764706).epsilon(1e-14));
    CHECK(e.leading[1] == doctest::Approx(0.18823529411764706).epsilon(1e-14));
    CHECK(e.second_order_coeff[0] == doctest::Approx(0.006200692041522491).epsilon(1e-13));
    CHECK(e.second_order_coeff[1] == doctest::Approx(0.006200692041522491).epsilon(1e-13));
    CHECK(e.Qhat[0] == doctest::Approx(0.039861591695501727).epsilon(1e-13));
    CHECK(e.Qhat[1] == doctest::Approx(0.039861591695501727).epsilon(1e-13));
    CHECK(e.zhat(100.0, 0) == doctest::Approx(0.0072370355293213014).epsilon(1e-13));
    CHECK(e.zhat(100.0, 1) == doctest::Approx(-0.0062226543509965966).epsilon(1e-13));
    CHECK(e.qhat(100.0, 0) == doctest::Approx(-0.00030049974516213016).epsilon(1e-12));
    CHECK(far_field_saving(100.0, 0, bench()) ==
          doctest::Approx(e.leading[0] + e.second_order_coeff[0] / 5.1).epsilon(1e-14));
}

TEST_CASE("far-field structural identities, asymmetric intensities included") {
    for (auto lam : {std::pair{0.4, 0.4}, std::pair{0.3, 0.5}}) {
        ModelParams p = bench();
        p.lam = {lam.first, lam.second};
        FarFieldExpansion e = far_field_expansion(p);
        // zero net drift of the aggregate: lam2 s1 + lam1 s2 = 0
        CHECK(std::fabs(p.lam[1] * e.leading[0] + p.lam[0] * e.leading[1]) < 1e-16);
        // the pair solves its coupled linear system
        const double L = p.rho + p.lam[0] + p.lam[1];
        const double dy2 = (p.y[1] - p.y[0]) * (p.y[1] - p.y[0]);
        for (int j = 0; j < 2; ++j) {
            const int jb = 1 - j;
            const double lhs = (p.rho + p.lam[j]) * e.Qhat[j] - p.lam[j] * e.Qhat[jb];
            const double rhs = 0.5 * p.lam[j] * p.gamma * dy2 *
                               (1.0 - p.rho * p.lam[j] / (L * L) - 2.0 * p.lam[jb] / L);
            CHECK(std::fabs(lhs - rhs) < 1e-12);
        }
    }
    ModelParams p = bench();
    p.lam = {0.3, 0.5};
    FarFieldExpansion e = far_field_expansion(p);
    CHECK(e.Qhat[0] == doctest::Approx(0.024034194992876044).epsilon(1e-13));
    CHECK(e.Qhat[1] == doctest::Approx(0.059596987583960918).epsilon(1e-13));
}

TEST_CASE("zhat correction decays one power faster than the expansion") {
    // the residual of the linearized far-field equation scales like
    // x^{-1-gamma}; doubling x must shrink it by nearly 2^{-1-gamma}
    ModelParams p = bench();
    FarFieldExpansion e = far_field_expansion(p);
    auto resid = [&](double x) {
        const int j = 0, jb = 1;
        return (p.lam[j] * p.lam[jb] * (p.y[jb] - p.y[j]) / (p.rho + p.lam[0] + p.lam[1])) *
               (std::pow(p.rho * x + p.y[jb], -p.gamma) -
                std::pow(p.rho * x + p.y[j], -p.gamma));
    };
    // the doubling ratio approaches 2^{-1-gamma} with a finite-x correction
    // of order 1/x, so the deviation must halve from point to point
    std::vector<double> dev;
    for (double x : {50.0, 100.0, 200.0, 400.0}) {
        const double ratio = resid(2.0 * x) / resid(x);
        dev.push_back(std::fabs(ratio - std::pow(2.0, -1.0 - p.gamma)));
    }
    CHECK(dev.front() < 0.05);
    for (std::size_t i = 1; i < dev.size(); ++i) CHECK(dev[i] < 0.6 * dev[i - 1]);
    CHECK(dev.back() < 0.01);
    // and zhat itself decays like x^{-gamma}
    CHECK(e.zhat(200.0, 0) / e.zhat(100.0, 0) ==
          doctest::Approx(std::pow(5.1 / 10.1, p.gamma)).epsilon(1e-3));
}

TEST_CASE("wide-grid solve matches the expansion on the far-field window") {
    ModelParams p = bench();
    Grid g = build_grid(-0.15, 200.0, 100000, Clustering::sqrt_boundary);
    HjbSolution sol = solve_hjb(p, p.rho, g);
    FarFieldReport ff = validate_far_field(sol, p, g, {50.0, 180.0});
    CHECK(ff.pass);
    CHECK(ff.max_rel_err < 0.10);
    CHECK(ff.monotone_approach);
    CHECK(ff.nodes_checked >= 8);

    NonexistenceReport ne = nonexistence_ratio(sol, p, g, {50.0, 180.0});
    CHECK(ne.pass);
    CHECK(ne.max_rel_err < 0.15);
    CHECK(std::fabs(ne.fitted_power + 1.0) < 0.1);

    SUBCASE("window gating") {
        CHECK_THROWS_AS(validate_far_field(sol, p, g, {0.0, 1.0}), WindowTooSmall);
        CHECK_THROWS_AS(validate_far_field(sol, p, g, {40.0, 180.0}), WindowTooSmall);
        CHECK_THROWS_AS(validate_far_field(sol, p, g, {180.0, 50.0}), WindowTooSmall);
    }
}

TEST_CASE("boundary layer at the test-2 equilibrium rate") {
    ModelParams p = bench();
    Grid g = build_grid(-0.15, 15.0, 2000, Clustering::sqrt_boundary);
    const double r = 0.02488501;
    HjbSolution sol = solve_hjb(p, r, g);
    BoundaryLayerReport rep = boundary_layer(sol, p, r, g);
    CHECK(rep.layer.kappa > 0.0);
    CHECK(std::fabs(rep.fitted_exponent - 0.5) < 0.05);
    CHECK(rep.fitted_coeff ==
          doctest::Approx(rep.layer.sqrt_coeff).epsilon(0.2));
    // the state-2 deviation is regular, so its exponent sits near 1
    CHECK(std::fabs(rep.control_exponent - 1.0) < 0.15);
    CHECK(rep.pass);

    // independent curvature estimate: s1 D^2 v1 -> kappa at the limit
    const double kap2 = kappa_from_curvature(sol, g);
    CHECK(kap2 == doctest::Approx(rep.layer.kappa).epsilon(0.1));

    SUBCASE("requires rho > r") {
        HjbSolution at_rho = solve_hjb(p, p.rho, g);
        CHECK_THROWS_AS(boundary_layer(at_rho, p, p.rho, g), DomainError);
    }
}

TEST_CASE("degenerate deviations are reported, not fitted") {
    ModelParams p = bench();
    Grid g = build_grid(-0.15, 15.0, 200, Clustering::sqrt_boundary);
    const double r = 0.02;
    HjbSolution sol;
    const int n = g.n_nodes();
    for (int j = 0; j < 2; ++j) {
        sol.v[j].assign(n, -4.0 + j);
        sol.dv[j].assign(n, 2.0 - 0.5 * j);
        sol.c[j].assign(n, 0.1);
        sol.s[j].assign(n, 0.0);
    }
    for (int k = 0; k < n; ++k) {
        sol.s[0][k] = r * (g.x[k] - g.x_low());  // deviation exactly zero
        sol.s[1][k] = 0.3;
    }
    CHECK_THROWS_AS(boundary_layer(sol, p, r, g), FitFailure);
}
