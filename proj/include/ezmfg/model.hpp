#pragma once

#include <array>
#include <utility>

#include "ezmfg/errors.hpp"

namespace ezmfg {

enum class Mode { strict, permissive };

// two-income-state household model; state index j is 0-based internally,
// y[0] < y[1], lam[j] is the Poisson intensity of leaving state j
struct ModelParams {
    double rho;                 // discount rate
    double gamma;               // risk aversion
    double psi;                 // elasticity of intertemporal substitution
    double x_low;               // borrowing limit
    std::array<double, 2> y;    // income levels
    std::array<double, 2> lam;  // switching intensities
};

struct DerivedConstants {
    double theta;            // (1 - 1/psi) / (1 - gamma)
    double zeta;             // rho / theta, the discount rate of the rewritten HJB
    bool gamma_psi_warning;  // gamma*psi >= 1 accepted in permissive mode
};

struct ProductionParams {
    double A;        // total factor productivity
    double alpha;    // capital share
    double delta;    // depreciation rate
    double B = 0.0;  // bond supply, Huggett coupling only
};

// checks the standing assumptions and returns the derived constants;
// strict mode additionally requires gamma*psi < 1
DerivedConstants validate(const ModelParams& p, Mode mode = Mode::strict);
void validate_production(const ProductionParams& prod);

// b = rho * ((r + psi*(rho - r)) / rho)^{1/(1-psi)}; r <= b <= rho on [0, rho]
double b_param(double r, const ModelParams& p);

// Epstein-Zin aggregator f(c, v) and its modified form F(c, v) = f + zeta*v
double aggregator_f(double c, double v, const ModelParams& p);
double aggregator_F(double c, double v, const ModelParams& p);

// H(x, y, v, p) = max_c { F(c, v) + (r*x + y - c)*p }; +infinity when p < 0
double hamiltonian(double x, double y, double v, double p, double r, const ModelParams& mp);

// analytic dH/dv at p > 0 (finite differencing cancels badly near the boundary)
double hamiltonian_v(double v, double p, const ModelParams& mp);

// argmax consumption c(v, p) = rho^psi * p^{-psi} * ((1-gamma) v)^{(1-gamma*psi)/(1-gamma)}
double optimal_consumption(double v, double p, const ModelParams& mp);

// slope p at which the optimal consumption equals c; H(., p) attains its
// minimum over p there, so zero-saving nodes get a well-defined derivative
double dual_slope(double c, double v, const ModelParams& mp);

// closed-form sub/supersolution values for income state j
double subsolution_value(double x, int j, double r, const ModelParams& p);    // (r x + y_j)^{1-gamma}/(1-gamma)
double supersolution_value(double x, int j, double r, const ModelParams& p);  // (b (x + y_j/r))^{1-gamma}/(1-gamma)
double supersolution_slope(double x, int j, double r, const ModelParams& p);

// comparison envelope: lower bound from state 0, upper bound from state 1
std::pair<double, double> envelope(double x, double r, const ModelParams& p);

}  // namespace ezmfg
