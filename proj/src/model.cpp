#include "ezmfg/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ezmfg {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

// (1-gamma)*v must be strictly positive; all fractional powers act on it
double w_of(double v, const ModelParams& p) {
    if (!(v < -1e-300)) {
        throw DomainError("value must be strictly negative, got " + num(v));
    }
    return (1.0 - p.gamma) * v;
}

}  // namespace

DerivedConstants validate(const ModelParams& p, Mode mode) {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(p.rho) || !finite(p.gamma) || !finite(p.psi) || !finite(p.x_low) ||
        !finite(p.y[0]) || !finite(p.y[1]) || !finite(p.lam[0]) || !finite(p.lam[1])) {
        throw AssumptionViolation("params", "all fields must be finite");
    }
    if (!(p.rho > 0.0)) {
        throw AssumptionViolation("rho", "discount rate must be positive, got " + num(p.rho));
    }
    if (!(p.gamma > 1.0)) {
        throw AssumptionViolation("gamma", "risk aversion must exceed 1, got " + num(p.gamma));
    }
    if (!(p.psi > 0.0) || !(p.psi < 1.0)) {
        throw AssumptionViolation("psi", "EIS must lie in (0, 1), got " + num(p.psi));
    }
    if (!(p.y[0] < p.y[1])) {
        throw AssumptionViolation("y", "income levels must satisfy y1 < y2");
    }
    if (!(p.rho * p.x_low + p.y[0] > 0.0)) {
        throw AssumptionViolation("x_low", "rho*x_low + y1 must be positive, got " +
                                               num(p.rho * p.x_low + p.y[0]));
    }
    if (!(p.lam[0] > 0.0) || !(p.lam[1] > 0.0)) {
        throw AssumptionViolation("lam", "switching intensities must be positive");
    }
    bool warn = false;
    if (p.gamma * p.psi >= 1.0) {
        if (mode == Mode::strict) {
            throw AssumptionViolation("gamma*psi", "strict mode requires gamma*psi < 1, got " +
                                                       num(p.gamma * p.psi));
        }
        warn = true;
    }
    double theta = (1.0 - 1.0 / p.psi) / (1.0 - p.gamma);
    return DerivedConstants{theta, p.rho / theta, warn};
}

void validate_production(const ProductionParams& prod) {
    if (!(prod.A > 0.0)) {
        throw AssumptionViolation("A", "TFP must be positive, got " + num(prod.A));
    }
    if (!(prod.alpha > 0.0) || !(prod.alpha < 1.0)) {
        throw AssumptionViolation("alpha", "capital share must lie in (0, 1), got " + num(prod.alpha));
    }
    if (!(prod.delta >= 0.0)) {
        throw AssumptionViolation("delta", "depreciation must be nonnegative, got " + num(prod.delta));
    }
}

double b_param(double r, const ModelParams& p) {
    if (!(r >= 0.0) || !(r <= p.rho)) {
        throw DomainError("b_param requires 0 <= r <= rho, got r = " + num(r));
    }
    return p.rho * std::pow((r + p.psi * (p.rho - r)) / p.rho, 1.0 / (1.0 - p.psi));
}

double aggregator_F(double c, double v, const ModelParams& p) {
    if (!(c > 0.0)) {
        throw DomainError("consumption must be positive, got " + num(c));
    }
    double w = w_of(v, p);
    double theta = (1.0 - 1.0 / p.psi) / (1.0 - p.gamma);
    double ies = 1.0 - 1.0 / p.psi;
    return (p.rho / ies) * std::pow(c, ies) * std::pow(w, 1.0 - theta);
}

double aggregator_f(double c, double v, const ModelParams& p) {
    double theta = (1.0 - 1.0 / p.psi) / (1.0 - p.gamma);
    return aggregator_F(c, v, p) - (p.rho / theta) * v;
}

double hamiltonian(double x, double y, double v, double p, double r, const ModelParams& mp) {
    double w = w_of(v, mp);
    if (p < 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    double e = (1.0 - mp.gamma * mp.psi) / (1.0 - mp.gamma);
    return (r * x + y) * p +
           std::pow(mp.rho, mp.psi) / (mp.psi - 1.0) * std::pow(p, 1.0 - mp.psi) * std::pow(w, e);
}

double hamiltonian_v(double v, double p, const ModelParams& mp) {
    if (!(p > 0.0)) {
        throw DomainError("hamiltonian_v requires p > 0, got " + num(p));
    }
    double w = w_of(v, mp);
    double e = mp.gamma * (1.0 - mp.psi) / (1.0 - mp.gamma);
    return std::pow(mp.rho, mp.psi) * (1.0 - mp.gamma * mp.psi) / (mp.psi - 1.0) *
           std::pow(p, 1.0 - mp.psi) * std::pow(w, e);
}

double optimal_consumption(double v, double p, const ModelParams& mp) {
    if (!(p > 0.0)) {
        throw DomainError("optimal consumption requires p > 0, got " + num(p));
    }
    double w = w_of(v, mp);
    double e = (1.0 - mp.gamma * mp.psi) / (1.0 - mp.gamma);
    return std::pow(mp.rho, mp.psi) * std::pow(p, -mp.psi) * std::pow(w, e);
}

double dual_slope(double c, double v, const ModelParams& mp) {
    if (!(c > 0.0)) {
        throw DomainError("dual_slope requires c > 0, got " + num(c));
    }
    double w = w_of(v, mp);
    double e = (1.0 / mp.psi - mp.gamma) / (1.0 - mp.gamma);
    return mp.rho * std::pow(c, -1.0 / mp.psi) * std::pow(w, e);
}

double subsolution_value(double x, int j, double r, const ModelParams& p) {
    double base = r * x + p.y[j];
    if (!(base > 0.0)) {
        throw DomainError("r*x + y_j must be positive, got " + num(base));
    }
    return std::pow(base, 1.0 - p.gamma) / (1.0 - p.gamma);
}

double supersolution_value(double x, int j, double r, const ModelParams& p) {
    if (!(r > 0.0) || !(r <= p.rho)) {
        throw DomainError("supersolution requires 0 < r <= rho, got r = " + num(r));
    }
    double b = b_param(r, p);
    double base = b * (x + p.y[j] / r);
    if (!(base > 0.0)) {
        throw DomainError("b*(x + y_j/r) must be positive, got " + num(base));
    }
    return std::pow(base, 1.0 - p.gamma) / (1.0 - p.gamma);
}

double supersolution_slope(double x, int j, double r, const ModelParams& p) {
    if (!(r > 0.0) || !(r <= p.rho)) {
        throw DomainError("supersolution requires 0 < r <= rho, got r = " + num(r));
    }
    double b = b_param(r, p);
    return std::pow(b, 1.0 - p.gamma) * std::pow(x + p.y[j] / r, -p.gamma);
}

std::pair<double, double> envelope(double x, double r, const ModelParams& p) {
    double lower = subsolution_value(x, 0, r, p);
    double upper = supersolution_value(x, 1, r, p);
    return {lower, upper};
}

}  // namespace ezmfg
