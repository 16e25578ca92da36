#include "ezmfg/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ezmfg {

void BandedMatrix::factor() {
    for (int k = 0; k < n_; ++k) {
        double piv = at(k, k);
        if (!(std::abs(piv) > 1e-300)) {
            throw SingularSolve("zero pivot at row " + std::to_string(k));
        }
        int iend = std::min(k + bw_, n_ - 1);
        int jend = std::min(k + bw_, n_ - 1);
        for (int i = k + 1; i <= iend; ++i) {
            double l = at(i, k) / piv;
            at(i, k) = l;
            for (int j = k + 1; j <= jend; ++j) {
                at(i, j) -= l * at(k, j);
            }
        }
    }
    factored_ = true;
}

void BandedMatrix::solve(std::vector<double>& b) const {
    if (!factored_) {
        throw SingularSolve("solve called before factor");
    }
    // forward substitution with the unit-diagonal L factor
    for (int i = 0; i < n_; ++i) {
        double s = b[i];
        int j0 = std::max(0, i - bw_);
        for (int j = j0; j < i; ++j) {
            s -= at(i, j) * b[j];
        }
        b[i] = s;
    }
    // back substitution with U
    for (int i = n_ - 1; i >= 0; --i) {
        double s = b[i];
        int j1 = std::min(n_ - 1, i + bw_);
        for (int j = i + 1; j <= j1; ++j) {
            s -= at(i, j) * b[j];
        }
        b[i] = s / at(i, i);
    }
}

}  // namespace ezmfg
