#pragma once

#include <vector>

#include "ezmfg/errors.hpp"

namespace ezmfg {

// square banded matrix with equal lower and upper bandwidth, LU factorization
// without pivoting; callers guarantee diagonal dominance
class BandedMatrix {
public:
    BandedMatrix(int n, int bw) : n_(n), bw_(bw), a_(static_cast<size_t>(n) * (2 * bw + 1), 0.0) {}

    double& at(int i, int j) { return a_[static_cast<size_t>(i) * (2 * bw_ + 1) + (j - i + bw_)]; }
    double at(int i, int j) const {
        return a_[static_cast<size_t>(i) * (2 * bw_ + 1) + (j - i + bw_)];
    }

    int n() const { return n_; }
    int bandwidth() const { return bw_; }

    void factor();
    void solve(std::vector<double>& b) const;

private:
    int n_;
    int bw_;
    std::vector<double> a_;
    bool factored_ = false;
};

}  // namespace ezmfg
