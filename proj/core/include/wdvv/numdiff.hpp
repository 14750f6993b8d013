#pragma once

// Central differences with Richardson extrapolation for matrix-valued
// functions of one real displacement.

#include <Eigen/Dense>
#include <functional>

namespace wdvv {

using MatrixFamily = std::function<Eigen::MatrixXcd(double)>;

/// d/dt f(t) at t = 0 from central differences at h, h/2, h/4 combined by
/// two Richardson levels (truncation error O(h^6)). With richardson off a
/// single central difference at h is returned.
Eigen::MatrixXcd central_derivative(const MatrixFamily& f, double h, bool richardson = true);

}  // namespace wdvv
