#pragma once

#include <functional>

#include <Eigen/Core>

namespace homogh {

struct FDConfig {
    double h = 1e-4;
    int richardson = 1;
    double budget = 1e-4;

    bool operator==(const FDConfig&) const = default;
};

using Sampler = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central differences with `richardson` extrapolation levels: column k is the
/// derivative of the sampled vector along coordinate k. Library errors raised
/// inside the stencil are rethrown as StencilError.
Eigen::MatrixXd fd_jacobian(const Sampler& f, const Eigen::VectorXd& x, const FDConfig& cfg);

/// d of a 1-form field (coefficients over the coordinate basis):
/// (da)_ij = d_i a_j - d_j a_i.
Eigen::MatrixXd fd_d1(const Sampler& form, const Eigen::VectorXd& x, const FDConfig& cfg);

/// d of a 2-form field sampled as a column-major n x n matrix. Returns the
/// coefficients on e_i ^ e_j ^ e_k for i < j < k in lexicographic order.
Eigen::VectorXd fd_d2(const Sampler& form, const Eigen::VectorXd& x, const FDConfig& cfg);

}  // namespace homogh
