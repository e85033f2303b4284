#pragma once

#include <Eigen/Core>

namespace homogh {

// Coordinate basis (du, dv, dt, dtheta) on W; (du, dv, dtheta) on a slice.
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

/// Coefficient matrix of a ^ b, so that (a ^ b)(X, Y) = X^T M Y.
template <class V>
auto wedge(const V& a, const V& b) {
    return (a * b.transpose() - b * a.transpose()).eval();
}

/// X _| F as a 1-form: Y -> F(X, Y).
template <class M, class V>
auto interior(const V& x, const M& f) {
    return (f.transpose() * x).eval();
}

/// Coefficient of a ^ F on e1 ^ e2 ^ e3 for a 1-form a and 2-form F in three
/// dimensions.
inline double wedge_1_2(const Eigen::Vector3d& a, const Mat3& f) {
    return a(0) * f(1, 2) - a(1) * f(0, 2) + a(2) * f(0, 1);
}

/// Coefficient of a ^ b ^ c on e1 ^ e2 ^ e3.
inline double wedge3(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
    Mat3 m;
    m.row(0) = a.transpose();
    m.row(1) = b.transpose();
    m.row(2) = c.transpose();
    return m.determinant();
}

}  // namespace homogh
