#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "homogh/complex_kernel.hpp"
#include "homogh/covering.hpp"
#include "homogh/forms.hpp"

namespace homogh {

/// rho_0 = Im psi (canonical) or rho_0 = exp(h) Im psi for a user function h
/// given with its gradient (h, h_u, h_v).
struct Rho0Policy {
    using Offset = std::function<std::array<double, 3>(Complex)>;
    Offset offset;
    std::string label = "canonical";

    bool canonical() const { return !offset; }
    static Rho0Policy custom(Offset h, std::string label);
};

class XiCache;

/// Values depending on z alone.
struct DiscPoint {
    Complex z;
    Complex psi, dpsi;     // psi and psi'
    Complex phi, dphi;     // phi = -1/psi and phi'
    PhiJet jet;
    double log_rho0 = 0.0;
    Eigen::Vector2d dlog_rho0;   // (d/du, d/dv) log rho_0
    Eigen::Vector2d xi;          // (xi_u, xi_v)
};

/// Input of the ansatz: covering Phi, the holomorphic psi (phi = -1/psi), the
/// rho_0 gauge, and the base point of the xi homotopy.
class HolomorphicData {
public:
    HolomorphicData(std::shared_ptr<const Phi> map, HoloFn psi, Rho0Policy rho0 = {},
                    Complex z0 = {}, std::string label = {});

    /// Blaschke-derived psi over the modular covering.
    static HolomorphicData blaschke(const BlaschkeSpec& spec,
                                    const std::optional<MuSpec>& mu = std::nullopt,
                                    Rho0Policy rho0 = {});
    /// phi = i/2 over the chart inclusion: the flat one-centre metric.
    static HolomorphicData flat();

    const Phi& map() const { return *map_; }
    const HoloFn& psi() const { return psi_; }
    const Rho0Policy& rho0() const { return rho0_; }
    Complex base_point() const { return z0_; }
    const std::string& label() const { return label_; }
    bool constant_phi() const { return constant_; }

    /// Multiplies V after assembly. Only for detector-sensitivity experiments.
    double v_multiplier() const { return v_mult_; }
    HolomorphicData with_v_multiplier(double k) const;

    DiscPoint at(Complex z) const;
    /// Im phi times the pullback area factor: the density of d xi.
    double xi_density(Complex z) const;
    /// F(z) = int_0^1 s f(z0 + s (z - z0)) ds, memoized.
    double xi_radial_factor(Complex z) const;

private:
    std::shared_ptr<const Phi> map_;
    HoloFn psi_;
    Rho0Policy rho0_;
    Complex z0_;
    std::string label_;
    bool constant_ = false;
    double v_mult_ = 1.0;
    std::shared_ptr<XiCache> cache_;
};

struct FourPoint {
    Complex z;
    double t = 0.0;
    double theta = 0.0;
};

struct MomentumValue {
    Vec3 x;
    double rho = 0.0;
};

MomentumValue momentum_map(const HolomorphicData& data, Complex z, double t);
double potential_V(const HolomorphicData& data, Complex z, double t);
/// (xi_u, xi_v) of the straight-segment homotopy antiderivative.
Eigen::Vector2d xi_form(const HolomorphicData& data, Complex z);
Vec4 eta_form(const HolomorphicData& data, Complex z, double t);

/// Everything assembled at one point of W.
struct FourFrame {
    FourPoint point;
    DiscPoint disc;
    Vec3 x;
    double rho = 0.0;
    double V = 0.0;
    Eigen::Matrix<double, 3, 4> dx;   // rows dx_i over (du, dv, dt, dtheta)
    Vec4 eta;
    Vec4 connection;                   // dtheta + eta
    std::array<Mat4, 3> omega;
    Mat4 g;
};

FourFrame assemble(const HolomorphicData& data, const FourPoint& p);

std::array<Mat4, 3> symplectic_forms(const HolomorphicData& data, const FourPoint& p);
/// Throws DegenerateMetricError if the assembled metric is not positive definite.
Mat4 metric(const HolomorphicData& data, const FourPoint& p);

/// t of the canonical slice over z: log Im psi - log rho_0.
double slice_t(const HolomorphicData& data, Complex z);

struct SliceFrame {
    Complex z;
    double theta = 0.0;
    double t = 0.0;
    double rho = 0.0;
    double V = 0.0;
    Vec3 x;
    // 1-forms on the slice over (du, dv, dtheta)
    std::array<Eigen::Vector3d, 3> omega;
    Eigen::Vector3d beta;
    Mat3 g3;
    Mat3 gs;
    Eigen::Matrix<double, 4, 3> embedding;  // d(u, v, t, theta)/d(u, v, theta)
};

SliceFrame slice_and_contact(const HolomorphicData& data, Complex z, double theta);

/// |psi|^-2 [(d Im psi)^2 + (Im psi)^2 Phi^* g_{S^2}] in (du, dv).
Mat2 g_sigma(const HolomorphicData& data, Complex z);

/// alpha_i = (d/dt _| Omega_i) on {t = 0}, over (du, dv, dtheta).
std::array<Eigen::Vector3d, 3> alpha_forms(const HolomorphicData& data, Complex z,
                                           double theta);

struct StructureCoeffs {
    Eigen::Vector3d beta0;
    double lambda0 = 0.0;
    double residual = 0.0;
};

/// Least-squares fit of d alpha_i = beta0 ^ alpha_i + Lambda0 alpha_j ^ alpha_k
/// with d alpha_i by finite differences of step h.
StructureCoeffs structure_coeffs(const HolomorphicData& data, Complex z, double theta,
                                 double h = 1e-4);

struct BetaCrossCheck {
    double residual = 0.0;
    Eigen::Vector3d beta_system;
    Eigen::Vector3d gamma;
    bool excluded = false;
};

/// Solves the (beta, gamma) linear system built from the 4D assembly and
/// compares beta with the explicit formula.
BetaCrossCheck beta_cross_check(const HolomorphicData& data, Complex z, double theta);

}  // namespace homogh
