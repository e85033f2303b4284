#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "homogh/complex_kernel.hpp"
#include "homogh/tessellation.hpp"

namespace homogh {

using Vec3 = Eigen::Vector3d;

struct ThetaConfig {
    double threshold = 1e-16;
    int max_terms = 64;
};

/// Jacobi theta constants with nome q = exp(i pi tau). Require Im tau > 0.05.
Complex theta2(Complex tau, const ThetaConfig& cfg = {});
Complex theta3(Complex tau, const ThetaConfig& cfg = {});
Complex theta4(Complex tau, const ThetaConfig& cfg = {});

/// Modular lambda function theta2^4 / theta3^4, evaluated after reduction into
/// the SL2(Z) fundamental domain.
Complex lambda_map(Complex tau, const ThetaConfig& cfg = {});
/// d lambda / d tau, from i pi lambda (1 - lambda) theta3^4 at the reduced point.
Complex lambda_prime(Complex tau, const ThetaConfig& cfg = {});

/// log lambda and log(d lambda / d tau), finite even where lambda under- or
/// overflows near a cusp.
struct LambdaLog {
    Complex log_value;
    Complex log_deriv;
};
LambdaLog lambda_log(Complex tau, const ThetaConfig& cfg = {});

/// Value of a conformal map into S^2 at one point, with its first derivative.
/// The chart is p = (2 Re w, -2 Im w, |w|^2 - 1)/(|w|^2 + 1), so that w is an
/// orientation-compatible holomorphic coordinate on the sphere.
struct PhiJet {
    Complex w;             // may be non-finite near the pole w = infinity
    Complex dw;            // dw/dz, may be non-finite likewise
    double log_abs_w = 0.0;
    Vec3 p;                // point on S^2
    Vec3 e1, e2;           // unit images of d/d(Re w), d/d(Im w)
    Complex dw_phase;      // dw/dz / |dw/dz|
    double log_sqrt_m = 0.0;  // log (2 |dw/dz| / (1 + |w|^2))

    /// Pullback metric and area factor m = |dw/dz|^2 4 / (1 + |w|^2)^2.
    double m() const;
    /// Differential of p along the disc direction e (as a complex number).
    Vec3 dp(Complex e) const;
};

/// Sphere point and frame from w given in polar form.
PhiJet sphere_jet(double log_abs_w, Complex w_phase, Complex log_dw);

class Phi {
public:
    virtual ~Phi() = default;
    virtual PhiJet eval(Complex z) const = 0;
    virtual std::string name() const = 0;
    /// Spherical distance from Phi(z) to the nearest puncture (infinite when the
    /// map has none).
    virtual double puncture_clearance(Complex z) const;
};

/// Phi = lambda o cayley: the universal covering of the thrice-punctured sphere.
class CoveringPhi final : public Phi {
public:
    explicit CoveringPhi(ThetaConfig cfg = {}) : cfg_(cfg) {}
    PhiJet eval(Complex z) const override;
    std::string name() const override { return "covering"; }
    double puncture_clearance(Complex z) const override;

private:
    ThetaConfig cfg_;
};

/// w = z: the standard chart inclusion.
class ChartPhi final : public Phi {
public:
    PhiJet eval(Complex z) const override;
    std::string name() const override { return "chart"; }
};

PhiJet phi(Complex z, const ThetaConfig& cfg = {});

/// (m, m): metric factor and area factor of Phi^* g_{S^2} in (u, v).
std::array<double, 2> pullback_factors(const Phi& map, Complex z);

/// Stereographic lifts of w = 0, 1, infinity.
std::array<Vec3, 3> punctures();

double spherical_distance(const Vec3& a, const Vec3& b);

/// Cusp parity class attached to puncture j (1, 2, 3).
int puncture_of_cusp(const Farey& f);

struct HororegionResult {
    bool member = false;
    std::optional<Farey> cusp;
    std::optional<std::size_t> vertex;
};

/// Is Phi(z) within r (or 2r) of puncture j? Members are attributed to the
/// nearest cusp of the covering, reported as an enumerated vertex if present.
HororegionResult hororegion_test(const Phi& map, const Tessellation& tess, Complex z, int j,
                                 double r, bool doubled);

}  // namespace homogh
