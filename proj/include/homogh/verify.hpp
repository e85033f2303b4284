#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "homogh/ansatz.hpp"
#include "homogh/fd.hpp"

namespace homogh {

/// |d f / d conj(z)| by central differences.
double cauchy_riemann_residual(const std::function<Complex(Complex)>& f, Complex z,
                               const FDConfig& cfg = {});

/// phi = eta(d/dt) + i rho V read back from the 4D assembly at time t.
Complex assembled_phi(const HolomorphicData& data, Complex z, double t);

/// max |d xi - Im(phi) m du ^ dv| at z.
double xi_exactness_residual(const HolomorphicData& data, Complex z, const FDConfig& cfg = {});

/// Max coefficient of d eta + *dV in x-coordinates, with the Euclidean Hodge
/// star and the orientation of (dx1, dx2, dx3).
double curl_residual(const HolomorphicData& data, Complex z, double t, const FDConfig& cfg = {});

/// Max over i of |d Omega_i| by finite differences in (u, v, t, theta).
double closedness_residual(const HolomorphicData& data, const FourPoint& p,
                           const FDConfig& cfg = {});

/// J_i = -g^{-1} Omega_i, i.e. Omega_i(X, Y) = g(J_i X, Y). Returns the largest
/// operator-norm residual of J_i^2 + 1 and J_1 J_2 - J_3 (and cyclic).
double quaternion_check(const Mat4& g, const std::array<Mat4, 3>& omega);

using MetricSampler = std::function<Mat4(const Vec4&)>;

struct CurvatureReport {
    Vec4 point;
    std::array<double, 64> christoffel{};   // Gamma^l_ij at index 16 l + 4 i + j
    std::array<double, 256> riemann{};      // R^l_{ijk} at index 64 l + 16 i + 4 j + k
    double max_riemann = 0.0;
    double ricci_norm = 0.0;
    double noise_floor = 0.0;
};

/// Christoffel symbols from differences of g, Riemann from differences of the
/// Christoffel symbols. The noise floor is the largest change in any Riemann
/// or Ricci component when the step is halved.
CurvatureReport curvature(const MetricSampler& g, const Vec4& point, const FDConfig& cfg = {});

MetricSampler metric_sampler(const HolomorphicData& data);

struct ContactSample {
    Complex z;
    double ratio = 0.0;      // (beta ^ d beta) / (omega1 ^ omega2 ^ omega3)
    double identity = 0.0;   // |ratio + b1^2 + b2^2 + b3^2|
};

struct BetaAnalysis {
    std::vector<Complex> roots;
    int seeds = 0;
    int skipped_seeds = 0;
    int critical_points = 0;        // zeros of psi' found, with or without Re psi = 0
    double min_root_separation = 0.0;
    std::vector<ContactSample> contact;
    double max_identity_residual = 0.0;
    double max_ratio = 0.0;         // largest (least negative) ratio
};

/// Zero locus of beta (d Im psi = 0 and Re psi = 0) by damped Newton from an
/// n x n grid of seeds within `radius`, plus the sign identity for beta ^ d beta
/// at `contact_samples` points away from the roots.
BetaAnalysis beta_analysis(const HolomorphicData& data, int grid, double radius = 0.9,
                           int contact_samples = 500, std::uint64_t seed = 1,
                           const FDConfig& cfg = {});

/// Largest residual of d omega_i - beta ^ omega_i - omega_j ^ omega_k on the slice.
double structure_equation_residual(const HolomorphicData& data, Complex z, double theta,
                                   const FDConfig& cfg = {});

/// Pass rule: residual below budget, and budget above ten times the noise floor.
struct CheckResult {
    std::string name;
    double residual = 0.0;
    double budget = 0.0;
    double noise_floor = 0.0;
    int samples = 0;
    bool passed = false;
    std::string note;
};

CheckResult make_check(std::string name, double residual, double budget, double noise_floor,
                       int samples, std::string note = {});

struct VerifyConfig {
    int points = 50;
    double radius = 0.9;
    std::uint64_t seed = 1;
    FDConfig fd;
    FDConfig curvature_fd{1e-3, 2, 1e-4};   // nested differences want a wider step
    double budget_cr = 1e-8;
    double budget_xi = 1e-5;
    double budget_curl = 1e-4;
    double budget_closed = 1e-4;
    double budget_quaternion = 1e-8;
    double budget_slice = 1e-8;
    double budget_structure = 1e-4;
    double budget_beta = 1e-6;
    double budget_riemann_flat = 1e-3;
    double budget_ricci = 1e-4;
    double clearance = 0.02;
    bool curvature = true;
    int curvature_points = 3;
};

/// Random points in the disc of the given radius, deterministic in `seed`.
std::vector<Complex> sample_disc(int count, double radius, std::uint64_t seed);

/// As sample_disc, rejecting points whose image under Phi lies within
/// `clearance` of a puncture, where the coordinate metric degenerates.
std::vector<Complex> sample_interior(const HolomorphicData& data, int count, double radius,
                                     std::uint64_t seed, double clearance = 0.02);

std::vector<CheckResult> verify_suite(const HolomorphicData& data, const VerifyConfig& cfg);

}  // namespace homogh
