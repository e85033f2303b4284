#include <doctest.h>

#include "homogh/error.hpp"
#include "homogh/fd.hpp"
#include "homogh/verify.hpp"

using namespace homogh;

namespace {

const std::vector<Complex> kTargets{{1, 0}, {0, 1}, {-1, 0}};

const HolomorphicData& blaschke_data() {
    static const HolomorphicData d = HolomorphicData::blaschke(vertex_targeted_spec(kTargets, 2));
    return d;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(v.size());
    int k = 0;
    for (double x : v) out(k++) = x;
    return out;
}

Mat4 product_metric(const Vec4& q) {
    // S^2 x R^2 with polar angle q(0)
    Mat4 g = Mat4::Identity();
    g(1, 1) = std::sin(q(0)) * std::sin(q(0));
    return g;
}

Mat4 ricci_of(const CurvatureReport& r) {
    Mat4 ric = Mat4::Zero();
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) ric(i, k) += r.riemann[64 * l + 16 * i + 4 * l + k];
    return ric;
}

}  // namespace

TEST_CASE("exterior derivative examples") {
    Sampler u_dv = [](const Eigen::VectorXd& x) { return vec({0.0, x(0)}); };
    auto d1 = fd_d1(u_dv, vec({0.3, -0.2}), FDConfig{});
    CHECK(std::abs(d1(0, 1) - 1.0) < 1e-12);
    CHECK(std::abs(d1(1, 0) + 1.0) < 1e-12);

    Sampler u2_dv = [](const Eigen::VectorXd& x) { return vec({0.0, x(0) * x(0)}); };
    CHECK(std::abs(fd_d1(u2_dv, vec({0.7, 0.1}), FDConfig{})(0, 1) - 1.4) < 1e-10);

    // d(d f) for f = u^2 v, written as a 2-form in three variables
    Sampler df = [](const Eigen::VectorXd& x) {
        return vec({2 * x(0) * x(1), x(0) * x(0), 0.0});
    };
    CHECK(fd_d1(df, vec({0.4, 0.9, 0.1}), FDConfig{}).cwiseAbs().maxCoeff() < 1e-9);

    Sampler bad = [](const Eigen::VectorXd&) -> Eigen::VectorXd { throw DegenerateMetricError("x"); };
    CHECK_THROWS_AS(fd_jacobian(bad, vec({0.0}), FDConfig{}), StencilError);
}

TEST_CASE("cauchy-riemann residual") {
    CHECK(cauchy_riemann_residual([](Complex z) { return z * z; }, {0.3, 0.4}) < 1e-10);
    CHECK(std::abs(cauchy_riemann_residual([](Complex z) { return std::conj(z); }, {0.3, 0.4}) -
                   1.0) < 1e-8);
    const auto& d = blaschke_data();
    for (auto z : sample_interior(d, 100, 0.9, 21)) {
        CHECK(cauchy_riemann_residual([&](Complex x) { return assembled_phi(d, x, 0.0); }, z) < 1e-8);
        CHECK(std::abs(assembled_phi(d, z, 0.0) + 1.0 / d.psi().value(z)) < 1e-12);
    }
}

TEST_CASE("xi exactness") {
    CHECK(xi_exactness_residual(HolomorphicData::flat(), {0.2, 0.3}) < 1e-5);
    for (auto z : sample_interior(blaschke_data(), 50, 0.9, 22))
        CHECK(xi_exactness_residual(blaschke_data(), z) < 1e-5);
}

TEST_CASE("curl detects a corrupted potential") {
    auto flat = HolomorphicData::flat();
    CHECK(curl_residual(flat, {0.3, -0.4}, 0.2) < 1e-5);
    const auto& d = blaschke_data();
    auto bad = d.with_v_multiplier(1.01);
    double worst_bad = 0.0;
    for (auto z : sample_interior(d, 50, 0.9, 23)) {
        CHECK(curl_residual(d, z, 0.1) < 1e-4);
        worst_bad = std::max(worst_bad, curl_residual(bad, z, 0.1));
    }
    CHECK(worst_bad > 1e-3);

    // both sides of the equivalence fail together on the corrupted data
    double cr_bad = 0.0;
    for (auto z : sample_interior(d, 10, 0.9, 24))
        cr_bad = std::max(cr_bad, cauchy_riemann_residual(
                                      [&](Complex x) { return assembled_phi(bad, x, 0.0); }, z));
    CHECK(cr_bad > 1e-8);
}

TEST_CASE("closedness and quaternion relations") {
    auto flat = HolomorphicData::flat();
    const auto& d = blaschke_data();
    auto zs = sample_interior(d, 50, 0.9, 25);
    for (std::size_t k = 0; k < zs.size(); ++k) {
        FourPoint p{zs[k], -0.5 + 0.02 * double(k), 0.1 * double(k)};
        CHECK(closedness_residual(d, p) < 1e-4);
        CHECK(closedness_residual(flat, p) < 1e-4);
    }
    for (auto z : sample_interior(d, 100, 0.9, 26)) {
        FourPoint p{z, 0.25, 1.0};
        auto f = assemble(d, p);
        CHECK(quaternion_check(f.g, f.omega) < 1e-8);
        // Omega_i(X, Y) = g(J_i X, Y) with J_i = -g^{-1} Omega_i
        for (int i = 0; i < 3; ++i) {
            Mat4 J = -f.g.inverse() * f.omega[i];
            Mat4 back = J.transpose() * f.g;
            CHECK((back - f.omega[i]).cwiseAbs().maxCoeff() < 1e-10 * f.omega[i].cwiseAbs().maxCoeff());
        }
    }
    auto ff = assemble(flat, {{0.1, 0.2}, 0.0, 0.0});
    CHECK(quaternion_check(ff.g, ff.omega) < 1e-8);
    CHECK_THROWS_AS(quaternion_check(-Mat4::Identity(), ff.omega), DegenerateMetricError);
}

TEST_CASE("curvature on known metrics") {
    MetricSampler euclid = [](const Vec4&) { return Mat4::Identity(); };
    CHECK(curvature(euclid, Vec4(0.1, 0.2, 0.3, 0.4)).max_riemann < 1e-9);

    const double th = 0.9;
    auto r = curvature(product_metric, Vec4(th, 0.3, 0.0, 0.0), FDConfig{1e-3, 2, 1e-4});
    Mat4 expected = Mat4::Zero();
    expected(0, 0) = 1.0;
    expected(1, 1) = std::sin(th) * std::sin(th);
    CHECK((ricci_of(r) - expected).cwiseAbs().maxCoeff() < 1e-6);
    // R^0_{101} = sin^2 for the unit sphere
    CHECK(r.riemann[64 * 0 + 16 * 1 + 4 * 0 + 1] == doctest::Approx(std::sin(th) * std::sin(th)).epsilon(1e-6));
}

TEST_CASE("flat reference and convergence order") {
    auto flat = HolomorphicData::flat();
    auto g = metric_sampler(flat);
    Vec4 q(0.3, 0.2, 0.0, 0.3);
    auto r = curvature(g, q, FDConfig{1e-3, 2, 1e-4});
    CHECK(r.max_riemann < 1e-3);
    CHECK(r.noise_floor < 1e-4);

    // Richardson-once scheme: error falls by ~16 per halving
    double a = curvature(g, q, FDConfig{0.04, 1, 1e-4}).max_riemann;
    double b = curvature(g, q, FDConfig{0.02, 1, 1e-4}).max_riemann;
    CHECK(a / b >= 4.0);
    // plain central differences approach 4 from below
    double c = curvature(g, q, FDConfig{0.02, 0, 1e-4}).max_riemann;
    double e = curvature(g, q, FDConfig{0.01, 0, 1e-4}).max_riemann;
    CHECK(c / e == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("blaschke probe separates Ricci from Riemann") {
    const auto& d = blaschke_data();
    auto z = sample_interior(d, 1, 0.9, 1).front();
    auto r = curvature(metric_sampler(d), Vec4(z.real(), z.imag(), 0.0, 0.3), FDConfig{1e-3, 2, 1e-4});
    CHECK(r.ricci_norm < 10 * r.noise_floor);
    CHECK(r.max_riemann > 100 * r.noise_floor);
}

TEST_CASE("beta zero locus and contact sign") {
    CHECK_THROWS_AS(beta_analysis(HolomorphicData::flat(), 10), InvalidDataError);
    auto b = beta_analysis(blaschke_data(), 40, 0.9, 500, 1);
    CHECK(!b.roots.empty());
    CHECK(b.roots.size() < 50);
    CHECK(b.min_root_separation > 1e-3);
    CHECK(b.contact.size() == 500);
    CHECK(b.max_ratio < 0);
    CHECK(b.max_identity_residual < 1e-4);
}

TEST_CASE("structure equations on the slice") {
    const auto& d = blaschke_data();
    for (auto z : sample_interior(d, 20, 0.9, 27))
        CHECK(structure_equation_residual(d, z, 0.6) < 1e-4);
}

TEST_CASE("check pass rule") {
    CHECK(make_check("a", 1e-9, 1e-8, 1e-10, 1).passed);
    CHECK_FALSE(make_check("b", 1e-7, 1e-8, 1e-10, 1).passed);
    // vacuous: budget within ten times the noise
    CHECK_FALSE(make_check("c", 1e-9, 1e-8, 2e-9, 1).passed);
}

TEST_CASE("verify suites") {
    VerifyConfig cfg;
    cfg.points = 20;
    for (const auto& c : verify_suite(HolomorphicData::flat(), cfg)) {
        INFO(c.name);
        CHECK(c.passed);
    }
}
