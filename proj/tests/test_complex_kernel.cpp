#include <doctest.h>

#include <cmath>
#include <random>

#include "homogh/complex_kernel.hpp"
#include "homogh/error.hpp"

using namespace homogh;

namespace {

// mpmath reference values (40 digits, truncated).
constexpr double kAxisZero = -0.6180339887498948482;
const Complex kFactorRef{0.54631828978622328553, -0.15676959619952494897};
constexpr double kPairAtRadius = 0.80350548430819620684;
const Complex kPsiRef{-0.00037648608963383100434, 0.98985118604429107077};

const std::vector<Complex> kTargets{{1, 0}, {0, 1}, {-1, 0}};

BlaschkeSpec targeted() { return vertex_targeted_spec(kTargets, 2, true); }

}  // namespace

TEST_CASE("blaschke factor examples") {
    CHECK(std::abs(blaschke_factor(0.5, 0.5)) < 1e-15);
    CHECK(std::abs(blaschke_factor(0.5, 0.0) - 0.5) < 1e-15);
    CHECK(std::abs(blaschke_factor(0.5, -0.5) - 0.8) < 1e-15);
    CHECK(std::abs(blaschke_factor({0.3, 0.4}, {-0.2, 0.1}) - kFactorRef) < 1e-14);
    CHECK_THROWS_AS(blaschke_factor(0.0, 0.3), InvalidZeroError);
    CHECK_THROWS_AS(blaschke_factor(1.2, 0.3), InvalidZeroError);
}

TEST_CASE("blaschke_eval examples") {
    BlaschkeSpec empty;
    CHECK(std::abs(blaschke_eval(empty, {0.3, 0.4}).value - 1.0) < 1e-15);

    BlaschkeSpec one{1, {{0.5, 1}}, {}};
    CHECK(std::abs(blaschke_eval(one, 0.5).value) < 1e-15);

    // Two radial zeros toward z = 1 leave B(0.999) at 0.8035, not near 1.
    BlaschkeSpec pair{0, {{0.9, 1}, {0.99, 1}}, {}};
    CHECK(std::abs(blaschke_eval(pair, 0.999).value - kPairAtRadius) < 1e-13);
}

TEST_CASE("vertex targeting balances the boundary phase") {
    auto spec = targeted();
    CHECK(spec.zero_count() == 8);
    bool axis = false;
    for (const auto& z : spec.zeros)
        if (z.multiplicity == 2 && std::abs(z.a - Complex(0, kAxisZero)) < 1e-10) axis = true;
    CHECK(axis);
    CHECK(boundary_phase_defect(spec, kTargets) < 1e-12);
    CHECK(std::abs(psi_from_blaschke(spec, {0.2, 0.1}) - kPsiRef) < 1e-13);
}

TEST_CASE("psi tends to zero radially at a targeted vertex") {
    auto spec = targeted();
    bool reached = false;
    for (double s = 0.9; s < 0.999999; s = 1 - (1 - s) / 2) {
        Complex b = blaschke_eval(spec, s).value;
        if (std::abs(1.0 - b) < 1.0 / 16) {
            reached = true;
            CHECK(std::abs(psi_from_blaschke(spec, s)) < 0.25);
        }
    }
    CHECK(reached);
}

TEST_CASE("sqrt_right_halfplane") {
    CHECK(std::abs(sqrt_right_halfplane(1.0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(sqrt_right_halfplane({0, 2}), BranchDomainError);
    CHECK_THROWS_AS(sqrt_right_halfplane({-1, 0.1}), BranchDomainError);
    Complex r = sqrt_right_halfplane({0.5, 0.5});
    CHECK(std::abs(std::abs(r) - 0.8408964152537145) < 1e-14);
    CHECK(std::abs(std::arg(r) - kPi / 8) < 1e-14);
}

TEST_CASE("psi at a zero is i") {
    BlaschkeSpec one{0, {{0.5, 1}}, {}};
    CHECK(std::abs(psi_from_blaschke(one, 0.5) - kI) < 1e-15);
}

TEST_CASE("mu examples") {
    auto psi = psi_function(targeted());
    auto sample = disc_sample(100, 0.9);
    auto id = apply_mu(MuSpec::scale(1), psi, sample);
    auto twice = apply_mu(MuSpec::scale(2), psi, sample);
    for (auto z : sample) {
        CHECK(std::abs(id.value(z) - psi.value(z)) < 1e-15);
        CHECK(std::abs(twice.value(z) - 2.0 * psi.value(z)) < 1e-14);
    }
    auto pert = MuSpec::perturb(0.05).as_holo();
    CHECK(std::abs(pert.value(kI) - Complex(-0.05, 1)) < 1e-15);

    auto bad = MuSpec::polynomial({{0, 1}});   // rotates Q2 out of itself
    CHECK_THROWS_AS(bad.validate(psi, sample), InvalidMuError);
    auto shifted = MuSpec::table([](Complex w) { return w + 0.1; }, "shift");
    CHECK_THROWS_AS(shifted.validate(psi, sample), InvalidMuError);
}

TEST_CASE("maximum modulus at random interior points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    auto spec = targeted();
    int n = 0;
    while (n < 200) {
        Complex z{u(rng), u(rng)};
        if (std::abs(z) >= 0.999) continue;
        CHECK(std::abs(blaschke_eval(spec, z).value) < 1.0);
        ++n;
    }
}

TEST_CASE("truncation consistency") {
    std::vector<BlaschkeZero> zeros;
    for (int k = 1; k <= 15; ++k)
        zeros.push_back({std::polar(1.0 - std::pow(2.0, -k), 0.7 * k), 1});
    BlaschkeSpec small{0, {zeros.begin(), zeros.begin() + 10}, {}};
    BlaschkeSpec big{0, zeros, {}};
    double added = big.zero_mass() - small.zero_mass();
    for (auto z : disc_sample(200, 0.9)) {
        double diff = std::abs(blaschke_eval(small, z).value - blaschke_eval(big, z).value);
        CHECK(diff <= 2.0 / (1.0 - std::abs(z)) * added + 1e-15);
    }
}

TEST_CASE("analytic derivatives match differences") {
    auto spec = targeted();
    std::vector<HoloFn> fns{psi_function(spec),
                            apply_mu(MuSpec::perturb(0.05), psi_function(spec), disc_sample(50, 0.9)),
                            apply_mu(MuSpec::scale(2), psi_function(spec), disc_sample(50, 0.9))};
    const double h = 1e-5;
    for (const auto& f : fns) {
        for (auto z : disc_sample(100, 0.9)) {
            auto d = [&](double step) { return (f.value(z + step) - f.value(z - step)) / (2 * step); };
            Complex fd = (4.0 * d(h / 2) - d(h)) / 3.0;
            Complex an = f.derivative(z);
            CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST_CASE("psi lies in Q2") {
    auto psi = psi_function(targeted());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    int n = 0;
    while (n < 500) {
        Complex z{u(rng), u(rng)};
        if (std::abs(z) >= 0.999) continue;
        Complex w = psi.value(z);
        CHECK(std::abs(w.real()) < std::abs(w.imag()));
        CHECK(in_q2(w));
        ++n;
    }
}
