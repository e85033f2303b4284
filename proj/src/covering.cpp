#include "homogh/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "homogh/error.hpp"

namespace homogh {

namespace {

constexpr double kThetaGuard = 0.05;

void guard(Complex tau) {
    if (!(tau.imag() > kThetaGuard)) {
        std::ostringstream os;
        os << "theta series needs Im tau > " << kThetaGuard << ", got " << tau;
        throw ConvergenceError(os.str());
    }
}

// sum_{n >= start} sign^n exp(i pi tau e(n)) for exponent e(n) increasing in n.
template <class Exponent>
Complex series(Complex tau, const ThetaConfig& cfg, int start, bool alternate, Exponent e) {
    Complex sum{};
    for (int n = start; n < start + cfg.max_terms; ++n) {
        Complex term = std::exp(kI * kPi * tau * e(n));
        if (alternate && (n % 2 != 0)) term = -term;
        sum += term;
        if (std::abs(term) < cfg.threshold) return sum;
    }
    throw ConvergenceError("theta series did not reach the truncation threshold");
}

// sum_{n >= 0} q^{n (n + 1)}; theta2 = 2 q^{1/4} times this.
Complex theta2_core(Complex tau, const ThetaConfig& cfg) {
    return series(tau, cfg, 0, false, [](int n) { return double(n) * double(n + 1); });
}

}  // namespace

Complex theta2(Complex tau, const ThetaConfig& cfg) {
    guard(tau);
    return 2.0 * std::exp(kI * kPi * tau / 4.0) * theta2_core(tau, cfg);
}

Complex theta3(Complex tau, const ThetaConfig& cfg) {
    guard(tau);
    return 1.0 + 2.0 * series(tau, cfg, 1, false, [](int n) { return double(n) * n; });
}

Complex theta4(Complex tau, const ThetaConfig& cfg) {
    guard(tau);
    return 1.0 + 2.0 * series(tau, cfg, 1, true, [](int n) { return double(n) * n; });
}

// ---------------------------------------------------------------------------
// lambda through SL2(Z) reduction. lambda(M tau) = A_M(lambda(tau)) with A_M
// depending on M mod 2.

namespace {

enum class Anharmonic { Id, T, S, TS, ST, STS };

Anharmonic classify_mod2(const IntMap& g) {
    auto m = [](std::int64_t x) { return static_cast<int>(((x % 2) + 2) % 2); };
    const int a = m(g.a), b = m(g.b), c = m(g.c), d = m(g.d);
    if (a == 1 && b == 0 && c == 0 && d == 1) return Anharmonic::Id;
    if (a == 1 && b == 1 && c == 0 && d == 1) return Anharmonic::T;
    if (a == 0 && b == 1 && c == 1 && d == 0) return Anharmonic::S;
    if (a == 1 && b == 1 && c == 1 && d == 0) return Anharmonic::TS;
    if (a == 0 && b == 1 && c == 1 && d == 1) return Anharmonic::ST;
    if (a == 1 && b == 0 && c == 1 && d == 1) return Anharmonic::STS;
    throw InvalidDataError("matrix is not invertible mod 2");
}

const Complex kLogMinusOne{0.0, kPi};

}  // namespace

LambdaLog lambda_log(Complex tau, const ThetaConfig& cfg) {
    if (!(tau.imag() > 0.0)) throw PunctureError("lambda needs Im tau > 0");
    const auto red = reduce_modular(tau);
    const Complex tr = red.reduced;
    const Complex th3 = theta3(tr, cfg);
    const Complex log_th3 = std::log(th3);
    // log lambda at the reduced point, immune to underflow of q.
    const Complex L = std::log(16.0) + kI * kPi * tr + 4.0 * std::log(theta2_core(tr, cfg)) -
                      4.0 * log_th3;
    const Complex lam = std::exp(L);
    const Complex one_minus = 1.0 - lam;
    const Complex log_one_minus = std::log(one_minus);
    const Complex log_lam_minus_one = std::log(lam - 1.0);
    const Complex log_dred = std::log(kI * kPi) + L + log_one_minus + 4.0 * log_th3;

    const IntMap inv = red.gamma.inverse();
    Complex log_w, log_dA;
    switch (classify_mod2(inv)) {
        case Anharmonic::Id: log_w = L; log_dA = 0.0; break;
        case Anharmonic::T: log_w = L - log_lam_minus_one; log_dA = kLogMinusOne - 2.0 * log_lam_minus_one; break;
        case Anharmonic::S: log_w = log_one_minus; log_dA = kLogMinusOne; break;
        case Anharmonic::TS: log_w = log_lam_minus_one - L; log_dA = -2.0 * L; break;
        case Anharmonic::ST: log_w = -log_one_minus; log_dA = -2.0 * log_one_minus; break;
        case Anharmonic::STS: log_w = -L; log_dA = kLogMinusOne - 2.0 * L; break;
    }
    // d tau_red / d tau = 1 / (c tau + d)^2 for gamma in SL2(Z).
    const Complex ctd = static_cast<double>(red.gamma.c) * tau + static_cast<double>(red.gamma.d);
    return {log_w, log_dA + log_dred - 2.0 * std::log(ctd)};
}

Complex lambda_map(Complex tau, const ThetaConfig& cfg) {
    return std::exp(lambda_log(tau, cfg).log_value);
}

Complex lambda_prime(Complex tau, const ThetaConfig& cfg) {
    return std::exp(lambda_log(tau, cfg).log_deriv);
}

// ---------------------------------------------------------------------------

double PhiJet::m() const { return std::exp(2.0 * log_sqrt_m); }

Vec3 PhiJet::dp(Complex e) const {
    const Complex v = dw_phase * e;
    return std::exp(log_sqrt_m) * (v.real() * e1 + v.imag() * e2);
}

PhiJet sphere_jet(double log_abs_w, Complex w_phase, Complex log_dw) {
    PhiJet j;
    const double c = w_phase.real(), s = w_phase.imag();
    const double c2 = c * c - s * s, s2 = 2.0 * c * s;
    double log_one_plus;
    if (log_abs_w <= 0.0) {
        const double r = std::exp(log_abs_w), r2 = r * r, den = 1.0 + r2;
        j.p = Vec3(2.0 * r * c, -2.0 * r * s, r2 - 1.0) / den;
        j.e1 = Vec3(1.0 - r2 * c2, r2 * s2, 2.0 * r * c) / den;
        j.e2 = Vec3(-r2 * s2, -(1.0 + r2 * c2), 2.0 * r * s) / den;
        log_one_plus = std::log1p(r2);
    } else {
        const double t = std::exp(-log_abs_w), t2 = t * t, den = 1.0 + t2;
        j.p = Vec3(2.0 * t * c, -2.0 * t * s, 1.0 - t2) / den;
        j.e1 = Vec3(t2 - c2, s2, 2.0 * t * c) / den;
        j.e2 = Vec3(-s2, -(t2 + c2), 2.0 * t * s) / den;
        log_one_plus = 2.0 * log_abs_w + std::log1p(t2);
    }
    j.log_abs_w = log_abs_w;
    j.w = std::exp(log_abs_w) * w_phase;
    j.dw = std::exp(log_dw);
    j.dw_phase = std::exp(Complex{0.0, log_dw.imag()});
    j.log_sqrt_m = std::log(2.0) + log_dw.real() - log_one_plus;
    return j;
}

double Phi::puncture_clearance(Complex) const { return std::numeric_limits<double>::infinity(); }

double CoveringPhi::puncture_clearance(Complex z) const {
    const Vec3 p = eval(z).p;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : punctures()) best = std::min(best, spherical_distance(p, q));
    return best;
}

PhiJet CoveringPhi::eval(Complex z) const {
    if (!(std::abs(z) < 1.0)) throw PunctureError("covering map evaluated outside the open disc");
    const auto h = cayley(z);
    if (h.infinite || !(h.tau.imag() > 0.0)) throw PunctureError("point maps to a cusp");
    const auto ll = lambda_log(h.tau, cfg_);
    // d tau / d z = -2i / (1 + z)^2
    const Complex log_dtau = std::log(Complex{0.0, -2.0}) - 2.0 * std::log(1.0 + z);
    return sphere_jet(ll.log_value.real(), std::exp(Complex{0.0, ll.log_value.imag()}),
                      ll.log_deriv + log_dtau);
}

PhiJet ChartPhi::eval(Complex z) const {
    const double r = std::abs(z);
    if (r == 0.0) return sphere_jet(-800.0, Complex{1.0, 0.0}, Complex{});
    return sphere_jet(std::log(r), z / r, Complex{});
}

PhiJet phi(Complex z, const ThetaConfig& cfg) { return CoveringPhi(cfg).eval(z); }

std::array<double, 2> pullback_factors(const Phi& map, Complex z) {
    const double m = map.eval(z).m();
    return {m, m};
}

std::array<Vec3, 3> punctures() {
    return {Vec3(0.0, 0.0, -1.0), Vec3(1.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0)};
}

double spherical_distance(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

int puncture_of_cusp(const Farey& f) {
    const bool p_odd = (f.p % 2) != 0, q_odd = (f.q % 2) != 0;
    if (!q_odd) return 1;   // Gamma(2)-equivalent to infinity: lambda -> 0
    if (!p_odd) return 2;   // equivalent to 0: lambda -> 1
    return 3;               // equivalent to 1: lambda -> infinity
}

HororegionResult hororegion_test(const Phi& map, const Tessellation& tess, Complex z, int j,
                                 double r, bool doubled) {
    if (j < 1 || j > 3) throw InvalidDataError("puncture index must be 1, 2 or 3");
    HororegionResult out;
    const Vec3 p = map.eval(z).p;
    const double radius = doubled ? 2.0 * r : r;
    out.member = spherical_distance(p, punctures()[j - 1]) < radius;
    if (!out.member) return out;
    const auto h = cayley(z);
    Farey cusp{1, 0};
    if (!h.infinite) cusp = apply_to_cusp(reduce_modular(h.tau).gamma.inverse(), Farey{1, 0});
    if (puncture_of_cusp(cusp) != j) return out;
    out.cusp = cusp;
    out.vertex = tess.vertex_index(cusp);
    return out;
}

}  // namespace homogh
