#include "homogh/complex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homogh/error.hpp"

namespace homogh {

HoloFn::HoloFn(Rule rule, Domain domain, std::string name)
    : rule_(std::move(rule)), domain_(std::move(domain)), name_(std::move(name)) {}

HoloFn HoloFn::constant(Complex c) {
    return HoloFn([c](Complex) { return Jet{c, Complex{}}; }, {}, "constant");
}

HoloFn HoloFn::identity() {
    return HoloFn([](Complex z) { return Jet{z, Complex{1.0, 0.0}}; }, {}, "identity");
}

bool in_open_disc(Complex z) { return std::abs(z) < 1.0; }

bool in_q2(Complex w) { return std::abs(w.real()) < w.imag(); }

// ---------------------------------------------------------------------------

void BlaschkeSpec::validate() const {
    if (leading_power < 0) throw InvalidZeroError("negative leading power");
    for (const auto& z : zeros) {
        const double r = std::abs(z.a);
        if (!(r > 0.0) || !(r < 1.0) || !std::isfinite(r)) {
            std::ostringstream os;
            os << "Blaschke zero " << z.a << " outside the punctured disc";
            throw InvalidZeroError(os.str());
        }
        if (z.multiplicity < 1) throw InvalidZeroError("zero multiplicity must be positive");
    }
    if (omitted_residual && !(*omitted_residual >= 0.0))
        throw InvalidZeroError("omitted residual must be nonnegative");
}

double BlaschkeSpec::zero_mass() const {
    double s = 0.0;
    for (const auto& z : zeros) s += z.multiplicity * (1.0 - std::abs(z.a));
    return s;
}

int BlaschkeSpec::zero_count() const {
    int n = 0;
    for (const auto& z : zeros) n += z.multiplicity;
    return n;
}

bool BlaschkeSpec::operator==(const BlaschkeSpec& o) const {
    if (leading_power != o.leading_power || zeros.size() != o.zeros.size() ||
        omitted_residual != o.omitted_residual)
        return false;
    for (std::size_t k = 0; k < zeros.size(); ++k)
        if (zeros[k].a != o.zeros[k].a || zeros[k].multiplicity != o.zeros[k].multiplicity)
            return false;
    return true;
}

namespace {

void check_zero(Complex a) {
    const double r = std::abs(a);
    if (!(r > 0.0) || !(r < 1.0)) {
        std::ostringstream os;
        os << "Blaschke factor zero " << a << " outside the punctured disc";
        throw InvalidZeroError(os.str());
    }
}

Jet jet_mul(const Jet& f, const Jet& g) {
    return {f.value * g.value, f.deriv * g.value + f.value * g.deriv};
}

Jet jet_pow(const Jet& f, int k) {
    if (k == 1) return f;
    const Complex p = std::pow(f.value, k - 1);
    return {p * f.value, static_cast<double>(k) * p * f.deriv};
}

}  // namespace

Jet blaschke_factor_jet(Complex a, Complex z) {
    check_zero(a);
    const Complex den = 1.0 - std::conj(a) * z;
    if (std::abs(den) < 1e-300) throw PoleError("Blaschke factor denominator vanishes");
    const double r = std::abs(a);
    const Complex unit = std::conj(a) / r;
    const Complex value = unit * (a - z) / den;
    // d/dz (a - z)/(1 - conj(a) z) = (|a|^2 - 1)/(1 - conj(a) z)^2
    const Complex deriv = unit * (r * r - 1.0) / (den * den);
    return {value, deriv};
}

Complex blaschke_factor(Complex a, Complex z) { return blaschke_factor_jet(a, z).value; }

BlaschkeValue blaschke_eval(const BlaschkeSpec& spec, Complex z) {
    Jet acc{Complex{1.0, 0.0}, Complex{}};
    if (spec.leading_power > 0) {
        const int m = spec.leading_power;
        acc = {std::pow(z, m), static_cast<double>(m) * std::pow(z, m - 1)};
    }
    for (const auto& zero : spec.zeros) {
        if (zero.multiplicity < 1) throw InvalidZeroError("zero multiplicity must be positive");
        acc = jet_mul(acc, jet_pow(blaschke_factor_jet(zero.a, z), zero.multiplicity));
    }
    BlaschkeValue out{acc.value, acc.deriv, 0.0};
    if (spec.omitted_residual) {
        const double gap = 1.0 - std::abs(z);
        out.tail_bound = gap > 0.0 ? 2.0 / gap * *spec.omitted_residual
                                   : std::numeric_limits<double>::infinity();
    }
    return out;
}

Complex sqrt_right_halfplane(Complex w) {
    if (!(w.real() > 0.0)) {
        std::ostringstream os;
        os << "square root argument " << w << " not in the open right half-plane";
        throw BranchDomainError(os.str());
    }
    return std::sqrt(w);
}

Complex psi_from_blaschke(const BlaschkeSpec& spec, Complex z) {
    const auto b = blaschke_eval(spec, z);
    return kI * sqrt_right_halfplane(1.0 - b.value);
}

HoloFn psi_function(const BlaschkeSpec& spec) {
    spec.validate();
    auto rule = [spec](Complex z) {
        const auto b = blaschke_eval(spec, z);
        const Complex s = sqrt_right_halfplane(1.0 - b.value);
        return Jet{kI * s, kI * (-b.deriv) / (2.0 * s)};
    };
    return HoloFn(rule, in_open_disc, "psi_blaschke");
}

// ---------------------------------------------------------------------------
// Vertex-targeted placement

namespace {

double boundary_arg(const BlaschkeSpec& spec, Complex zeta) {
    return std::arg(blaschke_eval(spec, zeta).value);
}

// Solve arg B(zeta) = 0 for the imaginary part y of a double zero at i*y,
// holding the rest of the spec fixed. Returns nullopt when no continuous
// crossing exists in (-1, 1).
std::optional<double> solve_balance(BlaschkeSpec spec, std::size_t slot, Complex zeta) {
    auto h = [&](double y) {
        spec.zeros[slot].a = Complex{0.0, y};
        return boundary_arg(spec, zeta);
    };
    constexpr int kScan = 800;
    std::optional<double> best;
    double prev_y = 0.0, prev_h = 0.0;
    bool have_prev = false;
    for (int k = 0; k <= kScan; ++k) {
        const double y = -0.999 + 1.998 * k / kScan;
        if (std::abs(y) < 1e-3) {
            have_prev = false;
            continue;
        }
        const double hy = h(y);
        if (have_prev && std::abs(prev_h) < kPi / 2 && std::abs(hy) < kPi / 2 &&
            (prev_h <= 0.0) != (hy <= 0.0)) {
            double lo = prev_y, hi = y, flo = prev_h;
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = h(mid);
                if ((fm <= 0.0) == (flo <= 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            // Prefer the crossing farthest from the origin zero-free core.
            if (!best || std::abs(root) > std::abs(*best)) best = root;
        }
        prev_y = y;
        prev_h = hy;
        have_prev = true;
    }
    return best;
}

}  // namespace

BlaschkeSpec vertex_targeted_spec(std::span<const Complex> targets, int per_vertex,
                                  bool balance) {
    if (per_vertex < 1) throw InvalidZeroError("per_vertex must be positive");
    for (auto t : targets)
        if (std::abs(std::abs(t) - 1.0) > 1e-12)
            throw InvalidZeroError("target vertices must lie on the unit circle");

    BlaschkeSpec spec;
    for (auto t : targets)
        for (int j = 1; j <= per_vertex; ++j)
            spec.zeros.push_back({(1.0 - std::ldexp(1.0, -j)) * t, 1});
    if (!balance) return spec;

    if (per_vertex % 2 != 0)
        throw InvalidZeroError("phase balancing needs an even number of zeros per vertex");
    auto mirrored = [&](Complex t) {
        const Complex m = -std::conj(t);
        return std::any_of(targets.begin(), targets.end(),
                           [&](Complex s) { return std::abs(s - m) < 1e-12; });
    };
    std::vector<Complex> classes;
    for (auto t : targets) {
        if (!mirrored(t))
            throw InvalidZeroError("phase balancing needs targets symmetric under z -> -conj(z)");
        if (t.real() > 1e-12) classes.push_back(t);
    }

    const std::size_t first_slot = spec.zeros.size();
    for (std::size_t c = 0; c < classes.size(); ++c)
        spec.zeros.push_back({Complex{0.0, -0.5 + 0.1 * static_cast<double>(c)}, 2});

    for (int sweep = 0; sweep < 60; ++sweep) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            auto y = solve_balance(spec, first_slot + c, classes[c]);
            if (!y) throw InvalidZeroError("phase balancing found no admissible zero");
            spec.zeros[first_slot + c].a = Complex{0.0, *y};
        }
        if (boundary_phase_defect(spec, targets) < 1e-12) break;
    }
    return spec;
}

double boundary_phase_defect(const BlaschkeSpec& spec, std::span<const Complex> targets) {
    double worst = 0.0;
    for (auto t : targets) worst = std::max(worst, std::abs(blaschke_eval(spec, t).value - 1.0));
    return worst;
}

// ---------------------------------------------------------------------------
// mu

MuSpec MuSpec::scale(double c) {
    if (!(c > 0.0)) throw InvalidMuError("scale factor must be positive");
    MuSpec m;
    m.kind_ = Kind::Scale;
    m.param_ = c;
    return m;
}

MuSpec MuSpec::perturb(double eps) {
    MuSpec m;
    m.kind_ = Kind::Perturb;
    m.param_ = eps;
    return m;
}

MuSpec MuSpec::polynomial(std::vector<Complex> coeffs) {
    if (coeffs.empty()) throw InvalidMuError("polynomial mu needs at least one coefficient");
    MuSpec m;
    m.kind_ = Kind::Polynomial;
    m.coeffs_ = std::move(coeffs);
    return m;
}

MuSpec MuSpec::table(std::function<Complex(Complex)> fn, std::string name) {
    MuSpec m;
    m.kind_ = Kind::Table;
    m.table_ = std::move(fn);
    m.name_ = std::move(name);
    return m;
}

std::string MuSpec::label() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Scale: os << "scale(" << param_ << ")"; break;
        case Kind::Perturb: os << "perturb(" << param_ << ")"; break;
        case Kind::Polynomial: os << "polynomial(" << coeffs_.size() << ")"; break;
        case Kind::Table: os << "table(" << name_ << ")"; break;
    }
    return os.str();
}

HoloFn MuSpec::as_holo() const {
    switch (kind_) {
        case Kind::Scale: {
            const double c = param_;
            return HoloFn([c](Complex w) { return Jet{c * w, Complex{c, 0.0}}; }, {}, label());
        }
        case Kind::Perturb: {
            const double e = param_;
            return HoloFn([e](Complex w) { return Jet{w + e * w * w, 1.0 + 2.0 * e * w}; }, {},
                          label());
        }
        case Kind::Polynomial: {
            auto c = coeffs_;
            return HoloFn(
                [c](Complex w) {
                    // Horner on w * (c0 + c1 w + ...), derivative alongside.
                    Complex p{}, dp{};
                    for (auto it = c.rbegin(); it != c.rend(); ++it) {
                        dp = dp * w + p;
                        p = p * w + *it;
                    }
                    return Jet{w * p, p + w * dp};
                },
                {}, label());
        }
        case Kind::Table: {
            auto f = table_;
            return HoloFn(
                [f](Complex w) {
                    const double h = 1e-4;
                    auto central = [&](double s) { return (f(w + s) - f(w - s)) / (2.0 * s); };
                    return Jet{f(w), (4.0 * central(h / 2) - central(h)) / 3.0};
                },
                {}, label());
        }
    }
    return {};
}

void MuSpec::validate(const HoloFn& psi, std::span<const Complex> sample) const {
    const HoloFn mu = as_holo();
    if (std::abs(mu.value(Complex{})) > 1e-14) throw InvalidMuError(label() + ": mu(0) != 0");
    for (auto z : sample) {
        const Complex w = mu.value(psi.value(z));
        if (!in_q2(w)) {
            std::ostringstream os;
            os << label() << ": mu(psi(" << z << ")) = " << w << " leaves Q2";
            throw InvalidMuError(os.str());
        }
    }
}

bool MuSpec::operator==(const MuSpec& o) const {
    return kind_ == o.kind_ && param_ == o.param_ && coeffs_ == o.coeffs_ && name_ == o.name_;
}

HoloFn apply_mu(const MuSpec& mu, const HoloFn& psi, std::span<const Complex> sample) {
    mu.validate(psi, sample);
    const HoloFn m = mu.as_holo();
    auto rule = [m, psi](Complex z) {
        const Jet p = psi(z);
        const Jet q = m(p.value);
        return Jet{q.value, q.deriv * p.deriv};
    };
    return HoloFn(rule, [psi](Complex z) { return psi.in_domain(z); },
                  mu.label() + " o " + psi.name());
}

std::vector<Complex> disc_sample(int count, double radius) {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        const double r = radius * std::sqrt((k + 0.5) / count);
        out.push_back(std::polar(r, golden * k));
    }
    return out;
}

}  // namespace homogh
