#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace homogh {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr Complex kI{0.0, 1.0};

/// Value and complex derivative of a holomorphic function at one point.
struct Jet {
    Complex value;
    Complex deriv;
};

/// A holomorphic function with an analytic derivative rule and a domain
/// predicate. Cheap to copy; the rule is shared.
class HoloFn {
public:
    using Rule = std::function<Jet(Complex)>;
    using Domain = std::function<bool(Complex)>;

    HoloFn() = default;
    HoloFn(Rule rule, Domain domain, std::string name = {});

    Jet operator()(Complex z) const { return rule_(z); }
    Complex value(Complex z) const { return rule_(z).value; }
    Complex derivative(Complex z) const { return rule_(z).deriv; }
    bool in_domain(Complex z) const { return !domain_ || domain_(z); }
    const std::string& name() const { return name_; }
    explicit operator bool() const { return static_cast<bool>(rule_); }

    static HoloFn constant(Complex c);
    static HoloFn identity();

private:
    Rule rule_;
    Domain domain_;
    std::string name_;
};

bool in_open_disc(Complex z);

/// arg w in (pi/4, 3pi/4), i.e. |Re w| < Im w.
bool in_q2(Complex w);

// ---------------------------------------------------------------------------
// Blaschke products

struct BlaschkeZero {
    Complex a;
    int multiplicity = 1;

    bool operator==(const BlaschkeZero&) const = default;
};

/// z^m * prod_k B_{a_k}(z)^{mult_k}. A spec tagged as a truncation carries the
/// declared sum of (1 - |a|) over the zeros it leaves out.
struct BlaschkeSpec {
    int leading_power = 0;
    std::vector<BlaschkeZero> zeros;
    std::optional<double> omitted_residual;

    /// Throws InvalidZeroError if any zero is outside the punctured disc.
    void validate() const;
    /// sum_k mult_k (1 - |a_k|) over the listed zeros.
    double zero_mass() const;
    int zero_count() const;
    bool operator==(const BlaschkeSpec&) const;
};

struct BlaschkeValue {
    Complex value;
    Complex deriv;
    double tail_bound = 0.0;
};

/// (conj(a)/|a|) (a - z) / (1 - conj(a) z).
Complex blaschke_factor(Complex a, Complex z);
Jet blaschke_factor_jet(Complex a, Complex z);

BlaschkeValue blaschke_eval(const BlaschkeSpec& spec, Complex z);

/// Principal square root restricted to Re w > 0, values in arg (-pi/4, pi/4).
Complex sqrt_right_halfplane(Complex w);

/// i * sqrt(1 - B(z)).
Complex psi_from_blaschke(const BlaschkeSpec& spec, Complex z);

/// psi = i sqrt(1 - B) as a HoloFn on the open disc.
HoloFn psi_function(const BlaschkeSpec& spec);

/// Zeros (1 - 2^-j) * z_n, j = 1..per_vertex, for every target vertex. With
/// `balance` set, double zeros on the imaginary axis are appended so that
/// B(z_n) = 1 at every target; this requires a target set symmetric under
/// z -> -conj(z) and an even `per_vertex`.
BlaschkeSpec vertex_targeted_spec(std::span<const Complex> targets, int per_vertex,
                                  bool balance = true);

/// max_n |B(z_n) - 1| over boundary points z_n.
double boundary_phase_defect(const BlaschkeSpec& spec, std::span<const Complex> targets);

// ---------------------------------------------------------------------------
// Post-composition maps mu with mu(0) = 0, mu(psi(D)) in Q2.

class MuSpec {
public:
    enum class Kind { Scale, Perturb, Polynomial, Table };

    static MuSpec scale(double c);
    static MuSpec perturb(double eps);
    /// mu(w) = sum_{k>=1} coeffs[k-1] w^k.
    static MuSpec polynomial(std::vector<Complex> coeffs);
    /// Opaque user map; its derivative is taken by Richardson differencing.
    static MuSpec table(std::function<Complex(Complex)> fn, std::string name);

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    std::string label() const;

    HoloFn as_holo() const;

    /// Throws InvalidMuError unless mu(0) = 0 and mu(psi(z)) is in Q2 for every
    /// sample z.
    void validate(const HoloFn& psi, std::span<const Complex> sample) const;

    bool operator==(const MuSpec& other) const;

private:
    Kind kind_ = Kind::Scale;
    double param_ = 1.0;
    std::vector<Complex> coeffs_;
    std::function<Complex(Complex)> table_;
    std::string name_;
};

/// mu o psi with chain-rule derivative, after validating mu on `sample`.
HoloFn apply_mu(const MuSpec& mu, const HoloFn& psi, std::span<const Complex> sample);

/// Deterministic sample of the open disc of radius `radius` (Vogel spiral).
std::vector<Complex> disc_sample(int count, double radius);

}  // namespace homogh
