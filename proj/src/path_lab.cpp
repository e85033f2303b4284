#include "homogh/path_lab.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "homogh/covering.hpp"
#include "homogh/error.hpp"

namespace homogh {

std::string to_string(MetricTag tag) {
    switch (tag) {
        case MetricTag::Euclidean: return "euclidean";
        case MetricTag::Disc: return "disc";
        case MetricTag::Sphere: return "sphere";
        case MetricTag::G3: return "g3";
        case MetricTag::Short: return "short";
    }
    return "?";
}

MetricTag metric_tag_from_string(const std::string& s) {
    for (MetricTag t : {MetricTag::Euclidean, MetricTag::Disc, MetricTag::Sphere, MetricTag::G3,
                        MetricTag::Short})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown metric tag '" + s + "'");
}

std::string to_string(Evidence e) {
    return e == Evidence::Divergent ? "divergent-evidence" : "bounded-evidence";
}

// ---------------------------------------------------------------------------

ParamPath ParamPath::segment(Complex a, Complex b) {
    return {[a, b](double s) { return PathPoint{a + s * (b - a)}; }, false, "segment"};
}

ParamPath ParamPath::circle(Complex centre, double radius) {
    return {[centre, radius](double s) { return PathPoint{centre + std::polar(radius, 2.0 * kPi * s)}; },
            false, "circle"};
}

ParamPath ParamPath::radial(Complex zeta) {
    return {[zeta](double s) { return PathPoint{s * zeta}; }, true, "radial"};
}

ParamPath ParamPath::fibre_circle(Complex z, double theta0) {
    return {[z, theta0](double s) { return PathPoint{z, theta0 + 2.0 * kPi * s}; }, false,
            "fibre-circle"};
}

ParamPath ParamPath::slice_segment(PathPoint a, PathPoint b) {
    return {[a, b](double s) {
                return PathPoint{a.z + s * (b.z - a.z), a.theta + s * (b.theta - a.theta)};
            },
            false, "slice-segment"};
}

ParamPath ParamPath::from_tau(std::function<Complex(double)> tau, std::string label) {
    return {[tau = std::move(tau)](double s) { return PathPoint{cayley_inv(tau(s))}; }, false,
            std::move(label)};
}

namespace {

// Path in the integration variable x: x = s, or x = -log(1 - s) for proper paths.
struct Reparam {
    const ParamPath& path;
    PathPoint at(double x) const {
        return path.proper ? path.at(-std::expm1(-x)) : path.at(x);
    }
    double to_x(double s) const { return path.proper ? -std::log1p(-s) : s; }
};

// (du, dv, dtheta)/dx by the five-point stencil.
Eigen::Vector3d velocity(const Reparam& p, double x, double h) {
    auto v = [&](double y) {
        const PathPoint q = p.at(y);
        return Eigen::Vector3d(q.z.real(), q.z.imag(), q.theta);
    };
    return (8.0 * (v(x + h) - v(x - h)) - (v(x + 2 * h) - v(x - 2 * h))) / (12.0 * h);
}

double disc_speed(const HolomorphicData& data, Complex z, const Eigen::Vector2d& v) {
    const Jet j = data.psi()(z);
    const double im = j.value.imag();
    const double dim = j.deriv.imag() * v(0) + j.deriv.real() * v(1);
    const double m = data.map().eval(z).m();
    return std::sqrt((dim * dim + im * im * m * v.squaredNorm()) / std::norm(j.value));
}

double speed(MetricTag tag, const HolomorphicData* data, const PathPoint& q,
             const Eigen::Vector3d& v) {
    if (tag == MetricTag::Euclidean) return v.head<2>().norm();
    if (!data) throw InvalidDataError("metric " + to_string(tag) + " needs holomorphic data");
    switch (tag) {
        case MetricTag::Sphere:
            return std::exp(data->map().eval(q.z).log_sqrt_m) * v.head<2>().norm();
        case MetricTag::Disc:
            return disc_speed(*data, q.z, v.head<2>());
        case MetricTag::G3:
        case MetricTag::Short: {
            const SliceFrame f = slice_and_contact(*data, q.z, q.theta);
            const Mat3& g = tag == MetricTag::G3 ? f.g3 : f.gs;
            return std::sqrt(std::max(0.0, v.dot(g * v)));
        }
        default: break;
    }
    return 0.0;
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const PathError&) {
        throw;
    } catch (const Error& e) {
        throw PathError(std::string("metric evaluation failed on path: ") + e.what());
    }
}

}  // namespace

double path_length(const ParamPath& path, MetricTag tag, const HolomorphicData* data, double r,
                   double s0, const PathOptions& opt) {
    if (!path.at) throw PathError("path has no sampler");
    if (!(r >= s0) || s0 < 0.0 || r > 1.0 || (r == 1.0 && path.proper))
        throw PathError("length needs 0 <= s0 <= r < 1");
    const Reparam p{path};
    const double a = p.to_x(s0), b = p.to_x(r);
    if (b == a) return 0.0;
    auto integrand = [&](double x) {
        return guarded([&] { return speed(tag, data, p.at(x), velocity(p, x, opt.fd_step)); });
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / opt.max_panel)));
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * w, hi = (k + 1 == panels) ? b : a + (k + 1) * w;
        total += GK::integrate(integrand, lo, hi, opt.max_depth, opt.tolerance);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Lemma constants

namespace {

Vec3 sphere_point(Complex tau) {
    const LambdaLog l = lambda_log(tau);
    return sphere_jet(l.log_value.real(), std::exp(Complex{0.0, l.log_value.imag()}), {}).p;
}

double puncture_distance(const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : punctures()) best = std::min(best, spherical_distance(p, q));
    return best;
}

// Points of the side image outside the three r-balls, truncation ends refined.
std::vector<Vec3> truncated_side(const std::function<Complex(double)>& tau, double r, int n) {
    constexpr double T = 12.0;
    std::vector<double> t(n);
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) {
        t[k] = -T + 2.0 * T * k / (n - 1);
        d[k] = puncture_distance(sphere_point(tau(t[k])));
    }
    int first = -1, last = -1;
    for (int k = 0; k < n; ++k)
        if (d[k] >= r) {
            if (first < 0) first = k;
            last = k;
        }
    if (first <= 0 || last >= n - 1) throw ConvergenceError("side truncation not bracketed");
    auto refine = [&](double inside, double outside) {
        for (int it = 0; it < 200 && std::abs(inside - outside) > 1e-15; ++it) {
            const double mid = 0.5 * (inside + outside);
            (puncture_distance(sphere_point(tau(mid))) >= r ? inside : outside) = mid;
        }
        return sphere_point(tau(inside));
    };
    std::vector<Vec3> out;
    out.push_back(refine(t[first], t[first - 1]));
    for (int k = first; k <= last; ++k) out.push_back(sphere_point(tau(t[k])));
    out.push_back(refine(t[last], t[last + 1]));
    return out;
}

}  // namespace

RegionConstants lemma4_constants(double r, int samples_per_side) {
    if (!(r > 0.0 && r < kPi / 4.0)) throw InvalidDataError("ball radius must lie in (0, pi/4)");
    if (samples_per_side < 8) throw InvalidDataError("too few samples per side");
    RegionConstants c;
    c.c3 = r;
    c.c2 = kPi / 2.0 - 2.0 * r;
    c.samples_per_side = samples_per_side;
    // Sides of the base triangle in the half-plane: Re tau = 0, Re tau = 1, and
    // the semicircle over [0, 1].
    const std::array<std::function<Complex(double)>, 3> sides{
        [](double s) { return Complex{0.0, std::exp(s)}; },
        [](double s) { return Complex{1.0, std::exp(s)}; },
        [](double s) { return Complex{0.5 - 0.5 * std::tanh(s), 0.5 / std::cosh(s)}; },
    };
    std::array<std::vector<Vec3>, 3> pts;
    for (int k = 0; k < 3; ++k) pts[k] = truncated_side(sides[k], r, samples_per_side);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (const Vec3& a : pts[i])
                for (const Vec3& b : pts[j]) best = std::min(best, spherical_distance(a, b));
    c.c1 = best;
    return c;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepTarget SweepTarget::generic(double angle) {
    return {Kind::Generic, std::polar(1.0, angle), "angle:" + std::to_string(angle)};
}

SweepTarget SweepTarget::golden() {
    return {Kind::Generic, cayley_inv(Complex{(std::sqrt(5.0) - 1.0) / 2.0, 0.0}), "golden"};
}

SweepTarget SweepTarget::vertex(Complex z_n, std::string key) {
    return {Kind::Vertex, z_n / std::abs(z_n), std::move(key)};
}

SweepResult divergence_sweep(const SweepTarget& target, const HolomorphicData& data, MetricTag tag,
                             const SweepConfig& cfg) {
    if (cfg.ladder.empty()) throw InvalidDataError("empty truncation ladder");
    const ParamPath path = ParamPath::radial(target.boundary_point);
    SweepResult res;
    res.target = target;
    res.profile.tag = tag;
    double prev_r = 0.0, acc = 0.0;
    res.min_increment = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.ladder.size(); ++k) {
        const double r = cfg.ladder[k];
        const double inc = path_length(path, tag, &data, r, prev_r, cfg.path);
        acc += inc;
        if (k > 0) res.min_increment = std::min(res.min_increment, inc);
        res.profile.r.push_back(r);
        res.profile.length.push_back(acc);
        prev_r = r;
    }
    res.evidence = (cfg.ladder.size() > 1 && res.min_increment > cfg.floor) ? Evidence::Divergent
                                                                           : Evidence::Bounded;
    return res;
}

std::vector<SweepResult> divergence_sweeps(std::span<const SweepTarget> targets,
                                           const HolomorphicData& data, MetricTag tag,
                                           const SweepConfig& cfg) {
    std::vector<std::future<SweepResult>> jobs;
    for (const auto& t : targets)
        jobs.push_back(std::async(std::launch::async,
                                  [&data, tag, &cfg, t] { return divergence_sweep(t, data, tag, cfg); }));
    std::vector<SweepResult> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

// ---------------------------------------------------------------------------

double log_im_psi_variation(const ParamPath& path, const HolomorphicData& data, double s0,
                            double s1, int samples) {
    double tv = 0.0, prev = 0.0;
    for (int k = 0; k <= samples; ++k) {
        const double s = s0 + (s1 - s0) * k / samples;
        const double im = data.psi().value(path.at(s).z).imag();
        if (!(im > 0.0)) throw InvalidDataError("Im psi must be positive along the path");
        const double l = std::log(im);
        if (k > 0) tv += std::abs(l - prev);
        prev = l;
    }
    return tv;
}

LogVariation log_variation_check(const ParamPath& path, const HolomorphicData& data,
                                 const Tessellation& tess, int puncture, double r, double s0,
                                 double s1, int samples) {
    LogVariation out;
    std::optional<Farey> cusp;
    for (int k = 0; k <= samples; ++k) {
        const double s = s0 + (s1 - s0) * k / samples;
        const auto h = hororegion_test(data.map(), tess, path.at(s).z, puncture, r, true);
        if (!h.member || !h.cusp || (cusp && !(*cusp == *h.cusp)))
            throw RegionError("path leaves the doubled hororegion at s = " + std::to_string(s));
        cusp = h.cusp;
    }
    out.cusp = *cusp;
    out.lhs = path_length(path, MetricTag::Disc, &data, s1, s0);
    out.rhs = log_im_psi_variation(path, data, s0, s1, samples) / std::sqrt(2.0);
    out.holds = out.lhs >= out.rhs - 1e-3;
    return out;
}

HorizontalLength horizontal_length(const ParamPath& path, const HolomorphicData& data,
                                   bool project, int panels) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    if (path.proper) throw PathError("horizontal lengths need a compact path");
    if (panels < 1) throw PathError("need at least one panel");
    HorizontalLength out;
    const Reparam p{path};
    const double w = 1.0 / panels;
    for (int k = 0; k < panels; ++k) {
        const double lo = k * w;
        for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
            const double x0 = GL::abscissa()[i];
            const double wt = GL::weights()[i] * 0.5 * w;
            for (double sign : {-1.0, 1.0}) {
                if (x0 == 0.0 && sign > 0.0) continue;
                const double s = lo + 0.5 * w * (1.0 + sign * x0);
                const PathPoint q = path.at(s);
                Eigen::Vector3d v = velocity(p, s, 1e-4);
                const SliceFrame f =
                    guarded([&] { return slice_and_contact(data, q.z, q.theta); });
                const double raw = f.beta.dot(v);
                out.max_beta_raw = std::max(out.max_beta_raw, std::abs(raw));
                if (project) {
                    const Eigen::Vector3d B = f.g3.ldlt().solve(f.beta);
                    const double den = f.beta.dot(B);
                    if (den > 1e-14)
                        v -= (raw / den) * B;
                    else
                        ++out.rerouted;
                }
                out.max_beta = std::max(out.max_beta, std::abs(f.beta.dot(v)));
                out.g3 += wt * std::sqrt(std::max(0.0, v.dot(f.g3 * v)));
                out.gs += wt * std::sqrt(std::max(0.0, v.dot(f.gs * v)));
            }
        }
    }
    return out;
}

std::vector<double> radial_graph_fingerprint(const HolomorphicData& data,
                                             std::span<const Complex> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (Complex z : samples) out.push_back(data.psi().value(z).imag());
    return out;
}

double fingerprint_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw SizeError("fingerprints use different sample sets");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace homogh
