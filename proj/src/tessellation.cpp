#include "homogh/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "homogh/error.hpp"

namespace homogh {

HalfPlanePoint cayley(Complex z) {
    const Complex den = 1.0 + z;
    if (std::abs(den) < 1e-15) return {Complex{}, true};
    return {kI * (1.0 - z) / den, false};
}

Complex cayley_inv(Complex tau) { return (kI - tau) / (kI + tau); }

Complex cayley_inv(const HalfPlanePoint& p) {
    return p.infinite ? Complex{-1.0, 0.0} : cayley_inv(p.tau);
}

// ---------------------------------------------------------------------------

IntMap IntMap::operator*(const IntMap& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d,
            anti != o.anti};
}

IntMap IntMap::inverse() const {
    const std::int64_t s = det();
    if (s != 1 && s != -1) throw InvalidDataError("integer map is not unimodular");
    return {s * d, -s * b, -s * c, s * a, anti};
}

Complex IntMap::apply(Complex tau) const {
    const Complex w = anti ? std::conj(tau) : tau;
    return (static_cast<double>(a) * w + static_cast<double>(b)) /
           (static_cast<double>(c) * w + static_cast<double>(d));
}

bool Farey::operator<(const Farey& o) const {
    if (q == 0) return false;
    if (o.q == 0) return true;
    return p * o.q < o.p * q;
}

std::string Farey::str() const {
    if (q == 0) return "inf";
    std::ostringstream os;
    os << p << "/" << q;
    return os.str();
}

Farey apply_to_cusp(const IntMap& g, const Farey& f) {
    std::int64_t p = g.a * f.p + g.b * f.q;
    std::int64_t q = g.c * f.p + g.d * f.q;
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    const std::int64_t k = std::gcd(p, q);
    if (k > 1) {
        p /= k;
        q /= k;
    }
    return {p, q};
}

Complex cusp_to_disc(const Farey& f) {
    if (f.q == 0) return {-1.0, 0.0};
    const double p = static_cast<double>(f.p), q = static_cast<double>(f.q);
    return Complex{-p, q} / Complex{p, q};
}

// ---------------------------------------------------------------------------

MoebiusMap::MoebiusMap(const Eigen::Matrix2cd& m, bool reflecting)
    : m_(m), reflecting_(reflecting) {}

MoebiusMap MoebiusMap::from_half_plane(const IntMap& g) {
    Eigen::Matrix2cd to_tau, to_disc, gm;
    to_tau << -kI, kI, 1.0, 1.0;
    to_disc << -1.0, kI, 1.0, kI;
    gm << double(g.a), double(g.b), double(g.c), double(g.d);
    const Eigen::Matrix2cd inner = g.anti ? Eigen::Matrix2cd(to_tau.conjugate()) : to_tau;
    return MoebiusMap(to_disc * gm * inner, g.anti);
}

Complex MoebiusMap::operator()(Complex z) const {
    const Complex w = reflecting_ ? std::conj(z) : z;
    return (m_(0, 0) * w + m_(0, 1)) / (m_(1, 0) * w + m_(1, 1));
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& inner) const {
    const Eigen::Matrix2cd h = reflecting_ ? Eigen::Matrix2cd(inner.m_.conjugate()) : inner.m_;
    return MoebiusMap(m_ * h, reflecting_ != inner.reflecting_);
}

// ---------------------------------------------------------------------------

Complex Geodesic::reflect(Complex z) const {
    if (diameter) {
        const Complex d = endpoints[0];
        return d * d * std::conj(z);
    }
    return center + radius * radius / std::conj(z - center);
}

Geodesic geodesic_between(Complex p, Complex q) {
    Geodesic g;
    g.endpoints = {p, q};
    const Complex s = p + q;
    if (std::abs(s) < 1e-12) {
        g.diameter = true;
        return g;
    }
    g.center = 2.0 * p * q / s;
    g.radius = std::sqrt(std::max(std::norm(g.center) - 1.0, 0.0));
    return g;
}

bool in_base_half_plane(Complex tau) {
    return tau.imag() > 0.0 && tau.real() > 0.0 && tau.real() < 1.0 &&
           std::abs(tau - 0.5) > 0.5;
}

bool IdealTriangle::contains(Complex z) const {
    const auto h = cayley(z);
    if (h.infinite || !(h.tau.imag() > 0.0)) return false;
    return in_base_half_plane(group.inverse().apply(h.tau));
}

namespace {

const std::array<IntMap, 3>& side_reflections() {
    static const std::array<IntMap, 3> r{IntMap{-1, 2, 0, 1, true}, IntMap{-1, 0, 0, 1, true},
                                         IntMap{1, 0, 2, -1, true}};
    return r;
}

const std::array<Farey, 3> kBaseCusps{Farey{0, 1}, Farey{1, 1}, Farey{1, 0}};

IdealTriangle triangle_from_group(const IntMap& g, std::string word) {
    IdealTriangle t;
    t.group = g;
    t.depth = static_cast<int>(word.size());
    t.word = std::move(word);
    for (int k = 0; k < 3; ++k) {
        t.cusps[k] = apply_to_cusp(g, kBaseCusps[k]);
        t.vertices[k] = cusp_to_disc(t.cusps[k]);
    }
    for (int k = 0; k < 3; ++k)
        t.sides[k] = geodesic_between(t.vertices[(k + 1) % 3], t.vertices[(k + 2) % 3]);
    return t;
}

}  // namespace

IdealTriangle base_triangle() { return triangle_from_group(IntMap{}, ""); }

IdealTriangle reflect(const IdealTriangle& t, int side) {
    if (side < 0 || side > 2) throw InvalidDataError("side index must be 0, 1 or 2");
    const char letter = static_cast<char>('0' + side);
    std::string word = t.word;
    if (!word.empty() && word.back() == letter)
        word.pop_back();
    else
        word.push_back(letter);
    return triangle_from_group(t.group * side_reflections()[side], std::move(word));
}

std::string locate(Complex z, int max_steps) {
    const auto h = cayley(z);
    if (h.infinite || !(h.tau.imag() > 0.0)) throw InvalidDataError("point not in the open disc");
    Complex tau = h.tau;
    std::string word;
    for (int step = 0; step < max_steps; ++step) {
        int side;
        if (tau.real() < 0.0)
            side = 1;
        else if (tau.real() > 1.0)
            side = 0;
        else if (std::abs(tau - 0.5) < 0.5)
            side = 2;
        else
            return word;
        tau = side_reflections()[side].apply(tau);
        word.push_back(static_cast<char>('0' + side));
    }
    throw ConvergenceError("point location did not terminate");
}

// ---------------------------------------------------------------------------

Tessellation::Tessellation(int depth) : depth_(depth) {
    if (depth < 0 || depth > kMaxDepth) {
        std::ostringstream os;
        os << "tessellation depth " << depth << " outside [0, " << kMaxDepth << "]";
        throw SizeError(os.str());
    }
    triangles_.push_back(base_triangle());
    std::size_t frontier = 0;
    for (int d = 1; d <= depth; ++d) {
        const std::size_t end = triangles_.size();
        for (std::size_t k = frontier; k < end; ++k) {
            for (int side = 0; side < 3; ++side) {
                const auto& t = triangles_[k];
                if (!t.word.empty() && t.word.back() == '0' + side) continue;
                triangles_.push_back(reflect(t, side));
            }
        }
        frontier = end;
    }
    for (std::size_t k = 0; k < triangles_.size(); ++k) {
        word_lookup_.emplace(triangles_[k].word, k);
        for (const auto& c : triangles_[k].cusps) {
            if (vertex_lookup_.count(c)) continue;
            const std::size_t idx = vertices_.size();
            vertex_lookup_.emplace(c, idx);
            vertices_.push_back({idx, c, cusp_to_disc(c)});
        }
    }
}

std::optional<std::size_t> Tessellation::vertex_index(const Farey& f) const {
    auto it = vertex_lookup_.find(f);
    if (it == vertex_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Tessellation::triangle_at(Complex z) const {
    const std::string word = locate(z);
    if (static_cast<int>(word.size()) > depth_) return std::nullopt;
    auto it = word_lookup_.find(word);
    if (it == word_lookup_.end()) return std::nullopt;
    return it->second;
}

double Tessellation::max_boundary_gap() const {
    std::vector<double> angles;
    angles.reserve(vertices_.size());
    for (const auto& v : vertices_) {
        double a = std::arg(v.z);
        if (a < 0.0) a += 2.0 * kPi;
        angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * kPi - angles.back();
    for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
    return gap;
}

Tessellation enumerate(int depth) { return Tessellation(depth); }

// ---------------------------------------------------------------------------

ModularReduction reduce_modular(Complex tau, int max_steps) {
    if (!(tau.imag() > 0.0)) throw PunctureError("modular reduction needs Im tau > 0");
    IntMap gamma;
    for (int step = 0; step < max_steps; ++step) {
        const double n = std::round(tau.real());
        if (n != 0.0) {
            tau -= n;
            gamma = IntMap{1, -static_cast<std::int64_t>(n), 0, 1} * gamma;
        }
        if (std::norm(tau) < 1.0 - 1e-14) {
            tau = -1.0 / tau;
            gamma = IntMap{0, -1, 1, 0} * gamma;
        } else {
            return {tau, gamma};
        }
    }
    throw ConvergenceError("modular reduction did not terminate");
}

std::optional<CuspClass> cusp_classify(Complex z, const Tessellation& tess, double min_height) {
    const auto h = cayley(z);
    Farey cusp{1, 0};
    double height = std::numeric_limits<double>::infinity();
    if (!h.infinite) {
        const auto red = reduce_modular(h.tau);
        height = red.reduced.imag();
        cusp = apply_to_cusp(red.gamma.inverse(), Farey{1, 0});
    }
    if (height < min_height) return std::nullopt;
    const auto idx = tess.vertex_index(cusp);
    if (!idx) return std::nullopt;
    return CuspClass{cusp, height, *idx};
}

}  // namespace homogh
