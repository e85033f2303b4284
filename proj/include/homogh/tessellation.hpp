#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "homogh/complex_kernel.hpp"

namespace homogh {

/// Upper half-plane point, or the point at infinity.
struct HalfPlanePoint {
    Complex tau;
    bool infinite = false;
};

/// tau = i (1 - z) / (1 + z). z = -1 maps to the tagged point at infinity.
HalfPlanePoint cayley(Complex z);
Complex cayley_inv(Complex tau);
Complex cayley_inv(const HalfPlanePoint& p);

/// Integer 2x2 matrix [[a, b], [c, d]] acting on the half-plane, holomorphically
/// (tau -> (a tau + b)/(c tau + d)) or, when `anti` is set, on conj(tau).
struct IntMap {
    std::int64_t a = 1, b = 0, c = 0, d = 1;
    bool anti = false;

    std::int64_t det() const { return a * d - b * c; }
    /// this o other
    IntMap operator*(const IntMap& other) const;
    IntMap inverse() const;
    Complex apply(Complex tau) const;
    bool operator==(const IntMap&) const = default;
};

/// Exact cusp p/q in lowest terms with q >= 0; infinity is 1/0.
struct Farey {
    std::int64_t p = 0, q = 1;
    bool operator==(const Farey&) const = default;
    bool operator<(const Farey& o) const;
    std::string str() const;
};

Farey apply_to_cusp(const IntMap& g, const Farey& f);
Complex cusp_to_disc(const Farey& f);

/// Moebius or anti-Moebius map of the disc, z -> (A z + B)/(C z + D), applied to
/// conj(z) when `reflecting` is set.
class MoebiusMap {
public:
    MoebiusMap() = default;
    MoebiusMap(const Eigen::Matrix2cd& m, bool reflecting);

    /// Disc map conjugate to a half-plane integer map by the Cayley transform.
    static MoebiusMap from_half_plane(const IntMap& g);

    Complex operator()(Complex z) const;
    MoebiusMap compose(const MoebiusMap& inner) const;
    const Eigen::Matrix2cd& matrix() const { return m_; }
    bool reflecting() const { return reflecting_; }

private:
    Eigen::Matrix2cd m_ = Eigen::Matrix2cd::Identity();
    bool reflecting_ = false;
};

/// Geodesic of the disc: an arc of a circle orthogonal to the unit circle, or a
/// diameter through `endpoints`.
struct Geodesic {
    std::array<Complex, 2> endpoints;
    bool diameter = false;
    Complex center;
    double radius = 0.0;

    /// Anti-holomorphic reflection across the geodesic.
    Complex reflect(Complex z) const;
};

Geodesic geodesic_between(Complex p, Complex q);

struct IdealTriangle {
    std::array<Complex, 3> vertices;
    std::array<Farey, 3> cusps;
    /// Side k joins the two vertices other than vertex k.
    std::array<Geodesic, 3> sides;
    std::string word;
    int depth = 0;
    /// Half-plane map carrying the base triangle onto this one.
    IntMap group;

    bool contains(Complex z) const;
};

IdealTriangle base_triangle();
IdealTriangle reflect(const IdealTriangle& t, int side);

/// Is tau inside the base triangle 0 < Re tau < 1, |tau - 1/2| > 1/2?
bool in_base_half_plane(Complex tau);

/// Reflection word (letters '0'..'2') and depth of the triangle containing z.
/// Points on a side are attributed to either neighbour.
std::string locate(Complex z, int max_steps = 4096);

struct BoundaryVertex {
    std::size_t index = 0;
    Farey label;
    Complex z;
};

class Tessellation {
public:
    static constexpr int kMaxDepth = 12;

    explicit Tessellation(int depth);

    int depth() const { return depth_; }
    const std::vector<IdealTriangle>& triangles() const { return triangles_; }
    const std::vector<BoundaryVertex>& vertices() const { return vertices_; }
    std::optional<std::size_t> vertex_index(const Farey& f) const;
    /// Index of the enumerated triangle containing z, if any.
    std::optional<std::size_t> triangle_at(Complex z) const;
    /// Largest angular gap between consecutive boundary vertices.
    double max_boundary_gap() const;

private:
    int depth_;
    std::vector<IdealTriangle> triangles_;
    std::vector<BoundaryVertex> vertices_;
    std::map<Farey, std::size_t> vertex_lookup_;
    std::unordered_map<std::string, std::size_t> word_lookup_;
};

Tessellation enumerate(int depth);

/// Reduction of tau into the standard SL2(Z) fundamental domain: reduced = gamma(tau).
struct ModularReduction {
    Complex reduced;
    IntMap gamma;
};
ModularReduction reduce_modular(Complex tau, int max_steps = 10000);

struct CuspClass {
    Farey cusp;
    double height = 0.0;
    std::size_t vertex = 0;
};

/// Nearest cusp of z via modular reduction. Returns nullopt when the reduced
/// height is below `min_height` or the cusp is not an enumerated vertex.
std::optional<CuspClass> cusp_classify(Complex z, const Tessellation& tess,
                                       double min_height = 1.0);

}  // namespace homogh
