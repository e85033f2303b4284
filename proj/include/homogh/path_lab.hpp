#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homogh/ansatz.hpp"
#include "homogh/tessellation.hpp"

namespace homogh {

enum class MetricTag { Euclidean, Disc, Sphere, G3, Short };

std::string to_string(MetricTag tag);
MetricTag metric_tag_from_string(const std::string& s);

/// A disc point, with the fibre angle when the path lives on the slice.
struct PathPoint {
    Complex z;
    double theta = 0.0;
};

/// s in [0, 1) -> point. Proper paths leave every compact set as s -> 1 and
/// are integrated in sigma = -log(1 - s).
struct ParamPath {
    std::function<PathPoint(double)> at;
    bool proper = false;
    std::string label;

    static ParamPath segment(Complex a, Complex b);
    static ParamPath circle(Complex centre, double radius);
    /// s -> s * zeta for a boundary point zeta.
    static ParamPath radial(Complex zeta);
    /// Slice path through fixed z with theta running once around the fibre.
    static ParamPath fibre_circle(Complex z, double theta0 = 0.0);
    static ParamPath slice_segment(PathPoint a, PathPoint b);
    /// Image of the half-plane path s -> tau(s) under the inverse Cayley map.
    static ParamPath from_tau(std::function<Complex(double)> tau, std::string label);
};

struct PathOptions {
    double fd_step = 1e-4;           // velocity step in the integration variable
    double tolerance = 1e-9;         // relative tolerance per quadrature panel
    unsigned max_depth = 10;
    double max_panel = 0.25;         // panel width in the integration variable
};

/// Length of path([s0, r]) in the given metric. Metric tags other than
/// Euclidean need `data`. Evaluation failures surface as PathError.
double path_length(const ParamPath& path, MetricTag tag, const HolomorphicData* data, double r,
                   double s0 = 0.0, const PathOptions& opt = {});

struct LengthProfile {
    MetricTag tag = MetricTag::Euclidean;
    std::vector<double> r;
    std::vector<double> length;
};

struct RegionConstants {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    int samples_per_side = 0;
};

/// c3 = r, c2 = pi/2 - 2r, c1 = least spherical distance between the
/// truncated side images of one triangle, found on a sampled grid with the
/// truncation points refined by bisection.
RegionConstants lemma4_constants(double r, int samples_per_side = 512);

enum class Evidence { Divergent, Bounded };
std::string to_string(Evidence e);

struct SweepTarget {
    enum class Kind { Generic, Vertex } kind = Kind::Generic;
    Complex boundary_point;          // the point the radial path runs to
    std::string key;

    static SweepTarget generic(double angle);
    /// The golden-ratio cusp-free point cayley_inv((sqrt 5 - 1) / 2).
    static SweepTarget golden();
    static SweepTarget vertex(Complex z_n, std::string key);
};

struct SweepConfig {
    std::vector<double> ladder{0.9, 0.99, 0.999, 0.9999, 0.99999};
    double floor = 0.05;
    PathOptions path;
};

struct SweepResult {
    SweepTarget target;
    LengthProfile profile;
    Evidence evidence = Evidence::Bounded;
    double min_increment = 0.0;
};

SweepResult divergence_sweep(const SweepTarget& target, const HolomorphicData& data, MetricTag tag,
                             const SweepConfig& cfg = {});

/// Independent sweeps run concurrently; results come back in input order.
std::vector<SweepResult> divergence_sweeps(std::span<const SweepTarget> targets,
                                           const HolomorphicData& data, MetricTag tag,
                                           const SweepConfig& cfg = {});

struct LogVariation {
    double lhs = 0.0;                // g_D length
    double rhs = 0.0;                // total variation of log Im psi over sqrt 2
    Farey cusp;
    bool holds = false;              // lhs >= rhs - 1e-3
};

/// Along path([s0, s1]), which must stay in one doubled hororegion of
/// puncture j (RegionError otherwise).
LogVariation log_variation_check(const ParamPath& path, const HolomorphicData& data,
                                 const Tessellation& tess, int puncture, double r, double s0,
                                 double s1, int samples = 4000);

/// Total variation of log Im psi sampled at `samples + 1` equidistant points.
double log_im_psi_variation(const ParamPath& path, const HolomorphicData& data, double s0,
                            double s1, int samples = 4000);

struct HorizontalLength {
    double g3 = 0.0;
    double gs = 0.0;
    double max_beta_raw = 0.0;        // max |beta(gamma')| before projection
    double max_beta = 0.0;            // after projection (raw when not projecting)
    int rerouted = 0;                 // nodes where ker beta projection was skipped
};

/// g3 and gs lengths of a slice path over [0, 1]. With `project` the velocity
/// is replaced by its g3-orthogonal projection onto ker beta.
HorizontalLength horizontal_length(const ParamPath& path, const HolomorphicData& data,
                                   bool project = true, int panels = 64);

/// Im psi at each sample point.
std::vector<double> radial_graph_fingerprint(const HolomorphicData& data,
                                             std::span<const Complex> samples);
/// Sup distance between fingerprints on a common sample set.
double fingerprint_distance(std::span<const double> a, std::span<const double> b);

}  // namespace homogh
