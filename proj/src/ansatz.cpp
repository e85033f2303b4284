#include "homogh/ansatz.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/quadrature/gauss.hpp>

#include "homogh/error.hpp"
#include "homogh/fd.hpp"

namespace homogh {

Rho0Policy Rho0Policy::custom(Offset h, std::string label) {
    Rho0Policy p;
    p.offset = std::move(h);
    p.label = std::move(label);
    return p;
}

// ---------------------------------------------------------------------------

class XiCache {
public:
    std::optional<double> find(Complex z) const {
        std::shared_lock lock(mutex_);
        auto it = table_.find(key(z));
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }
    void insert(Complex z, double value) {
        std::unique_lock lock(mutex_);
        table_.emplace(key(z), value);
    }

private:
    struct Key {
        std::uint64_t re, im;
        bool operator==(const Key&) const = default;
    };
    struct Hash {
        std::size_t operator()(const Key& k) const {
            return std::hash<std::uint64_t>{}(k.re) ^ (std::hash<std::uint64_t>{}(k.im) * 0x9e3779b97f4a7c15ULL);
        }
    };
    static Key key(Complex z) {
        return {std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag())};
    }

    mutable std::shared_mutex mutex_;
    std::unordered_map<Key, double, Hash> table_;
};

HolomorphicData::HolomorphicData(std::shared_ptr<const Phi> map, HoloFn psi, Rho0Policy rho0,
                                 Complex z0, std::string label)
    : map_(std::move(map)),
      psi_(std::move(psi)),
      rho0_(std::move(rho0)),
      z0_(z0),
      label_(std::move(label)),
      cache_(std::make_shared<XiCache>()) {
    if (!map_ || !psi_) throw InvalidDataError("holomorphic data needs Phi and psi");
    const Jet j = psi_(z0_);
    if (!(j.value.imag() > 0.0)) throw InvalidDataError("Im psi must be positive");
    if (std::abs(-1.0 / j.value * j.value + 1.0) > 1e-12)
        throw InvalidDataError("phi * psi != -1 at the base point");
}

HolomorphicData HolomorphicData::blaschke(const BlaschkeSpec& spec, const std::optional<MuSpec>& mu,
                                          Rho0Policy rho0) {
    HoloFn psi = psi_function(spec);
    std::string label = "blaschke";
    if (mu) {
        const auto sample = disc_sample(500, 0.99);
        psi = apply_mu(*mu, psi, sample);
        label += "/" + mu->label();
    }
    return HolomorphicData(std::make_shared<CoveringPhi>(), psi, std::move(rho0), {}, label);
}

HolomorphicData HolomorphicData::flat() {
    // phi = i/2, psi = -1/phi = 2i
    HolomorphicData d(std::make_shared<ChartPhi>(), HoloFn::constant(Complex{0.0, 2.0}), {}, {},
                      "flat");
    d.constant_ = true;
    return d;
}

HolomorphicData HolomorphicData::with_v_multiplier(double k) const {
    HolomorphicData d = *this;
    d.v_mult_ = k;
    return d;
}

double HolomorphicData::xi_density(Complex z) const {
    const Complex psi = psi_.value(z);
    const double im_phi = psi.imag() / std::norm(psi);
    return im_phi * map_->eval(z).m();
}

double HolomorphicData::xi_radial_factor(Complex z) const {
    if (auto hit = cache_->find(z)) return *hit;
    using GL = boost::math::quadrature::gauss<double, 20>;
    const Complex dz = z - z0_;
    auto f = [&](double s) {
        try {
            return s * xi_density(z0_ + s * dz);
        } catch (const Error& e) {
            throw PathError(std::string("xi quadrature hit a singular point: ") + e.what());
        }
    };
    auto composite = [&](int panels) {
        double sum = 0.0;
        for (int k = 0; k < panels; ++k)
            sum += GL::integrate(f, double(k) / panels, double(k + 1) / panels);
        return sum;
    };
    int panels = 8;
    double coarse = composite(panels);
    for (; panels <= 1024; panels *= 2) {
        const double fine = composite(2 * panels);
        if (std::abs(fine - coarse) <= 1e-8 * std::max(1.0, std::abs(fine))) {
            cache_->insert(z, fine);
            return fine;
        }
        coarse = fine;
    }
    std::ostringstream os;
    os << "xi quadrature did not converge at z = " << z;
    throw PathError(os.str());
}

DiscPoint HolomorphicData::at(Complex z) const {
    if (!(std::abs(z) < 1.0)) throw InvalidDataError("point outside the open disc");
    DiscPoint d;
    d.z = z;
    const Jet j = psi_(z);
    d.psi = j.value;
    d.dpsi = j.deriv;
    const double im = d.psi.imag();
    if (!(im > 0.0)) {
        std::ostringstream os;
        os << "Im psi = " << im << " is not positive at z = " << z;
        throw InvalidDataError(os.str());
    }
    d.phi = -1.0 / d.psi;
    d.dphi = d.dpsi / (d.psi * d.psi);
    d.jet = map_->eval(z);
    // d Im psi = (Im psi', Re psi') in (du, dv)
    d.log_rho0 = std::log(im);
    d.dlog_rho0 = Eigen::Vector2d(d.dpsi.imag() / im, d.dpsi.real() / im);
    if (!rho0_.canonical()) {
        const auto h = rho0_.offset(z);
        d.log_rho0 += h[0];
        d.dlog_rho0 += Eigen::Vector2d(h[1], h[2]);
    }
    const double F = z == z0_ ? 0.0 : xi_radial_factor(z);
    const Complex r = z - z0_;
    d.xi = Eigen::Vector2d(-F * r.imag(), F * r.real());
    return d;
}

// ---------------------------------------------------------------------------

namespace {

const Vec4 kDt(0.0, 0.0, 1.0, 0.0);
const Vec4 kDtheta(0.0, 0.0, 0.0, 1.0);

}  // namespace

FourFrame assemble(const HolomorphicData& data, const FourPoint& p) {
    FourFrame f;
    f.point = p;
    f.disc = data.at(p.z);
    const DiscPoint& d = f.disc;
    f.rho = std::exp(p.t + d.log_rho0);
    const Vec3& s = d.jet.p;
    f.x = f.rho * s;
    f.dx.col(0) = f.rho * (d.dlog_rho0(0) * s + d.jet.dp(Complex{1.0, 0.0}));
    f.dx.col(1) = f.rho * (d.dlog_rho0(1) * s + d.jet.dp(Complex{0.0, 1.0}));
    f.dx.col(2) = f.x;
    f.dx.col(3).setZero();
    f.V = data.v_multiplier() * d.phi.imag() / f.rho;
    const double re_phi = d.phi.real();
    f.eta = Vec4(re_phi * d.dlog_rho0(0) + d.xi(0), re_phi * d.dlog_rho0(1) + d.xi(1), re_phi, 0.0);
    f.connection = f.eta + kDtheta;
    f.g = f.connection * f.connection.transpose() / f.V;
    for (int i = 0; i < 3; ++i) {
        const Vec4 dxi = f.dx.row(i).transpose();
        const Vec4 dxj = f.dx.row((i + 1) % 3).transpose();
        const Vec4 dxk = f.dx.row((i + 2) % 3).transpose();
        f.omega[i] = wedge(f.connection, dxi) + f.V * wedge(dxj, dxk);
        f.g += f.V * dxi * dxi.transpose();
    }
    return f;
}

MomentumValue momentum_map(const HolomorphicData& data, Complex z, double t) {
    const DiscPoint d = data.at(z);
    const double rho = std::exp(t + d.log_rho0);
    return {rho * d.jet.p, rho};
}

double potential_V(const HolomorphicData& data, Complex z, double t) {
    const DiscPoint d = data.at(z);
    if (!(d.phi.imag() > 0.0)) throw InvalidDataError("Im phi must be positive");
    return data.v_multiplier() * d.phi.imag() / std::exp(t + d.log_rho0);
}

Eigen::Vector2d xi_form(const HolomorphicData& data, Complex z) { return data.at(z).xi; }

Vec4 eta_form(const HolomorphicData& data, Complex z, double t) {
    return assemble(data, {z, t, 0.0}).eta;
}

std::array<Mat4, 3> symplectic_forms(const HolomorphicData& data, const FourPoint& p) {
    return assemble(data, p).omega;
}

Mat4 metric(const HolomorphicData& data, const FourPoint& p) {
    const Mat4 g = assemble(data, p).g;
    Eigen::LLT<Mat4> llt(g);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "metric not positive definite at z = " << p.z << ", t = " << p.t;
        throw DegenerateMetricError(os.str());
    }
    return g;
}

double slice_t(const HolomorphicData& data, Complex z) {
    if (data.rho0().canonical()) return 0.0;
    return -data.rho0().offset(z)[0];
}

namespace {

Eigen::Matrix<double, 4, 3> slice_embedding(const HolomorphicData& data, Complex z) {
    Eigen::Matrix<double, 4, 3> e = Eigen::Matrix<double, 4, 3>::Zero();
    e(0, 0) = 1.0;
    e(1, 1) = 1.0;
    e(3, 2) = 1.0;
    if (!data.rho0().canonical()) {
        const auto h = data.rho0().offset(z);
        e(2, 0) = -h[1];
        e(2, 1) = -h[2];
    }
    return e;
}

}  // namespace

SliceFrame slice_and_contact(const HolomorphicData& data, Complex z, double theta) {
    SliceFrame s;
    s.z = z;
    s.theta = theta;
    s.t = slice_t(data, z);
    const FourFrame f = assemble(data, {z, s.t, theta});
    s.embedding = slice_embedding(data, z);
    const auto& E = s.embedding;
    s.rho = f.rho;
    s.V = f.V;
    s.x = f.x;
    s.gs.setZero();
    for (int i = 0; i < 3; ++i) {
        s.omega[i] = E.transpose() * interior(kDt, f.omega[i]);
        s.gs += s.omega[i] * s.omega[i].transpose();
    }
    const DiscPoint& d = f.disc;
    const double im = d.psi.imag(), re = d.psi.real();
    s.beta = Eigen::Vector3d(d.dpsi.imag() / im - re * d.xi(0), d.dpsi.real() / im - re * d.xi(1),
                             -re);
    s.g3 = E.transpose() * f.g * E;
    return s;
}

Mat2 g_sigma(const HolomorphicData& data, Complex z) {
    const DiscPoint d = data.at(z);
    const Eigen::Vector2d dim(d.dpsi.imag(), d.dpsi.real());
    const double im = d.psi.imag();
    return (dim * dim.transpose() + im * im * d.jet.m() * Mat2::Identity()) / std::norm(d.psi);
}

std::array<Eigen::Vector3d, 3> alpha_forms(const HolomorphicData& data, Complex z, double theta) {
    const FourFrame f = assemble(data, {z, 0.0, theta});
    std::array<Eigen::Vector3d, 3> a;
    for (int i = 0; i < 3; ++i) {
        const Vec4 w = interior(kDt, f.omega[i]);
        a[i] = Eigen::Vector3d(w(0), w(1), w(3));
    }
    return a;
}

StructureCoeffs structure_coeffs(const HolomorphicData& data, Complex z, double theta, double h) {
    Sampler sampler = [&](const Eigen::VectorXd& q) {
        const auto a = alpha_forms(data, Complex{q(0), q(1)}, q(2));
        Eigen::VectorXd out(9);
        for (int i = 0; i < 3; ++i) out.segment<3>(3 * i) = a[i];
        return out;
    };
    const Eigen::Vector3d q0(z.real(), z.imag(), theta);
    const Eigen::MatrixXd jac = fd_jacobian(sampler, q0, FDConfig{h, 1, 1e-4});
    const auto alpha = alpha_forms(data, z, theta);

    Eigen::Matrix<double, 9, 4> A = Eigen::Matrix<double, 9, 4>::Zero();
    Eigen::Matrix<double, 9, 1> b;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d& ai = alpha[i];
        const Mat3 ajk = wedge(alpha[(i + 1) % 3], alpha[(i + 2) % 3]);
        for (int r = 0; r < 3; ++r) {
            const int a = pairs[r][0], c = pairs[r][1];
            const int row = 3 * i + r;
            // (d alpha_i)_{ac} = d_a alpha_i[c] - d_c alpha_i[a]
            b(row) = jac(3 * i + c, a) - jac(3 * i + a, c);
            // (beta0 ^ alpha_i)_{ac} = beta0_a alpha_i[c] - beta0_c alpha_i[a]
            A(row, a) += ai(c);
            A(row, c) -= ai(a);
            A(row, 3) = ajk(a, c);
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 9, 4>> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(3) > 1e-12 * sv(0))) throw DegenerateFrameError("structure-equation system is singular");
    const Eigen::Vector4d sol = svd.solve(b);
    StructureCoeffs out;
    out.beta0 = sol.head<3>();
    out.lambda0 = sol(3);
    out.residual = (A * sol - b).cwiseAbs().maxCoeff();
    if (!(out.lambda0 > 0.0)) throw DegenerateFrameError("structure function Lambda0 is not positive");
    return out;
}

BetaCrossCheck beta_cross_check(const HolomorphicData& data, Complex z, double theta) {
    const SliceFrame s = slice_and_contact(data, z, theta);
    const FourFrame f = assemble(data, {z, s.t, theta});
    const auto& E = s.embedding;
    const Eigen::Vector3d conn = E.transpose() * f.connection;
    const Eigen::Vector3d rho_drho = E.transpose() * (f.dx.transpose() * f.x);
    const double re = f.disc.psi.real();
    const double inv_phi2 = 1.0 / std::norm(f.disc.phi);
    const double rho2 = f.rho * f.rho;
    BetaCrossCheck out;
    const double det = re * re + rho2;
    if (det < 1e-14) {
        out.excluded = true;
        return out;
    }
    // [-re, -1; rho^2, -re] [beta; gamma] = [|phi|^-2 conn; rho drho]
    for (int c = 0; c < 3; ++c) {
        const double r1 = inv_phi2 * conn(c), r2 = rho_drho(c);
        out.beta_system(c) = (-re * r1 + r2) / det;
        out.gamma(c) = (-rho2 * r1 - re * r2) / det;
    }
    out.residual = (out.beta_system - s.beta).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace homogh
