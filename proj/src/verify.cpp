#include "homogh/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "homogh/error.hpp"

namespace homogh {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

FDConfig halved(const FDConfig& cfg) {
    FDConfig c = cfg;
    c.h /= 2.0;
    return c;
}

Eigen::VectorXd flatten(const Mat4& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), 16);
}

}  // namespace

double cauchy_riemann_residual(const std::function<Complex(Complex)>& f, Complex z,
                               const FDConfig& cfg) {
    Sampler s = [&](const Eigen::VectorXd& q) {
        const Complex w = f(Complex{q(0), q(1)});
        return Eigen::Vector2d(w.real(), w.imag()).eval();
    };
    const Eigen::MatrixXd j = fd_jacobian(s, Eigen::Vector2d(z.real(), z.imag()), cfg);
    const Complex fu{j(0, 0), j(1, 0)}, fv{j(0, 1), j(1, 1)};
    return 0.5 * std::abs(fu + kI * fv);
}

Complex assembled_phi(const HolomorphicData& data, Complex z, double t) {
    const FourFrame f = assemble(data, {z, t, 0.0});
    return {f.eta(2), f.rho * f.V};
}

double xi_exactness_residual(const HolomorphicData& data, Complex z, const FDConfig& cfg) {
    Sampler s = [&](const Eigen::VectorXd& q) {
        return Eigen::VectorXd(xi_form(data, Complex{q(0), q(1)}));
    };
    const Eigen::MatrixXd d = fd_d1(s, Eigen::Vector2d(z.real(), z.imag()), cfg);
    return std::abs(d(0, 1) - data.xi_density(z));
}

double curl_residual(const HolomorphicData& data, Complex z, double t, const FDConfig& cfg) {
    auto frame = [&](const Eigen::VectorXd& q) {
        return assemble(data, {Complex{q(0), q(1)}, q(2), 0.0});
    };
    Sampler eta = [&](const Eigen::VectorXd& q) {
        return Eigen::VectorXd(frame(q).eta.head<3>());
    };
    Sampler pot = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd v(1);
        v(0) = frame(q).V;
        return v;
    };
    const Eigen::Vector3d q0(z.real(), z.imag(), t);
    const FourFrame f0 = frame(q0);
    const Mat3 J = f0.dx.leftCols<3>();   // d x / d(u, v, t)
    const Mat3 Jinv = J.inverse();
    const Mat3 deta = fd_d1(eta, q0, cfg);
    const Eigen::Vector3d dV = fd_jacobian(pot, q0, cfg).row(0).transpose();
    const Mat3 deta_x = Jinv.transpose() * deta * Jinv;
    const Eigen::Vector3d a = Jinv.transpose() * dV;
    Mat3 star;
    star << 0.0, a(2), -a(1),
            -a(2), 0.0, a(0),
            a(1), -a(0), 0.0;
    return (deta_x + star).cwiseAbs().maxCoeff();
}

double closedness_residual(const HolomorphicData& data, const FourPoint& p, const FDConfig& cfg) {
    Sampler s = [&](const Eigen::VectorXd& q) {
        const auto om = symplectic_forms(data, {Complex{q(0), q(1)}, q(2), q(3)});
        Eigen::VectorXd out(48);
        for (int i = 0; i < 3; ++i) out.segment<16>(16 * i) = flatten(om[i]);
        return out;
    };
    const Vec4 q0(p.z.real(), p.z.imag(), p.t, p.theta);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        Sampler si = [&, i](const Eigen::VectorXd& q) {
            return Eigen::VectorXd(s(q).segment<16>(16 * i));
        };
        worst = std::max(worst, fd_d2(si, q0, cfg).cwiseAbs().maxCoeff());
    }
    return worst;
}

double quaternion_check(const Mat4& g, const std::array<Mat4, 3>& omega) {
    Eigen::LLT<Mat4> llt(g);
    if (llt.info() != Eigen::Success) throw DegenerateMetricError("metric not positive definite");
    std::array<Mat4, 3> J;
    for (int i = 0; i < 3; ++i) J[i] = -llt.solve(omega[i]);
    auto opnorm = [](const Mat4& m) {
        return Eigen::JacobiSVD<Mat4>(m).singularValues()(0);
    };
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, opnorm(J[i] * J[i] + Mat4::Identity()));
        worst = std::max(worst, opnorm(J[i] * J[(i + 1) % 3] - J[(i + 2) % 3]));
    }
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

std::array<double, 64> christoffel(const MetricSampler& g, const Vec4& q, const FDConfig& cfg) {
    Sampler s = [&](const Eigen::VectorXd& x) { return flatten(g(Vec4(x))); };
    const Eigen::MatrixXd dg = fd_jacobian(s, q, cfg);  // dg(i + 4 j, k) = d_k g_ij
    const Mat4 ginv = g(q).inverse();
    auto d = [&](int k, int i, int j) { return dg(i + 4 * j, k); };
    std::array<double, 64> gam{};
    for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double acc = 0.0;
                for (int m = 0; m < 4; ++m)
                    acc += ginv(l, m) * (d(i, m, j) + d(j, m, i) - d(m, i, j));
                gam[16 * l + 4 * i + j] = 0.5 * acc;
            }
    return gam;
}

struct RiemannPack {
    std::array<double, 64> gamma;
    std::array<double, 256> R;
    Mat4 ricci;
};

RiemannPack riemann(const MetricSampler& g, const Vec4& q, const FDConfig& cfg) {
    Sampler s = [&](const Eigen::VectorXd& x) {
        const auto c = christoffel(g, Vec4(x), cfg);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(c.data(), 64));
    };
    RiemannPack out;
    out.gamma = christoffel(g, q, cfg);
    const Eigen::MatrixXd dG = fd_jacobian(s, q, cfg);  // dG(16 l + 4 i + j, k)
    auto G = [&](int l, int i, int j) { return out.gamma[16 * l + 4 * i + j]; };
    auto dGam = [&](int k, int l, int i, int j) { return dG(16 * l + 4 * i + j, k); };
    out.ricci.setZero();
    for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    double r = dGam(j, l, k, i) - dGam(k, l, j, i);
                    for (int m = 0; m < 4; ++m) r += G(l, j, m) * G(m, k, i) - G(l, k, m) * G(m, j, i);
                    out.R[64 * l + 16 * i + 4 * j + k] = r;
                    if (l == j) out.ricci(i, k) += r;
                }
    return out;
}

}  // namespace

CurvatureReport curvature(const MetricSampler& g, const Vec4& point, const FDConfig& cfg) {
    const RiemannPack a = riemann(g, point, cfg);
    const RiemannPack b = riemann(g, point, halved(cfg));
    CurvatureReport rep;
    rep.point = point;
    rep.christoffel = a.gamma;
    rep.riemann = a.R;
    double noise = 0.0;
    for (int k = 0; k < 256; ++k) {
        rep.max_riemann = std::max(rep.max_riemann, std::abs(a.R[k]));
        noise = std::max(noise, std::abs(a.R[k] - b.R[k]));
    }
    rep.ricci_norm = a.ricci.norm();
    noise = std::max(noise, (a.ricci - b.ricci).cwiseAbs().maxCoeff());
    rep.noise_floor = noise;
    return rep;
}

MetricSampler metric_sampler(const HolomorphicData& data) {
    return [data](const Vec4& q) {
        return assemble(data, {Complex{q(0), q(1)}, q(2), q(3)}).g;
    };
}

// ---------------------------------------------------------------------------

std::vector<Complex> sample_disc(int count, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        const double r = radius * std::sqrt(unit(rng));
        const double a = 2.0 * kPi * unit(rng);
        out.push_back(std::polar(r, a));
    }
    return out;
}

std::vector<Complex> sample_interior(const HolomorphicData& data, int count, double radius,
                                     std::uint64_t seed, double clearance) {
    std::vector<Complex> out;
    std::uint64_t round = 0;
    while (static_cast<int>(out.size()) < count) {
        if (round > 64) throw InvalidDataError("cannot find interior sample points");
        for (Complex z : sample_disc(count, radius, seed + 7919 * round)) {
            if (data.map().puncture_clearance(z) < clearance) continue;
            out.push_back(z);
            if (static_cast<int>(out.size()) == count) break;
        }
        ++round;
    }
    return out;
}

namespace {

Complex psi_second(const HoloFn& psi, Complex z) {
    const double h = 1e-5;
    return (psi.derivative(z + h) - psi.derivative(z - h)) / (2.0 * h);
}

}  // namespace

double structure_equation_residual(const HolomorphicData& data, Complex z, double theta,
                                   const FDConfig& cfg) {
    Sampler s = [&](const Eigen::VectorXd& q) {
        const SliceFrame f = slice_and_contact(data, Complex{q(0), q(1)}, q(2));
        Eigen::VectorXd out(9);
        for (int i = 0; i < 3; ++i) out.segment<3>(3 * i) = f.omega[i];
        return out;
    };
    const Eigen::Vector3d q0(z.real(), z.imag(), theta);
    const Eigen::MatrixXd j = fd_jacobian(s, q0, cfg);
    const SliceFrame f = slice_and_contact(data, z, theta);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Mat3 J = j.middleRows<3>(3 * i);   // J(c, a) = d_a omega_i[c]
        const Mat3 domega = J.transpose() - J;   // (d omega)_{ac} = d_a omega_c - d_c omega_a
        const Mat3 rhs = wedge(f.beta, f.omega[i]) + wedge(f.omega[(i + 1) % 3], f.omega[(i + 2) % 3]);
        worst = std::max(worst, (domega - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

BetaAnalysis beta_analysis(const HolomorphicData& data, int grid, double radius,
                           int contact_samples, std::uint64_t seed, const FDConfig& cfg) {
    if (data.constant_phi())
        throw InvalidDataError("beta analysis requires a non-constant phi");
    if (grid < 2) throw InvalidDataError("beta analysis grid must be at least 2 x 2");
    BetaAnalysis out;
    const HoloFn& psi = data.psi();
    std::vector<Complex> critical;
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
            Complex z{-radius + 2.0 * radius * a / (grid - 1), -radius + 2.0 * radius * b / (grid - 1)};
            if (std::abs(z) >= radius) continue;
            ++out.seeds;
            bool ok = false;
            try {
                for (int it = 0; it < 60; ++it) {
                    const Complex d1 = psi.derivative(z);
                    if (std::abs(d1) < 1e-13) {
                        ok = true;
                        break;
                    }
                    Complex step = d1 / psi_second(psi, z);
                    if (std::abs(step) > 0.1) step *= 0.1 / std::abs(step);
                    z -= step;
                    if (!(std::abs(z) < 0.99)) break;
                    if (std::abs(step) < 1e-14) {
                        ok = std::abs(psi.derivative(z)) < 1e-10;
                        break;
                    }
                }
            } catch (const Error&) {
                ok = false;
            }
            if (!ok) {
                ++out.skipped_seeds;
                continue;
            }
            if (std::none_of(critical.begin(), critical.end(),
                             [&](Complex c) { return std::abs(c - z) < 1e-6; }))
                critical.push_back(z);
        }
    }
    out.critical_points = static_cast<int>(critical.size());
    for (auto c : critical)
        if (std::abs(psi.value(c).real()) < 1e-8) out.roots.push_back(c);
    std::sort(out.roots.begin(), out.roots.end(), [](Complex p, Complex q) {
        return p.imag() < q.imag() || (p.imag() == q.imag() && p.real() < q.real());
    });
    out.min_root_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.roots.size(); ++i)
        for (std::size_t j = i + 1; j < out.roots.size(); ++j)
            out.min_root_separation = std::min(out.min_root_separation, std::abs(out.roots[i] - out.roots[j]));

    out.max_ratio = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (Complex z : sample_interior(data, contact_samples * 2, radius, seed)) {
        if (static_cast<int>(out.contact.size()) >= contact_samples) break;
        if (std::any_of(out.roots.begin(), out.roots.end(),
                        [&](Complex r) { return std::abs(r - z) < 0.05; }))
            continue;
        const double theta = angle(rng);
        Sampler s = [&](const Eigen::VectorXd& q) {
            return Eigen::VectorXd(slice_and_contact(data, Complex{q(0), q(1)}, q(2)).beta);
        };
        const SliceFrame f = slice_and_contact(data, z, theta);
        const Mat3 dbeta = fd_d1(s, Eigen::Vector3d(z.real(), z.imag(), theta), cfg);
        Mat3 W;
        for (int i = 0; i < 3; ++i) W.col(i) = f.omega[i];
        const Eigen::Vector3d b = W.fullPivLu().solve(f.beta);
        const double vol = wedge3(f.omega[0], f.omega[1], f.omega[2]);
        ContactSample c;
        c.z = z;
        c.ratio = wedge_1_2(f.beta, dbeta) / vol;
        c.identity = std::abs(c.ratio + b.squaredNorm());
        out.max_identity_residual = std::max(out.max_identity_residual, c.identity);
        out.max_ratio = std::max(out.max_ratio, c.ratio);
        out.contact.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------

CheckResult make_check(std::string name, double residual, double budget, double noise_floor,
                       int samples, std::string note) {
    CheckResult c;
    c.name = std::move(name);
    c.residual = residual;
    c.budget = budget;
    c.noise_floor = noise_floor;
    c.samples = samples;
    c.note = std::move(note);
    c.passed = std::isfinite(residual) && residual < budget && budget > 10.0 * noise_floor;
    return c;
}

std::vector<CheckResult> verify_suite(const HolomorphicData& data, const VerifyConfig& cfg) {
    std::mt19937_64 rng(cfg.seed ^ 0x5bd1e995ULL);
    std::uniform_real_distribution<double> tdist(-1.0, 1.0), adist(0.0, 2.0 * kPi);
    const auto zs = sample_interior(data, cfg.points, cfg.radius, cfg.seed, cfg.clearance);
    std::vector<FourPoint> pts;
    for (auto z : zs) pts.push_back({z, tdist(rng), adist(rng)});
    const FDConfig fd = cfg.fd, fd2 = halved(cfg.fd);
    const int n = static_cast<int>(pts.size());

    // FD checks: residual at h, noise floor as the change under h -> h/2.
    auto fd_check = [&](const std::string& name, double budget, auto&& residual) {
        double worst = 0.0, noise = 0.0;
        for (const auto& p : pts) {
            const double a = residual(p, fd), b = residual(p, fd2);
            worst = std::max(worst, a);
            noise = std::max(noise, std::abs(a - b));
        }
        return make_check(name, worst, budget, noise, n);
    };

    std::vector<CheckResult> out;
    out.push_back(fd_check("cauchy_riemann_phi", cfg.budget_cr, [&](const FourPoint& p, const FDConfig& c) {
        return cauchy_riemann_residual([&](Complex z) { return assembled_phi(data, z, p.t); }, p.z, c);
    }));
    out.push_back(fd_check("xi_exactness", cfg.budget_xi, [&](const FourPoint& p, const FDConfig& c) {
        return xi_exactness_residual(data, p.z, c);
    }));
    out.push_back(fd_check("curl", cfg.budget_curl, [&](const FourPoint& p, const FDConfig& c) {
        return curl_residual(data, p.z, p.t, c);
    }));
    out.push_back(fd_check("closedness", cfg.budget_closed, [&](const FourPoint& p, const FDConfig& c) {
        return closedness_residual(data, p, c);
    }));

    {
        double worst = 0.0;
        for (const auto& p : pts) {
            const FourFrame f = assemble(data, p);
            worst = std::max(worst, quaternion_check(f.g, f.omega));
        }
        out.push_back(make_check("quaternion", worst, cfg.budget_quaternion, 16.0 * kEps, n,
                                 "J_i = -g^-1 Omega_i"));
    }
    {
        double worst = 0.0, decomp = 0.0;
        for (const auto& p : pts) {
            const SliceFrame s = slice_and_contact(data, p.z, p.theta);
            const DiscPoint d = data.at(p.z);
            const double t_expected = std::log(d.psi.imag()) - d.log_rho0;
            worst = std::max({worst, std::abs(s.V - std::norm(d.phi)), std::abs(s.rho - d.psi.imag()),
                              std::abs(s.t - t_expected)});
            decomp = std::max(decomp, (s.g3 - s.gs - s.beta * s.beta.transpose()).cwiseAbs().maxCoeff());
        }
        out.push_back(make_check("slice_identities", worst, cfg.budget_slice, 16.0 * kEps, n,
                                 "V = |phi|^2, rho = Im psi, t = log Im psi - log rho0"));
        out.push_back(make_check("g3_decomposition", decomp, cfg.budget_slice, 16.0 * kEps, n));
    }
    out.push_back(fd_check("structure_equations", cfg.budget_structure, [&](const FourPoint& p, const FDConfig& c) {
        return structure_equation_residual(data, p.z, p.theta, c);
    }));
    {
        double lam = 0.0, lam_noise = 0.0, lemma = 0.0, lemma_noise = 0.0, beta = 0.0;
        for (const auto& p : pts) {
            const StructureCoeffs a = structure_coeffs(data, p.z, p.theta, fd.h);
            const StructureCoeffs b = structure_coeffs(data, p.z, p.theta, fd2.h);
            const double ts = slice_t(data, p.z);
            lam = std::max(lam, std::abs(a.lambda0 - std::exp(ts)));
            lam_noise = std::max(lam_noise, std::abs(a.lambda0 - b.lambda0));
            const SliceFrame s = slice_and_contact(data, p.z, p.theta);
            const Complex psi = data.psi().value(p.z);
            const Complex lhs{-a.beta0(2), s.rho};
            const Complex lhs2{-b.beta0(2), s.rho};
            lemma = std::max(lemma, std::abs(psi - lhs));
            lemma_noise = std::max(lemma_noise, std::abs(lhs - lhs2));
            const BetaCrossCheck bc = beta_cross_check(data, p.z, p.theta);
            if (!bc.excluded) beta = std::max(beta, bc.residual);
        }
        out.push_back(make_check("lambda0_slice", lam, cfg.budget_structure, lam_noise, n,
                                 "Lambda0 = exp(t_slice)"));
        out.push_back(make_check("psi_lemma", lemma, cfg.budget_beta, lemma_noise, n,
                                 "psi = -beta(d/dtheta) + i rho with beta from the structure equations"));
        out.push_back(make_check("beta_linear_system", beta, cfg.budget_beta, 16.0 * kEps, n));
    }
    if (cfg.curvature) {
        const MetricSampler gs = metric_sampler(data);
        const int m = std::min(n, cfg.curvature_points);
        double riem = 0.0, ric = 0.0, noise = 0.0;
        for (int k = 0; k < m; ++k) {
            const auto& p = pts[k];
            const CurvatureReport r = curvature(gs, Vec4(p.z.real(), p.z.imag(), p.t, p.theta), cfg.curvature_fd);
            riem = std::max(riem, r.max_riemann);
            ric = std::max(ric, r.ricci_norm);
            noise = std::max(noise, r.noise_floor);
        }
        if (data.constant_phi())
            out.push_back(make_check("riemann_flat", riem, cfg.budget_riemann_flat, noise, m));
        else
            out.push_back(make_check("ricci_flat", ric, cfg.budget_ricci, noise, m));
    }
    return out;
}

}  // namespace homogh
