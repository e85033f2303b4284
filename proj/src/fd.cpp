#include "homogh/fd.hpp"

#include <cmath>
#include <vector>

#include "homogh/error.hpp"

namespace homogh {

namespace {

Eigen::VectorXd sample(const Sampler& f, const Eigen::VectorXd& x) {
    try {
        return f(x);
    } catch (const StencilError&) {
        throw;
    } catch (const Error& e) {
        throw StencilError(std::string("sampler failed in stencil: ") + e.what());
    }
}

}  // namespace

Eigen::MatrixXd fd_jacobian(const Sampler& f, const Eigen::VectorXd& x, const FDConfig& cfg) {
    if (!(cfg.h > 0.0)) throw StencilError("finite-difference step must be positive");
    if (cfg.richardson < 0) throw StencilError("Richardson level must be nonnegative");
    const Eigen::Index n = x.size();
    Eigen::MatrixXd jac;
    for (Eigen::Index k = 0; k < n; ++k) {
        // Richardson table over steps h, h/2, h/4, ...
        std::vector<Eigen::VectorXd> row;
        for (int level = 0; level <= cfg.richardson; ++level) {
            const double h = cfg.h / std::pow(2.0, level);
            Eigen::VectorXd xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            row.push_back((sample(f, xp) - sample(f, xm)) / (2.0 * h));
        }
        for (int level = 1; level <= cfg.richardson; ++level) {
            const double w = std::pow(4.0, level);
            for (int j = cfg.richardson; j >= level; --j)
                row[j] = (w * row[j] - row[j - 1]) / (w - 1.0);
        }
        const Eigen::VectorXd& d = row.back();
        if (k == 0) jac.resize(d.size(), n);
        jac.col(k) = d;
    }
    return jac;
}

Eigen::MatrixXd fd_d1(const Sampler& form, const Eigen::VectorXd& x, const FDConfig& cfg) {
    const Eigen::MatrixXd j = fd_jacobian(form, x, cfg);  // j(a, i) = d_i form_a
    return j.transpose() - j;
}

Eigen::VectorXd fd_d2(const Sampler& form, const Eigen::VectorXd& x, const FDConfig& cfg) {
    const Eigen::Index n = x.size();
    const Eigen::MatrixXd j = fd_jacobian(form, x, cfg);
    auto d = [&](Eigen::Index i, Eigen::Index a, Eigen::Index b) { return j(a + n * b, i); };
    std::vector<double> out;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index a = i + 1; a < n; ++a)
            for (Eigen::Index b = a + 1; b < n; ++b)
                out.push_back(d(i, a, b) + d(a, b, i) + d(b, i, a));
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace homogh
