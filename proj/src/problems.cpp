#include "glpinn/problems.hpp"

#include <cmath>
#include <numbers>

#include "glpinn/error.hpp"

namespace glpinn::problems {

using Eigen::Ref;
using Eigen::VectorXd;
using std::numbers::pi;

double Problem::residual(const net::DerivativeBundle& b, const Ref<const VectorXd>& x,
                         std::span<const double> scalars) const {
    std::vector<double> ignored(scalar_names_.size());
    return residual_partials(b.u, b.diag_hess.sum(), x, scalars, ignored).r;
}

namespace {

// exp(-a |x - c|^2) with derivatives.
net::DerivativeBundle gaussian(const Ref<const VectorXd>& x, const VectorXd& c, double a) {
    net::DerivativeBundle b;
    const VectorXd dx = x - c;
    b.u = std::exp(-a * dx.squaredNorm());
    b.grad = -2.0 * a * b.u * dx;
    b.diag_hess = b.u * (4.0 * a * a * dx.array().square() - 2.0 * a).matrix();
    return b;
}

// -lap u = f on a box or disk, u* a sum of isotropic Gaussians with common rate a.
class GaussianPoisson : public Problem {
public:
    GaussianPoisson(std::string name, domains::Domain dom, std::vector<VectorXd> centres, double a)
        : centres_(std::move(centres)), a_(a) {
        name_ = std::move(name);
        domain_ = std::move(dom);
    }

    double source(const Ref<const VectorXd>& x) const override {
        // -lap exp(-a r^2) = (2 a d - 4 a^2 r^2) exp(-a r^2)
        const double d = static_cast<double>(x.size());
        double f = 0.0;
        for (const auto& c : centres_) {
            const double r2 = (x - c).squaredNorm();
            f += (2.0 * a_ * d - 4.0 * a_ * a_ * r2) * std::exp(-a_ * r2);
        }
        return f;
    }

    double exact(const Ref<const VectorXd>& x) const override {
        double u = 0.0;
        for (const auto& c : centres_) u += std::exp(-a_ * (x - c).squaredNorm());
        return u;
    }

    net::DerivativeBundle exact_derivatives(const Ref<const VectorXd>& x) const override {
        net::DerivativeBundle b{0.0, VectorXd::Zero(x.size()), VectorXd::Zero(x.size())};
        for (const auto& c : centres_) {
            auto g = gaussian(x, c, a_);
            b.u += g.u;
            b.grad += g.grad;
            b.diag_hess += g.diag_hess;
        }
        return b;
    }

    ResidualPartials residual_partials(double, double lap, const Ref<const VectorXd>& x, std::span<const double>,
                                       std::span<double>) const override {
        return {-lap - source(x), 0.0, -1.0};
    }

private:
    std::vector<VectorXd> centres_;
    double a_;
};

class HelmholtzInverse : public Problem {
public:
    explicit HelmholtzInverse(double k0) {
        name_ = "helmholtz_inverse";
        domain_ = domains::Domain::unit_box(2);
        scalar_names_ = {"k"};
        scalar_init_ = {{"k", k0}};
        scalar_truth_ = {{"k", 3.0}};
        needs_data_ = true;
    }

    double source(const Ref<const VectorXd>& x) const override { return (9.0 - 8.0 * pi * pi) * exact(x); }

    double exact(const Ref<const VectorXd>& x) const override {
        return std::sin(2.0 * pi * x[0]) * std::sin(2.0 * pi * x[1]);
    }

    net::DerivativeBundle exact_derivatives(const Ref<const VectorXd>& x) const override {
        const double sx = std::sin(2.0 * pi * x[0]), sy = std::sin(2.0 * pi * x[1]);
        const double cx = std::cos(2.0 * pi * x[0]), cy = std::cos(2.0 * pi * x[1]);
        net::DerivativeBundle b;
        b.u = sx * sy;
        b.grad = Eigen::Vector2d(2.0 * pi * cx * sy, 2.0 * pi * sx * cy);
        b.diag_hess = Eigen::Vector2d::Constant(-4.0 * pi * pi * b.u);
        return b;
    }

    ResidualPartials residual_partials(double u, double lap, const Ref<const VectorXd>& x,
                                       std::span<const double> scalars, std::span<double> d_scalars) const override {
        const double k = scalars[0];
        d_scalars[0] = 2.0 * k * u;
        return {lap + k * k * u - source(x), k * k, 1.0};
    }
};

class HdNonlinear : public Problem {
public:
    HdNonlinear(std::size_t d, double k) : c_(k * pi / static_cast<double>(d)) {
        name_ = "hd_nonlinear";
        domain_ = domains::Domain::unit_box(d);
    }

    double source(const Ref<const VectorXd>& x) const override {
        const double s = std::sin(c_ * x.sum());
        return c_ * c_ * static_cast<double>(x.size()) * s + s * s * s;
    }

    double exact(const Ref<const VectorXd>& x) const override { return std::sin(c_ * x.sum()); }

    net::DerivativeBundle exact_derivatives(const Ref<const VectorXd>& x) const override {
        const double s = c_ * x.sum();
        net::DerivativeBundle b;
        b.u = std::sin(s);
        b.grad = VectorXd::Constant(x.size(), c_ * std::cos(s));
        b.diag_hess = VectorXd::Constant(x.size(), -c_ * c_ * b.u);
        return b;
    }

    ResidualPartials residual_partials(double u, double lap, const Ref<const VectorXd>& x, std::span<const double>,
                                       std::span<double>) const override {
        return {-lap + u * u * u - source(x), 3.0 * u * u, -1.0};
    }

private:
    double c_;
};

}  // namespace

std::unique_ptr<Problem> one_peak() {
    return std::make_unique<GaussianPoisson>("one_peak", domains::Domain::box(-VectorXd::Ones(2), VectorXd::Ones(2)),
                                             std::vector<VectorXd>{VectorXd::Zero(2)}, 1000.0);
}

std::unique_ptr<Problem> two_peak_disk() {
    return std::make_unique<GaussianPoisson>(
        "two_peak_disk", domains::Domain::disk(),
        std::vector<VectorXd>{Eigen::Vector2d(0.0, 0.5), Eigen::Vector2d(0.0, -0.5)}, 1000.0);
}

std::unique_ptr<Problem> helmholtz_inverse(double k0) {
    if (!std::isfinite(k0)) throw ValidationError("helmholtz_inverse: k0 must be finite");
    return std::make_unique<HelmholtzInverse>(k0);
}

std::unique_ptr<Problem> hd_linear(std::size_t d, double p) {
    if (d < 1) throw ValidationError("hd_linear: d must be >= 1");
    if (!(p > 0.0)) throw ValidationError("hd_linear: p must be > 0");
    return std::make_unique<GaussianPoisson>("hd_linear", domains::Domain::unit_box(d),
                                             std::vector<VectorXd>{VectorXd::Zero(static_cast<Eigen::Index>(d))}, p);
}

std::unique_ptr<Problem> hd_nonlinear(std::size_t d, double k) {
    if (d < 1) throw ValidationError("hd_nonlinear: d must be >= 1");
    if (!(k >= 1.0)) throw ValidationError("hd_nonlinear: k must be >= 1");
    return std::make_unique<HdNonlinear>(d, k);
}

std::vector<std::string> problem_names() {
    return {"one_peak", "two_peak_disk", "helmholtz_inverse", "hd_linear", "hd_nonlinear"};
}

std::unique_ptr<Problem> make_problem(const ProblemSpec& s) {
    if (s.name == "one_peak") return one_peak();
    if (s.name == "two_peak_disk") return two_peak_disk();
    if (s.name == "helmholtz_inverse") return helmholtz_inverse(s.k0);
    if (s.name == "hd_linear") return hd_linear(s.d, s.p);
    if (s.name == "hd_nonlinear") return hd_nonlinear(s.d, s.k);
    throw ValidationError("unknown problem '" + s.name + "'");
}

}  // namespace glpinn::problems
