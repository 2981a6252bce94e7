#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "glpinn/domains.hpp"
#include "glpinn/net.hpp"

namespace glpinn::problems {

/// Residual value and its partial derivatives with respect to u and to the
/// Laplacian. Every built-in operator depends on the second derivatives only
/// through their sum and never on the gradient.
struct ResidualPartials {
    double r = 0.0;
    double du = 0.0;
    double dlap = 0.0;
};

/// A PDE  A[u] = f  on a domain with Dirichlet data g = u* on the boundary.
class Problem {
public:
    virtual ~Problem() = default;

    const std::string& name() const { return name_; }
    const domains::Domain& domain() const { return domain_; }
    std::size_t dim() const { return domain_.dim(); }

    /// Trainable scalars (appended to the network parameters), with initial
    /// and true values.
    const std::vector<std::string>& scalar_names() const { return scalar_names_; }
    const std::map<std::string, double>& scalar_init() const { return scalar_init_; }
    const std::map<std::string, double>& scalar_truth() const { return scalar_truth_; }
    bool needs_data_loss() const { return needs_data_; }

    virtual double source(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
    virtual double exact(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
    /// Closed-form u*, grad u*, diag Hessian of u*.
    virtual net::DerivativeBundle exact_derivatives(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
    double boundary_value(const Eigen::Ref<const Eigen::VectorXd>& x) const { return exact(x); }

    /// r = A[u](x) - f(x) and its partials. d_scalars (same length as
    /// scalar_names) receives dr/dscalar, overwritten.
    virtual ResidualPartials residual_partials(double u, double lap, const Eigen::Ref<const Eigen::VectorXd>& x,
                                               std::span<const double> scalars,
                                               std::span<double> d_scalars) const = 0;

    double residual(const net::DerivativeBundle& b, const Eigen::Ref<const Eigen::VectorXd>& x,
                    std::span<const double> scalars) const;

protected:
    std::string name_;
    domains::Domain domain_;
    std::vector<std::string> scalar_names_;
    std::map<std::string, double> scalar_init_;
    std::map<std::string, double> scalar_truth_;
    bool needs_data_ = false;
};

/// -lap u = f on (-1,1)^2, u* = exp(-1000 |x|^2).
std::unique_ptr<Problem> one_peak();
/// -lap u = f on the unit disk, peaks at (0, +-0.5).
std::unique_ptr<Problem> two_peak_disk();
/// lap u + k^2 u = f on (0,1)^2, u* = sin 2 pi x sin 2 pi y, k* = 3, trainable k.
std::unique_ptr<Problem> helmholtz_inverse(double k0 = 0.1);
/// -lap u = f on (0,1)^d, u* = exp(-p |x|^2).
std::unique_ptr<Problem> hd_linear(std::size_t d, double p);
/// -lap u + u^3 = f on (0,1)^d, u* = sin((k pi / d) sum x).
std::unique_ptr<Problem> hd_nonlinear(std::size_t d, double k);

/// Construction by name with optional parameters d, p, k, k0.
struct ProblemSpec {
    std::string name;
    std::size_t d = 2;
    double p = 10.0;
    double k = 4.0;
    double k0 = 0.1;
};
std::unique_ptr<Problem> make_problem(const ProblemSpec& spec);
std::vector<std::string> problem_names();

}  // namespace glpinn::problems
