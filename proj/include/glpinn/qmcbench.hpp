#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "glpinn/lowdisc.hpp"

namespace glpinn::qmcbench {

using Integrand = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

/// Equal-weight average of fn over the points.
double qmc_integrate(const Integrand& fn, const lowdisc::PointSet& ps);

/// Tensor midpoint rule with m cells per axis on [0,1]^d (d <= 3).
double midpoint_quadrature(const Integrand& fn, std::size_t d, std::size_t m);

/// A named test integrand on [0,1]^d.
struct TestFunction {
    std::string name;
    Integrand fn;
    std::function<double(std::size_t d)> exact;  // integral over [0,1]^d
};

/// "gaussian": exp(-10 |x - 1/2|^2); "product": prod x_k; "constant": 1.
TestFunction test_function(const std::string& name);
std::vector<std::string> test_function_names();

struct SweepRow {
    lowdisc::Sampler sampler;
    std::size_t n = 0;
    std::size_t seed_count = 0;
    double mean_abs_err = 0.0;
};

struct SlopeFit {
    lowdisc::Sampler sampler;
    double slope = 0.0;     // NaN when undefined
    double residual = 0.0;  // residual sum of squares in log-log space
    bool defined = false;
};

struct RateSweepResult {
    std::vector<SweepRow> rows;
    std::vector<SlopeFit> fits;

    const SlopeFit& fit(lowdisc::Sampler s) const;
};

/// Ordinary least-squares slope of log(err) against log(n). Undefined when
/// fewer than two points or any error is zero.
SlopeFit fit_slope(lowdisc::Sampler s, const std::vector<std::size_t>& ns, const std::vector<double>& errs);

/// Mean |estimate - exact| for every sampler and N. Random samplers
/// (uniform, LHS) average over seeds first_seed .. first_seed + seeds - 1;
/// the deterministic ones use a single set.
RateSweepResult rate_sweep(const Integrand& fn, double exact, const std::vector<lowdisc::Sampler>& samplers,
                           const std::vector<std::size_t>& ns, std::size_t d, std::size_t seeds,
                           const lowdisc::VectorCache& cache = {}, std::uint64_t first_seed = 0);

/// CSV with header `sampler,n,seed_count,mean_abs_err,slope`.
void write_sweep_csv(std::ostream& os, const RateSweepResult& r);

}  // namespace glpinn::qmcbench
