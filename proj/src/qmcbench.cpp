#include "glpinn/qmcbench.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "glpinn/error.hpp"

namespace glpinn::qmcbench {

using lowdisc::Sampler;

double qmc_integrate(const Integrand& fn, const lowdisc::PointSet& ps) {
    if (ps.size() == 0) throw ValidationError("qmc_integrate: empty point set");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < ps.coords.cols(); ++i) sum += fn(ps.coords.col(i));
    return sum / static_cast<double>(ps.size());
}

double midpoint_quadrature(const Integrand& fn, std::size_t d, std::size_t m) {
    if (d < 1 || d > 3) throw UnsupportedError("midpoint_quadrature: d must be 1, 2 or 3");
    if (m < 1) throw ValidationError("midpoint_quadrature: m must be >= 1");
    const double h = 1.0 / static_cast<double>(m);
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    std::vector<std::size_t> idx(d, 0);
    double sum = 0.0;
    for (;;) {
        for (std::size_t k = 0; k < d; ++k) x[static_cast<Eigen::Index>(k)] = (static_cast<double>(idx[k]) + 0.5) * h;
        sum += fn(x);
        std::size_t k = 0;
        while (k < d && ++idx[k] == m) idx[k++] = 0;
        if (k == d) break;
    }
    return sum * std::pow(h, static_cast<double>(d));
}

TestFunction test_function(const std::string& name) {
    auto power = [](double base) { return [base](std::size_t d) { return std::pow(base, static_cast<double>(d)); }; };
    if (name == "gaussian")
        return {name,
                [](const Eigen::Ref<const Eigen::VectorXd>& x) {
                    return std::exp(-10.0 * (x.array() - 0.5).square().sum());
                },
                power(std::sqrt(M_PI / 10.0) * std::erf(0.5 * std::sqrt(10.0)))};
    if (name == "product") return {name, [](const Eigen::Ref<const Eigen::VectorXd>& x) { return x.prod(); }, power(0.5)};
    if (name == "constant") return {name, [](const Eigen::Ref<const Eigen::VectorXd>&) { return 1.0; }, power(1.0)};
    throw ValidationError("unknown test function '" + name + "'");
}

std::vector<std::string> test_function_names() { return {"gaussian", "product", "constant"}; }

const SlopeFit& RateSweepResult::fit(Sampler s) const {
    for (const auto& f : fits)
        if (f.sampler == s) return f;
    throw ValidationError("no fit for sampler " + std::string(lowdisc::to_string(s)));
}

SlopeFit fit_slope(Sampler s, const std::vector<std::size_t>& ns, const std::vector<double>& errs) {
    SlopeFit f{s, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), false};
    if (ns.size() != errs.size() || ns.size() < 2) return f;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(ns.size()), 2);
    Eigen::VectorXd b(A.rows());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(errs[i] > 0.0) || !std::isfinite(errs[i])) return f;
        A(static_cast<Eigen::Index>(i), 0) = 1.0;
        A(static_cast<Eigen::Index>(i), 1) = std::log(static_cast<double>(ns[i]));
        b[static_cast<Eigen::Index>(i)] = std::log(errs[i]);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    f.slope = coef[1];
    f.residual = (A * coef - b).squaredNorm();
    f.defined = true;
    return f;
}

RateSweepResult rate_sweep(const Integrand& fn, double exact, const std::vector<Sampler>& samplers,
                           const std::vector<std::size_t>& ns, std::size_t d, std::size_t seeds,
                           const lowdisc::VectorCache& cache, std::uint64_t first_seed) {
    if (ns.empty()) throw ValidationError("rate_sweep: no sample sizes");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw ValidationError("rate_sweep: sample sizes must increase");
    if (seeds < 1) throw ValidationError("rate_sweep: need at least one seed");

    RateSweepResult out;
    for (Sampler s : samplers) {
        const bool random = s == Sampler::UniformRandom || s == Sampler::LHS;
        const std::size_t reps = random ? seeds : 1;
        std::vector<double> errs;
        for (std::size_t n : ns) {
            double total = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                auto ps = lowdisc::sample(s, n, d, first_seed + r, cache);
                total += std::abs(qmc_integrate(fn, ps) - exact);
            }
            const double mean = total / static_cast<double>(reps);
            out.rows.push_back({s, n, reps, mean});
            errs.push_back(mean);
        }
        out.fits.push_back(fit_slope(s, ns, errs));
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const RateSweepResult& r) {
    os << "sampler,n,seed_count,mean_abs_err,slope\n";
    os << std::setprecision(17);
    for (const auto& row : r.rows) {
        const auto& f = r.fit(row.sampler);
        os << lowdisc::to_string(row.sampler) << ',' << row.n << ',' << row.seed_count << ',' << row.mean_abs_err << ',';
        if (f.defined)
            os << f.slope;
        else
            os << "nan";
        os << '\n';
    }
}

}  // namespace glpinn::qmcbench
