#include <cmath>
#include <random>

#include "glpinn/domains.hpp"
#include "glpinn/error.hpp"
#include "glpinn/train.hpp"

namespace glpinn::train {

using Eigen::Index;
using Eigen::VectorXd;

RelativeErrors relative_errors(std::span<const double> pred, std::span<const double> exact) {
    if (pred.size() != exact.size()) throw ValidationError("relative_errors: length mismatch");
    if (pred.empty()) throw ValidationError("relative_errors: empty input");
    double max_diff = 0.0, max_exact = 0.0, sum_diff = 0.0, sum_exact = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = exact[i] - pred[i];
        max_diff = std::max(max_diff, std::abs(e));
        max_exact = std::max(max_exact, std::abs(exact[i]));
        sum_diff += e * e;
        sum_exact += exact[i] * exact[i];
    }
    if (max_exact == 0.0 || sum_exact == 0.0) throw ValidationError("relative_errors: exact values are all zero");
    return {max_diff / max_exact, std::sqrt(sum_diff) / std::sqrt(sum_exact)};
}

net::DerivativeBundle dirichlet_multiplier(const Eigen::Ref<const VectorXd>& x) {
    const Index d = x.size();
    VectorXd q = (x.array() * (1.0 - x.array())).matrix();
    net::DerivativeBundle m;
    m.u = q.prod();
    m.grad.resize(d);
    m.diag_hess.resize(d);
    for (Index k = 0; k < d; ++k) {
        double others = 1.0;
        for (Index j = 0; j < d; ++j)
            if (j != k) others *= q[j];
        m.grad[k] = (1.0 - 2.0 * x[k]) * others;
        m.diag_hess[k] = -2.0 * others;
    }
    return m;
}

namespace {

void wrap(const net::DerivativeBundle& m, double n, const Eigen::Ref<const VectorXd>& ng,
          const Eigen::Ref<const VectorXd>& nh, double& u, Eigen::Ref<VectorXd> g, Eigen::Ref<VectorXd> h) {
    u = m.u * n;
    g = m.grad * n + m.u * ng;
    h = (m.diag_hess * n + 2.0 * m.grad.cwiseProduct(ng) + m.u * nh);
}

void check_unit_box(const problems::Problem& p) {
    const auto& dom = p.domain();
    if (dom.kind != domains::DomainKind::Box || !dom.lo.isZero(0.0) || !(dom.hi.array() == 1.0).all())
        throw UnsupportedError("enforced Dirichlet ansatz needs the unit box domain, problem '" + p.name() +
                               "' has another one");
}

}  // namespace

net::DerivativeBundle enforce_zero_dirichlet(const net::DerivativeBundle& raw, const Eigen::Ref<const VectorXd>& x) {
    const auto m = dirichlet_multiplier(x);
    net::DerivativeBundle out;
    out.grad.resize(x.size());
    out.diag_hess.resize(x.size());
    wrap(m, raw.u, raw.grad, raw.diag_hess, out.u, out.grad, out.diag_hess);
    return out;
}

Observations make_observations(const problems::Problem& problem, std::size_t n_obs, std::uint64_t seed,
                               double noise) {
    if (n_obs < 1) throw ValidationError("make_observations: n_obs must be >= 1");
    if (!(noise >= 0.0)) throw ValidationError("make_observations: noise must be >= 0");
    auto unit = lowdisc::baseline_sample(lowdisc::Sampler::UniformRandom, n_obs, problem.dim(), seed);
    Observations obs;
    obs.x = domains::map_to_domain(unit, problem.domain()).coords;
    obs.values.resize(static_cast<Index>(n_obs));
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> xi(0.0, 1.0);
    for (Index i = 0; i < obs.values.size(); ++i) {
        const double u = problem.exact(obs.x.col(i));
        obs.values[i] = noise == 0.0 ? u : u * (1.0 + noise * xi(rng));
    }
    return obs;
}

PinnLoss::PinnLoss(const problems::Problem& problem, Eigen::MatrixXd interior, Eigen::MatrixXd boundary,
                   std::optional<Observations> data, LossWeights weights, bool volume_factors, bool enforce)
    : problem_(problem), interior_(std::move(interior)), boundary_(std::move(boundary)), enforce_(enforce) {
    const Index d = static_cast<Index>(problem.dim());
    if (weights.residual < 0.0 || weights.boundary < 0.0 || weights.data < 0.0)
        throw ValidationError("loss weights must be >= 0");
    if (interior_.size() == 0) interior_.resize(d, 0);
    if (boundary_.size() == 0) boundary_.resize(d, 0);
    if (interior_.rows() != d || boundary_.rows() != d) throw ValidationError("loss points have the wrong dimension");
    if (interior_.cols() == 0) throw ValidationError("the interior batch is empty");
    if (enforce_) {
        check_unit_box(problem);
        if (boundary_.cols() > 0) throw ValidationError("boundary points are redundant under the Dirichlet ansatz");
    } else if (boundary_.cols() == 0 && weights.boundary > 0.0) {
        throw ValidationError("the boundary batch is empty");
    }

    const double volume = volume_factors ? problem.domain().volume() : 1.0;
    w_res_ = weights.residual * volume / static_cast<double>(interior_.cols());
    if (boundary_.cols() > 0) w_bnd_ = weights.boundary / static_cast<double>(boundary_.cols());

    boundary_values_.resize(boundary_.cols());
    for (Index i = 0; i < boundary_.cols(); ++i) boundary_values_[i] = problem.boundary_value(boundary_.col(i));
    if (enforce_) {
        interior_mult_.reserve(static_cast<std::size_t>(interior_.cols()));
        for (Index i = 0; i < interior_.cols(); ++i) interior_mult_.push_back(dirichlet_multiplier(interior_.col(i)));
    }

    data_x_.resize(d, 0);
    if (data) {
        if (data->x.rows() != d || data->x.cols() != data->values.size())
            throw ValidationError("observations have the wrong shape");
        data_x_ = std::move(data->x);
        data_values_ = std::move(data->values);
        if (data_x_.cols() > 0) w_data_ = weights.data / static_cast<double>(data_x_.cols());
        data_mult_ = VectorXd::Ones(data_x_.cols());
        if (enforce_)
            for (Index i = 0; i < data_x_.cols(); ++i) data_mult_[i] = dirichlet_multiplier(data_x_.col(i)).u;
    }
}

const Eigen::MatrixXd& PinnLoss::batch_points(std::size_t b) const {
    switch (b) {
        case 0: return interior_;
        case 1: return boundary_;
        default: return data_x_;
    }
}

double PinnLoss::interior_part(Index first, const net::BatchBundle& out, std::span<const double> scalars,
                               net::BatchBundle& adj, std::span<double> scalar_grad) const {
    const Index d = out.grad.rows();
    std::vector<double> ds(scalars.size());
    VectorXd g(d), h(d);
    double total = 0.0;
    for (Index i = 0; i < out.size(); ++i) {
        const Index p = first + i;
        const auto x = interior_.col(p);
        double u = out.u[i];
        double lap;
        if (enforce_) {
            wrap(interior_mult_[static_cast<std::size_t>(p)], out.u[i], out.grad.col(i), out.diag_hess.col(i), u, g, h);
            lap = h.sum();
        } else {
            lap = out.diag_hess.col(i).sum();
        }
        auto rp = problem_.residual_partials(u, lap, x, scalars, ds);
        if (!std::isfinite(rp.r)) throw NonFiniteError("non-finite residual at interior point", static_cast<std::size_t>(p));
        total += w_res_ * rp.r * rp.r;
        const double c = 2.0 * w_res_ * rp.r;
        const double u_bar = c * rp.du, h_bar = c * rp.dlap;
        for (std::size_t s = 0; s < ds.size(); ++s) scalar_grad[s] += c * ds[s];
        if (enforce_) {
            const auto& m = interior_mult_[static_cast<std::size_t>(p)];
            adj.u[i] = m.u * u_bar + h_bar * m.diag_hess.sum();
            adj.grad.col(i) = 2.0 * h_bar * m.grad;
            adj.diag_hess.col(i).setConstant(m.u * h_bar);
        } else {
            adj.u[i] = u_bar;
            adj.diag_hess.col(i).setConstant(h_bar);
        }
    }
    return total;
}

double PinnLoss::contribution(std::size_t b, Index first, const net::BatchBundle& out, std::span<const double> scalars,
                              net::BatchBundle& adj, std::span<double> scalar_grad) const {
    if (b == 0) return interior_part(first, out, scalars, adj, scalar_grad);
    double total = 0.0;
    if (b == 1) {
        for (Index i = 0; i < out.size(); ++i) {
            const double r = out.u[i] - boundary_values_[first + i];
            total += w_bnd_ * r * r;
            adj.u[i] = 2.0 * w_bnd_ * r;
        }
    } else {
        for (Index i = 0; i < out.size(); ++i) {
            const double m = data_mult_[first + i];
            const double r = m * out.u[i] - data_values_[first + i];
            total += w_data_ * r * r;
            adj.u[i] = 2.0 * w_data_ * r * m;
        }
    }
    return total;
}

double assemble_loss(const net::NetworkParameters& params, const problems::Problem& problem,
                     const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary, const LossWeights& weights,
                     bool volume_factors, bool enforce_dirichlet, const std::optional<Observations>& data) {
    PinnLoss loss(problem, interior, boundary, data, weights, volume_factors, enforce_dirichlet);
    return net::loss_value(params, loss);
}

}  // namespace glpinn::train
