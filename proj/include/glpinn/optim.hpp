#pragma once

#include <deque>
#include <functional>
#include <optional>

#include <Eigen/Core>

namespace glpinn::optim {

struct AdamState {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    Eigen::VectorXd m, v;

    AdamState() = default;
    AdamState(Eigen::Index n, double lr_);
};

/// One bias-corrected Adam update. Throws NonFiniteError on a non-finite gradient.
void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad);

/// Objective for L-BFGS: returns f(x) and writes the gradient into g.
using LossAndGrad = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;

struct LbfgsState {
    std::size_t history = 50;
    double initial_step = 1.0;
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_evaluations = 25;  // per line search
    double tolerance_change = 1e-12;

    std::deque<Eigen::VectorXd> s, y;
    long iterations = 0;

    // Objective value and gradient at the current iterate, reused by the next step.
    std::optional<Eigen::VectorXd> cached_x;
    double cached_f = 0.0;
    Eigen::VectorXd cached_g;

    void reset_history();
};

enum class LbfgsOutcome {
    Accepted,
    ZeroGradient,  // nothing to do
    Failed,        // no acceptable step; params and state untouched
};

struct LbfgsStep {
    LbfgsOutcome outcome = LbfgsOutcome::Failed;
    double step_length = 0.0;
    double loss = 0.0;  // at the returned params
    double grad_norm = 0.0;
    int evaluations = 0;
    bool steepest_descent = false;
    bool strong_wolfe = false;  // false if only sufficient decrease was reached
};

/// One L-BFGS iteration: two-loop direction, strong-Wolfe line search.
/// A direction that fails to descend is replaced by -g. If no point with
/// sufficient decrease turns up within max_evaluations the step is rejected.
LbfgsStep lbfgs_step(LbfgsState& state, Eigen::VectorXd& params, const LossAndGrad& fn);

}  // namespace glpinn::optim
