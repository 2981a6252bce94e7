#include "glpinn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glpinn/error.hpp"

namespace glpinn::optim {

AdamState::AdamState(Eigen::Index n, double lr_) : lr(lr_), m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

void adam_step(AdamState& st, Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad) {
    if (grad.size() != params.size()) throw ValidationError("adam_step: gradient size does not match parameters");
    if (st.m.size() != params.size()) throw ValidationError("adam_step: state size does not match parameters");
    for (Eigen::Index i = 0; i < grad.size(); ++i)
        if (!std::isfinite(grad[i])) throw NonFiniteError("adam_step: non-finite gradient entry", static_cast<std::size_t>(i));

    ++st.step;
    st.m = st.beta1 * st.m + (1.0 - st.beta1) * grad;
    st.v = st.beta2 * st.v + (1.0 - st.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    const double step = st.lr / c1;
    const double root_c2 = std::sqrt(c2);
    params.array() -= step * st.m.array() / (st.v.array().sqrt() / root_c2 + st.eps);
}

void LbfgsState::reset_history() {
    s.clear();
    y.clear();
}

namespace {

struct Sample {
    double t = 0.0;
    double f = 0.0;
    double gtd = 0.0;
    Eigen::VectorXd g;
    Eigen::VectorXd x;
};

// Minimizer of the cubic through two (t, f, f') samples, clamped to [lo, hi].
double cubic_min(const Sample& a, const Sample& b, double lo, double hi) {
    const double d1 = a.gtd + b.gtd - 3.0 * (a.f - b.f) / (a.t - b.t);
    const double d2sq = d1 * d1 - a.gtd * b.gtd;
    double t = 0.5 * (lo + hi);
    if (d2sq >= 0.0) {
        const double d2 = std::sqrt(d2sq);
        double m;
        if (a.t <= b.t)
            m = b.t - (b.t - a.t) * ((b.gtd + d2 - d1) / (b.gtd - a.gtd + 2.0 * d2));
        else
            m = a.t - (a.t - b.t) * ((a.gtd + d2 - d1) / (a.gtd - b.gtd + 2.0 * d2));
        if (std::isfinite(m)) t = std::clamp(m, lo, hi);
    }
    return t;
}

struct SearchResult {
    Sample point;
    bool found = false;
    bool strong_wolfe = false;
    int evaluations = 0;
};

SearchResult strong_wolfe(const LbfgsState& st, const Eigen::VectorXd& x, const Eigen::VectorXd& d, const Sample& start,
                          double t, const LossAndGrad& fn) {
    SearchResult res;
    const double dnorm = d.lpNorm<Eigen::Infinity>();
    auto evaluate = [&](double step) {
        Sample s;
        s.t = step;
        s.g.resize(x.size());
        s.x = x + step * d;
        s.f = fn(s.x, s.g);
        ++res.evaluations;
        if (!std::isfinite(s.f)) {
            s.f = std::numeric_limits<double>::infinity();
            s.gtd = std::numeric_limits<double>::quiet_NaN();
        } else {
            s.gtd = s.g.dot(d);
        }
        return s;
    };
    auto armijo = [&](const Sample& s) { return s.f <= start.f + st.c1 * s.t * start.gtd; };
    auto curvature = [&](const Sample& s) { return std::abs(s.gtd) <= -st.c2 * start.gtd; };

    std::optional<Sample> best;
    auto consider = [&](const Sample& s) {
        if (armijo(s) && (!best || s.f < best->f)) best = s;
    };

    // Bracketing phase.
    Sample prev = start;
    Sample lo, hi;
    bool bracketed = false;
    for (int iter = 0; res.evaluations < st.max_evaluations; ++iter) {
        Sample cur = evaluate(t);
        consider(cur);
        if (!armijo(cur) || (iter > 0 && cur.f >= prev.f)) {
            lo = prev;
            hi = cur;
            bracketed = true;
            break;
        }
        if (curvature(cur)) {
            res.point = cur;
            res.found = res.strong_wolfe = true;
            return res;
        }
        if (cur.gtd >= 0.0) {
            lo = cur;
            hi = prev;
            bracketed = true;
            break;
        }
        const double next = cubic_min(prev, cur, t + 0.01 * (t - prev.t), 10.0 * t);
        prev = cur;
        t = next;
    }

    // Zoom phase: lo always satisfies sufficient decrease and has the lower value.
    while (bracketed && res.evaluations < st.max_evaluations) {
        const double width = std::abs(hi.t - lo.t);
        if (width * dnorm < st.tolerance_change) break;
        const double a = std::min(lo.t, hi.t), b = std::max(lo.t, hi.t);
        double trial = std::isfinite(hi.f) ? cubic_min(lo, hi, a, b) : 0.5 * (a + b);
        // Keep trials away from the bracket ends.
        const double margin = 0.1 * width;
        if (trial - a < margin || b - trial < margin) trial = 0.5 * (a + b);
        Sample cur = evaluate(trial);
        consider(cur);
        if (!armijo(cur) || cur.f >= lo.f) {
            hi = cur;
        } else {
            if (curvature(cur)) {
                res.point = cur;
                res.found = res.strong_wolfe = true;
                return res;
            }
            if (cur.gtd * (hi.t - lo.t) >= 0.0) hi = lo;
            lo = cur;
        }
    }

    if (best && best->t > 0.0 && best->f < start.f) {
        res.point = *best;
        res.found = true;
    }
    return res;
}

Eigen::VectorXd two_loop(const LbfgsState& st, const Eigen::VectorXd& g) {
    const std::size_t m = st.s.size();
    Eigen::VectorXd q = -g;
    if (m == 0) return q;
    std::vector<double> alpha(m), rho(m);
    for (std::size_t i = m; i-- > 0;) {
        rho[i] = 1.0 / st.y[i].dot(st.s[i]);
        alpha[i] = rho[i] * st.s[i].dot(q);
        q -= alpha[i] * st.y[i];
    }
    q *= st.s.back().dot(st.y.back()) / st.y.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
        const double beta = rho[i] * st.y[i].dot(q);
        q += (alpha[i] - beta) * st.s[i];
    }
    return q;
}

}  // namespace

LbfgsStep lbfgs_step(LbfgsState& st, Eigen::VectorXd& params, const LossAndGrad& fn) {
    LbfgsStep out;
    if (!st.cached_x || st.cached_x->size() != params.size() || *st.cached_x != params) {
        st.cached_g.resize(params.size());
        st.cached_f = fn(params, st.cached_g);
        st.cached_x = params;
        out.evaluations = 1;
    }
    Sample start{0.0, st.cached_f, 0.0, st.cached_g, params};
    out.loss = start.f;
    out.grad_norm = start.g.norm();
    if (!std::isfinite(start.f)) return out;
    if (start.g.lpNorm<Eigen::Infinity>() == 0.0) {
        out.outcome = LbfgsOutcome::ZeroGradient;
        return out;
    }

    Eigen::VectorXd d = two_loop(st, start.g);
    start.gtd = start.g.dot(d);
    bool steepest = st.s.empty();
    if (!(start.gtd < 0.0) || !d.allFinite()) {
        d = -start.g;
        start.gtd = -start.g.squaredNorm();
        steepest = true;
    }
    out.steepest_descent = steepest;
    const double t0 = steepest ? std::min(1.0, 1.0 / start.g.lpNorm<1>()) * st.initial_step : st.initial_step;

    SearchResult ls = strong_wolfe(st, params, d, start, t0, fn);
    out.evaluations += ls.evaluations;
    if (!ls.found) return out;

    Eigen::VectorXd s = ls.point.t * d;
    Eigen::VectorXd y = ls.point.g - start.g;
    if (s.dot(y) > 1e-10) {
        st.s.push_back(std::move(s));
        st.y.push_back(std::move(y));
        if (st.s.size() > st.history) {
            st.s.pop_front();
            st.y.pop_front();
        }
    }
    params = ls.point.x;
    st.cached_x = params;
    st.cached_f = ls.point.f;
    st.cached_g = ls.point.g;
    ++st.iterations;

    out.outcome = LbfgsOutcome::Accepted;
    out.step_length = ls.point.t;
    out.loss = ls.point.f;
    out.grad_norm = ls.point.g.norm();
    out.strong_wolfe = ls.strong_wolfe;
    return out;
}

}  // namespace glpinn::optim
