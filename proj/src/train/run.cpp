#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "glpinn/domains.hpp"
#include "glpinn/error.hpp"
#include "glpinn/optim.hpp"
#include "glpinn/train.hpp"

namespace glpinn::train {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct Setup {
    std::unique_ptr<problems::Problem> problem;
    MatrixXd interior, boundary;
    std::optional<Observations> data;
};

Setup build(const ExperimentConfig& cfg) {
    Setup s;
    s.problem = problems::make_problem(cfg.problem);
    const auto& dom = s.problem->domain();
    const std::size_t d = s.problem->dim();

    lowdisc::VectorCache cache;
    if (!cfg.vector_cache.empty()) cache = lowdisc::VectorCache::load(cfg.vector_cache);
    auto unit = lowdisc::sample(cfg.sampler, cfg.n_interior, d, cfg.sampler_seed, cache);
    s.interior = domains::map_to_domain(unit, dom).coords;

    if (cfg.enforce_dirichlet) {
        s.boundary.resize(static_cast<Index>(d), 0);
    } else if (dom.kind == domains::DomainKind::Disk) {
        const auto mode = cfg.boundary_scheme == BoundaryScheme::Random ? domains::CircleMode::Random
                                                                        : domains::CircleMode::Equispaced;
        if (cfg.boundary_n < 1) throw ValidationError("config: boundary.n is required for the disk");
        s.boundary = domains::boundary_circle(cfg.boundary_n, mode, cfg.boundary_seed).coords;
    } else if (cfg.boundary_scheme == BoundaryScheme::Equispaced) {
        if (cfg.boundary_n < 1) throw ValidationError("config: boundary.n is required for the equispaced scheme");
        s.boundary = domains::boundary_box_equispaced(dom, cfg.boundary_n).coords;
    } else {
        if (cfg.boundary_per_face < 1) throw ValidationError("config: boundary.per_face is required for boxes");
        s.boundary = domains::boundary_box(dom, cfg.boundary_per_face, cfg.boundary_seed).coords;
    }

    if (cfg.data_n > 0) s.data = make_observations(*s.problem, cfg.data_n, cfg.data_seed, cfg.data_noise);
    if (s.problem->needs_data_loss() && !s.data)
        throw ValidationError("config: problem '" + s.problem->name() + "' needs data.n_obs >= 1");
    return s;
}

std::optional<double> scalar_error(const problems::Problem& p, const net::NetworkParameters& params) {
    if (p.scalar_names().empty()) return std::nullopt;
    const auto& name = p.scalar_names().front();
    return std::abs(params.scalar(name) - p.scalar_truth().at(name));
}

}  // namespace

TestSet make_test_set(const problems::Problem& problem, const ExperimentConfig& cfg) {
    TestSet t;
    const auto& dom = problem.domain();
    const std::size_t d = problem.dim();
    if (cfg.test_grid > 0) {
        if (d != 2) throw ValidationError("config: test.grid is for 2-d problems; use test.n");
        const Index g = static_cast<Index>(cfg.test_grid);
        const double lo0 = dom.kind == domains::DomainKind::Disk ? -1.0 : dom.lo[0];
        const double hi0 = dom.kind == domains::DomainKind::Disk ? 1.0 : dom.hi[0];
        const double lo1 = dom.kind == domains::DomainKind::Disk ? -1.0 : dom.lo[1];
        const double hi1 = dom.kind == domains::DomainKind::Disk ? 1.0 : dom.hi[1];
        const VectorXd xs = VectorXd::LinSpaced(g, lo0, hi0), ys = VectorXd::LinSpaced(g, lo1, hi1);
        t.x.resize(2, g * g);
        Index n = 0;
        for (Index j = 0; j < g; ++j)
            for (Index i = 0; i < g; ++i) {
                const Eigen::Vector2d p(xs[i], ys[j]);
                if (dom.kind == domains::DomainKind::Disk && p.squaredNorm() > 1.0) continue;
                t.x.col(n++) = p;
            }
        t.x.conservativeResize(2, n);
        t.grid = cfg.test_grid;
    } else {
        auto unit = lowdisc::baseline_sample(lowdisc::Sampler::UniformRandom, cfg.test_n, d, cfg.test_seed);
        t.x = domains::map_to_domain(unit, dom).coords;
    }
    t.exact.resize(t.x.cols());
    for (Index i = 0; i < t.x.cols(); ++i) t.exact[i] = problem.exact(t.x.col(i));
    return t;
}

VectorXd predict(const net::NetworkParameters& params, const MatrixXd& x, bool enforce_dirichlet, Index chunk) {
    VectorXd u = net::evaluate(params, x, false, chunk).u.transpose();
    if (enforce_dirichlet)
        for (Index i = 0; i < x.cols(); ++i) u[i] *= (x.col(i).array() * (1.0 - x.col(i).array())).prod();
    return u;
}

TrainReport train_run(const ExperimentConfig& cfg, const Progress& progress) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Setup s = build(cfg);
    const auto& problem = *s.problem;
    const TestSet test = make_test_set(problem, cfg);
    const Index chunk = static_cast<Index>(cfg.chunk);

    PinnLoss loss(problem, std::move(s.interior), std::move(s.boundary), std::move(s.data), cfg.weights,
                  cfg.volume_factors, cfg.enforce_dirichlet);

    net::Architecture arch{problem.dim(), std::vector<std::size_t>(cfg.depth, cfg.width), cfg.activation, 1};
    TrainReport rep;
    rep.params = net::init_xavier(arch, cfg.seed, problem.scalar_init());
    auto& params = rep.params;
    // init_xavier names scalars in map order; the problem's order is the one that counts.
    if (params.scalar_names() != problem.scalar_names()) {
        net::NetworkParameters reordered(arch, problem.scalar_names());
        reordered.values().head(static_cast<Index>(arch.weight_count())) =
            params.values().head(static_cast<Index>(arch.weight_count()));
        for (const auto& n : problem.scalar_names()) reordered.set_scalar(n, problem.scalar_init().at(n));
        params = std::move(reordered);
    }

    auto record = [&](std::size_t epoch, double value) {
        const VectorXd pred = predict(params, test.x, cfg.enforce_dirichlet, chunk);
        const auto err = relative_errors({pred.data(), static_cast<std::size_t>(pred.size())},
                                         {test.exact.data(), static_cast<std::size_t>(test.exact.size())});
        MetricRow row{epoch, value, err.e_inf, err.e_2, scalar_error(problem, params)};
        if (!std::isfinite(row.loss) || !std::isfinite(row.e_inf) || !std::isfinite(row.e_2))
            throw DivergenceError(epoch, "non-finite metric");
        rep.series.push_back(row);
        if (progress) progress(row);
    };
    auto value_at = [&](std::size_t epoch) {
        try {
            return net::loss_value(params, loss, chunk);
        } catch (const NonFiniteError& e) {
            throw DivergenceError(epoch, e.what());
        }
    };

    record(0, value_at(0));
    const std::size_t total = cfg.adam_epochs + cfg.lbfgs_epochs;

    optim::AdamState adam(static_cast<Index>(params.size()), cfg.adam_lr);
    for (std::size_t e = 1; e <= cfg.adam_epochs; ++e) {
        try {
            auto lg = net::loss_gradient(params, loss, chunk);
            optim::adam_step(adam, params.values(), lg.grad.values());
        } catch (const NonFiniteError& err) {
            throw DivergenceError(e, err.what());
        }
        if (e % cfg.log_every == 0 || e == total) record(e, value_at(e));
    }

    if (cfg.lbfgs_epochs > 0) {
        optim::LbfgsState st;
        st.history = cfg.lbfgs_history;
        st.initial_step = cfg.lbfgs_lr;
        net::NetworkParameters probe = params;
        optim::LossAndGrad fn = [&](const VectorXd& x, VectorXd& g) {
            probe.values() = x;
            try {
                auto lg = net::loss_gradient(probe, loss, chunk);
                g = lg.grad.values();
                return lg.loss;
            } catch (const NonFiniteError&) {
                g.setConstant(x.size(), std::numeric_limits<double>::quiet_NaN());
                return std::numeric_limits<double>::infinity();
            }
        };
        std::size_t epoch = cfg.adam_epochs;
        double last_loss = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t j = 1; j <= cfg.lbfgs_epochs; ++j) {
            auto r = optim::lbfgs_step(st, params.values(), fn);
            if (r.outcome == optim::LbfgsOutcome::Failed) {
                // Stale curvature pairs are the usual culprit; retry from steepest descent.
                ++rep.lbfgs_failures;
                st.reset_history();
                r = optim::lbfgs_step(st, params.values(), fn);
                if (r.outcome == optim::LbfgsOutcome::Failed) ++rep.lbfgs_failures;
            }
            if (r.outcome != optim::LbfgsOutcome::Accepted) {
                if (!std::isfinite(r.loss)) throw DivergenceError(epoch + 1, "non-finite loss in L-BFGS");
                rep.lbfgs_stopped_early = true;
                break;
            }
            epoch = cfg.adam_epochs + j;
            rep.lbfgs_epochs_run = j;
            last_loss = r.loss;
            if (epoch % cfg.log_every == 0 || epoch == total) record(epoch, r.loss);
        }
        if (rep.lbfgs_stopped_early && rep.series.back().epoch != epoch)
            record(epoch, epoch > cfg.adam_epochs ? last_loss : value_at(epoch));
    }

    for (const auto& n : problem.scalar_names()) rep.final_scalars.emplace_back(n, params.scalar(n));
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& series) {
    const bool with_k = !series.empty() && series.front().k_abs_err.has_value();
    os << "epoch,loss,e_inf,e_2" << (with_k ? ",k_abs_err" : "") << '\n';
    for (const auto& r : series) {
        os << r.epoch << ',' << num(r.loss) << ',' << num(r.e_inf) << ',' << num(r.e_2);
        if (with_k) os << ',' << num(r.k_abs_err.value_or(std::numeric_limits<double>::quiet_NaN()));
        os << '\n';
    }
}

void write_predictions_csv(std::ostream& os, const TestSet& test, const VectorXd& pred) {
    if (test.x.rows() != 2) throw ValidationError("prediction dump is for 2-d problems");
    os << "x,y,u_pred,u_exact,abs_err\n";
    for (Index i = 0; i < test.x.cols(); ++i)
        os << num(test.x(0, i)) << ',' << num(test.x(1, i)) << ',' << num(pred[i]) << ',' << num(test.exact[i])
           << ',' << num(std::abs(pred[i] - test.exact[i])) << '\n';
}

TrainReport run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    TrainReport rep = train_run(cfg, progress);

    auto open = [&](const char* name) {
        std::ofstream os(cfg.output_dir / name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (cfg.output_dir / name).string());
        return os;
    };
    {
        auto os = open("metrics.csv");
        write_metrics_csv(os, rep.series);
    }
    auto problem = problems::make_problem(cfg.problem);
    if (problem->dim() == 2) {
        const TestSet test = make_test_set(*problem, cfg);
        auto os = open("predictions.csv");
        write_predictions_csv(os, test, predict(rep.params, test.x, cfg.enforce_dirichlet, static_cast<Index>(cfg.chunk)));
    }
    net::save_checkpoint(rep.params, cfg.output_dir / "checkpoint");

    const auto& last = rep.series.back();
    nlohmann::json summary = {
        {"name", cfg.name},
        {"problem", cfg.problem.name},
        {"sampler", std::string(lowdisc::to_string(cfg.sampler))},
        {"n_interior", cfg.n_interior},
        {"final_epoch", last.epoch},
        {"loss", last.loss},
        {"e_inf", last.e_inf},
        {"e_2", last.e_2},
        {"lbfgs_epochs_run", rep.lbfgs_epochs_run},
        {"lbfgs_failures", rep.lbfgs_failures},
        {"lbfgs_stopped_early", rep.lbfgs_stopped_early},
        {"wall_seconds", rep.wall_seconds},
    };
    for (const auto& [name, value] : rep.final_scalars) {
        const double truth = problem->scalar_truth().at(name);
        summary["scalars"][name] = {
            {"value", value}, {"abs_err", std::abs(value - truth)}, {"sq_abs_err", std::abs(value * value - truth * truth)}};
    }
    auto os = open("summary.json");
    os << summary.dump(2) << '\n';
    return rep;
}

}  // namespace glpinn::train
