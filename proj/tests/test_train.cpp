#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "glpinn/error.hpp"
#include "glpinn/train.hpp"
#include "net_fixtures.hpp"
#include "oracles.hpp"

using namespace glpinn;
using namespace glpinn::train;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

net::BatchBundle exact_batch(const problems::Problem& p, const Eigen::MatrixXd& x) {
    net::BatchBundle b;
    b.resize(x.rows(), x.cols(), true);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        auto e = p.exact_derivatives(x.col(i));
        b.u[i] = e.u;
        b.grad.col(i) = e.grad;
        b.diag_hess.col(i) = e.diag_hess;
    }
    return b;
}

const char* kTinyConfig = R"({
  "name": "tiny",
  "problem": {"name": "hd_nonlinear", "d": 2, "k": 1},
  "sampler": {"kind": "glp", "n": 89},
  "boundary": {"scheme": "random", "per_face": 8, "seed": 3},
  "test": {"grid": 21},
  "network": {"width": 8, "depth": 2, "activation": "tanh"},
  "adam": {"epochs": 30, "lr": 0.01},
  "lbfgs": {"epochs": 10},
  "log_every": 10
})";

}  // namespace

TEST_CASE("relative_errors") {
    auto a = relative_errors(vec({1.0, 2.0, -3.0}), vec({1.0, 2.0, -3.0}));
    CHECK(a.e_inf == 0.0);
    CHECK(a.e_2 == 0.0);
    auto b = relative_errors(vec({1.0, 0.5}), vec({1.0, 0.0}));
    CHECK(b.e_inf == 0.5);
    CHECK(b.e_2 == 0.5);
    auto c = relative_errors(vec({1.0}), vec({2.0}));
    CHECK(c.e_inf == 0.5);
    CHECK(c.e_2 == 0.5);
    CHECK_THROWS_AS(relative_errors(vec({1.0}), vec({0.0})), ValidationError);
    CHECK_THROWS_AS(relative_errors(vec({1.0}), vec({1.0, 2.0})), ValidationError);
    CHECK_THROWS_AS(relative_errors(vec({}), vec({})), ValidationError);
}

TEST_CASE("dirichlet multiplier and ansatz") {
    CHECK(dirichlet_multiplier(Eigen::Vector2d(0.5, 0.5)).u == 0.0625);
    net::DerivativeBundle raw{1.7, Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(1.0, 2.0)};
    CHECK(enforce_zero_dirichlet(raw, Eigen::Vector2d(0.0, 0.5)).u == 0.0);
    CHECK(enforce_zero_dirichlet(raw, Eigen::Vector2d(0.3, 1.0)).u == 0.0);

    auto p = net::init_xavier({2, {10, 10}, net::Activation::Tanh, 1}, 5);
    fixtures::jitter_biases(p, 5);
    auto pts = fixtures::random_points(2, 20, 0.05, 0.95, 8);
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        const Eigen::VectorXd x = pts.col(i);
        const auto w = enforce_zero_dirichlet(net::input_derivatives(p, x), x);
        double lap_fd = 0.0;
        for (Eigen::Index k = 0; k < 2; ++k) {
            auto along = [&](double s) {
                Eigen::VectorXd y = x;
                y[k] = s;
                return dirichlet_multiplier(y).u * net::forward(p, y);
            };
            CHECK(oracle::rel_err(w.grad[k], oracle::central_diff(along, x[k], 1e-4), 1e-6) < 1e-5);
            lap_fd += oracle::central_second_diff(along, x[k], 1e-4);
        }
        CHECK(oracle::rel_err(w.diag_hess.sum(), lap_fd, 1e-3) < 1e-3);
    }
}

TEST_CASE("make_observations") {
    auto helm = problems::helmholtz_inverse();
    auto clean = make_observations(*helm, 40, 9, 0.0);
    CHECK(clean.x.cols() == 40);
    CHECK(clean.values.size() == 40);
    for (Eigen::Index i = 0; i < 40; ++i) {
        CHECK(clean.values[i] == helm->exact(clean.x.col(i)));
        CHECK(helm->domain().contains(clean.x.col(i)));
    }
    auto again = make_observations(*helm, 40, 9, 0.0);
    CHECK(again.x == clean.x);
    auto noisy = make_observations(*helm, 40, 9, 0.05);
    CHECK(noisy.x == clean.x);
    CHECK(noisy.values != clean.values);
    CHECK(make_observations(*helm, 40, 9, 0.05).values == noisy.values);
    // Multiplicative noise: relative deviations have spread about 0.05.
    double ss = 0.0;
    for (Eigen::Index i = 0; i < 40; ++i) ss += std::pow(noisy.values[i] / clean.values[i] - 1.0, 2);
    const double sd = std::sqrt(ss / 40.0);
    CHECK(sd > 0.025);
    CHECK(sd < 0.1);
    CHECK_THROWS_AS(make_observations(*helm, 0, 1, 0.0), ValidationError);
    auto disk = problems::two_peak_disk();
    auto d = make_observations(*disk, 200, 1, 0.0);
    for (Eigen::Index i = 0; i < d.x.cols(); ++i) CHECK(disk->domain().contains(d.x.col(i)));
}

TEST_CASE("assemble_loss: zero network on one_peak at the origin") {
    auto prob = problems::one_peak();
    net::NetworkParameters zero({2, {6, 6}, net::Activation::Tanh, 1}, {});
    Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(2, 1);
    const double l = assemble_loss(zero, *prob, origin, Eigen::MatrixXd(), {1.0, 0.0, 1.0}, true);
    CHECK(l == 4.0 * 4000.0 * 4000.0);
    CHECK(assemble_loss(zero, *prob, origin, Eigen::MatrixXd(), {1.0, 0.0, 1.0}, false) == 4000.0 * 4000.0);
    Eigen::MatrixXd bnd(2, 2);
    bnd << -1.0, 1.0, 0.0, 0.3;
    CHECK(assemble_loss(zero, *prob, origin, bnd, {0.0, 0.0, 0.0}, true) == 0.0);
    // Boundary only: mean of g^2.
    const double g0 = prob->exact(bnd.col(0)), g1 = prob->exact(bnd.col(1));
    CHECK(assemble_loss(zero, *prob, origin, bnd, {0.0, 1.0, 0.0}, true) ==
          doctest::Approx(0.5 * (g0 * g0 + g1 * g1)).epsilon(1e-14));
    CHECK_THROWS_AS(assemble_loss(zero, *prob, origin, Eigen::MatrixXd(), {1.0, 1.0, 1.0}, true), ValidationError);
    CHECK_THROWS_AS(assemble_loss(zero, *prob, Eigen::MatrixXd(), bnd, {1.0, 1.0, 1.0}, true), ValidationError);
}

TEST_CASE("interior term vanishes on the closed-form solution") {
    std::vector<std::unique_ptr<problems::Problem>> probs;
    probs.push_back(problems::one_peak());
    probs.push_back(problems::two_peak_disk());
    probs.push_back(problems::helmholtz_inverse());
    probs.push_back(problems::hd_linear(5, 10.0));
    probs.push_back(problems::hd_nonlinear(5, 4.0));
    for (const auto& p : probs) {
        auto unit = lowdisc::baseline_sample(lowdisc::Sampler::Halton, 50, p->dim(), 0);
        Eigen::MatrixXd x = domains::map_to_domain(unit, p->domain()).coords;
        PinnLoss loss(*p, x, Eigen::MatrixXd(), std::nullopt, {1.0, 0.0, 0.0}, true, false);
        auto out = exact_batch(*p, x);
        net::BatchBundle adj;
        adj.resize(x.rows(), x.cols(), true);
        adj.set_zero();
        std::vector<double> k, kg;
        for (const auto& n : p->scalar_names()) k.push_back(p->scalar_truth().at(n));
        kg.resize(k.size());
        const double v = loss.contribution(0, 0, out, k, adj, kg);
        INFO(p->name());
        CHECK(v <= 1e-15 * p->domain().volume());
    }
}

TEST_CASE("PinnLoss gradients match finite differences") {
    SUBCASE("one_peak with boundary") {
        auto prob = problems::one_peak();
        auto p = net::init_xavier({2, {6, 5}, net::Activation::Tanh, 1}, 1);
        fixtures::jitter_biases(p, 2);
        PinnLoss loss(*prob, fixtures::random_points(2, 12, -1.0, 1.0, 1), fixtures::random_points(2, 6, -1.0, 1.0, 2),
                      std::nullopt, {1.0, 1.0, 1.0}, true, false);
        CHECK(fixtures::max_param_fd_error(p, loss, 1e-5, 1e-6) < 1e-5);
    }
    SUBCASE("helmholtz with ansatz, data and trainable k") {
        auto prob = problems::helmholtz_inverse();
        auto p = net::init_xavier({2, {6, 5}, net::Activation::Tanh, 1}, 3, {{"k", 0.8}});
        fixtures::jitter_biases(p, 4);
        auto obs = make_observations(*prob, 7, 2, 0.05);
        PinnLoss loss(*prob, fixtures::random_points(2, 11, 0.0, 1.0, 5), Eigen::MatrixXd(), obs, {1.0, 1.0, 1.0},
                      true, true);
        CHECK(fixtures::max_param_fd_error(p, loss, 1e-5, 1e-6) < 1e-5);
    }
    SUBCASE("nonlinear 3-d, sigmoid") {
        auto prob = problems::hd_nonlinear(3, 2.0);
        auto p = net::init_xavier({3, {5, 5, 5}, net::Activation::Sigmoid, 1}, 6);
        fixtures::jitter_biases(p, 6);
        PinnLoss loss(*prob, fixtures::random_points(3, 9, 0.0, 1.0, 6),
                      domains::boundary_box(prob->domain(), 2, 1).coords, std::nullopt, {2.0, 0.5, 1.0}, true, false);
        CHECK(fixtures::max_param_fd_error(p, loss, 1e-5, 1e-6) < 1e-5);
    }
}

TEST_CASE("enforced Dirichlet predictions vanish on the boundary") {
    auto p = net::init_xavier({2, {8, 8}, net::Activation::Tanh, 1}, 2);
    auto b = domains::boundary_box(domains::Domain::unit_box(2), 10, 4).coords;
    auto u = predict(p, b, true);
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
    auto prob = problems::one_peak();
    CHECK_THROWS_AS(PinnLoss(*prob, Eigen::MatrixXd::Zero(2, 1), Eigen::MatrixXd(), std::nullopt, {}, true, true),
                    UnsupportedError);
}

TEST_CASE("parse_config") {
    auto c = parse_config(kTinyConfig, "/base");
    CHECK(c.name == "tiny");
    CHECK(c.problem.name == "hd_nonlinear");
    CHECK(c.problem.d == 2);
    CHECK(c.sampler == lowdisc::Sampler::GLP);
    CHECK(c.n_interior == 89);
    CHECK(c.boundary_per_face == 8);
    CHECK(c.test_grid == 21);
    CHECK(c.width == 8);
    CHECK(c.depth == 2);
    CHECK(c.seed == 100);
    CHECK(c.adam_lr == 0.01);
    CHECK(c.lbfgs_history == 50);
    CHECK(c.volume_factors);
    CHECK(c.output_dir == std::filesystem::path("runs/tiny"));

    auto with_cache = parse_config(R"({"problem": {"name": "one_peak"}, "sampler": {"kind": "uniform", "n": 5},
        "test": {"grid": 3}, "vector_cache": "../data/v.txt"})",
                                   "/cfg");
    CHECK(with_cache.vector_cache == std::filesystem::path("/cfg/../data/v.txt"));

    try {
        parse_config("{\n  \"problem\": {\"name\": \"one_peak\"},\n  \"sampler\": {\"kind\": \"glp\" \"n\": 5}\n}");
        FAIL("expected a syntax error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    auto field_error = [](const char* text) {
        try {
            parse_config(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(field_error(R"({"problem": {"name": "one_peak"}, "sampler": {"kind": "glp", "n": "many"}, "test": {"grid": 3}})")
              .find("sampler.n") != std::string::npos);
    CHECK(field_error(R"({"problem": {"name": "one_peak"}, "sampler": {"kind": "glp", "n": 5}, "test": {"grid": 3}, "adam": {"epoch": 5}})")
              .find("adam.epoch") != std::string::npos);
    CHECK(field_error(R"({"sampler": {"kind": "glp", "n": 5}, "test": {"grid": 3}})").find("problem") !=
          std::string::npos);
    CHECK(field_error(R"({"problem": {"name": "one_peak"}, "sampler": {"kind": "magic", "n": 5}, "test": {"grid": 3}})")
              .find("sampler.kind") != std::string::npos);
    CHECK(field_error(R"({"problem": {"name": "one_peak"}, "sampler": {"kind": "glp", "n": 5}, "test": {"grid": 3}, "seed": -1})")
              .find("seed") != std::string::npos);
    CHECK_FALSE(field_error(R"({"problem": {"name": "one_peak"}, "sampler": {"kind": "glp", "n": 0}, "test": {"grid": 3}})")
                    .empty());
}

TEST_CASE("test sets") {
    ExperimentConfig c;
    c.test_grid = 5;
    auto box = make_test_set(*problems::one_peak(), c);
    CHECK(box.x.cols() == 25);
    CHECK(box.x.col(0) == Eigen::Vector2d(-1.0, -1.0));
    CHECK(box.x.col(1) == Eigen::Vector2d(-0.5, -1.0));
    CHECK(box.x.col(24) == Eigen::Vector2d(1.0, 1.0));
    CHECK(box.exact[12] == 1.0);
    auto disk = make_test_set(*problems::two_peak_disk(), c);
    CHECK(disk.x.cols() == 13);  // 5x5 grid points with x^2 + y^2 <= 1
    c.test_grid = 0;
    c.test_n = 100;
    auto hd = make_test_set(*problems::hd_linear(5, 10.0), c);
    CHECK(hd.x.cols() == 100);
    CHECK(hd.x.rows() == 5);
    c.test_grid = 4;
    CHECK_THROWS_AS(make_test_set(*problems::hd_linear(5, 10.0), c), ValidationError);
}

TEST_CASE("train_run without epochs logs epoch 0 only") {
    auto c = parse_config(kTinyConfig);
    c.adam_epochs = 0;
    c.lbfgs_epochs = 0;
    auto rep = train_run(c);
    REQUIRE(rep.series.size() == 1);
    CHECK(rep.series[0].epoch == 0);
    CHECK(rep.series[0].loss > 0.0);
    CHECK_FALSE(rep.series[0].k_abs_err.has_value());
}

TEST_CASE("train_run is deterministic and logs on schedule") {
    auto c = parse_config(kTinyConfig);
    auto a = train_run(c);
    auto b = train_run(c);
    std::vector<std::size_t> epochs;
    for (const auto& r : a.series) epochs.push_back(r.epoch);
    CHECK(epochs == std::vector<std::size_t>{0, 10, 20, 30, 40});
    REQUIRE(a.series.size() == b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        CHECK(a.series[i].loss == b.series[i].loss);
        CHECK(a.series[i].e_2 == b.series[i].e_2);
    }
    CHECK(a.params.values() == b.params.values());
    CHECK(a.series.back().loss < a.series.front().loss);
    std::ostringstream sa, sb;
    write_metrics_csv(sa, a.series);
    write_metrics_csv(sb, b.series);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("epoch,loss,e_inf,e_2\n0,", 0) == 0);
}

TEST_CASE("train_run: inverse problem tracks k") {
    auto c = parse_config(R"({
      "problem": {"name": "helmholtz_inverse"},
      "sampler": {"kind": "glp", "n": 144},
      "test": {"grid": 11},
      "network": {"width": 8, "depth": 2},
      "enforce_dirichlet": true,
      "data": {"n_obs": 10, "seed": 1},
      "adam": {"epochs": 20, "lr": 0.01},
      "log_every": 10
    })");
    auto rep = train_run(c);
    REQUIRE(rep.series.front().k_abs_err.has_value());
    CHECK(*rep.series.front().k_abs_err == doctest::Approx(2.9).epsilon(1e-12));
    REQUIRE(rep.final_scalars.size() == 1);
    CHECK(rep.final_scalars[0].first == "k");
    std::ostringstream os;
    write_metrics_csv(os, rep.series);
    CHECK(os.str().rfind("epoch,loss,e_inf,e_2,k_abs_err\n", 0) == 0);
}

TEST_CASE("run_experiment writes its artifacts") {
    auto c = parse_config(kTinyConfig);
    c.adam_epochs = 5;
    c.lbfgs_epochs = 0;
    c.output_dir = std::filesystem::temp_directory_path() / "glpinn_run_test";
    std::filesystem::remove_all(c.output_dir);
    run_experiment(c);
    for (const char* f : {"metrics.csv", "predictions.csv", "checkpoint.json", "checkpoint.bin", "summary.json"})
        CHECK(std::filesystem::exists(c.output_dir / f));
    std::ifstream pred(c.output_dir / "predictions.csv");
    std::string header;
    std::getline(pred, header);
    CHECK(header == "x,y,u_pred,u_exact,abs_err");
    std::size_t rows = 0;
    for (std::string line; std::getline(pred, line);) ++rows;
    CHECK(rows == 21 * 21);
    auto params = net::load_checkpoint(c.output_dir / "checkpoint");
    CHECK(params.architecture().widths == std::vector<std::size_t>{8, 8});
    std::filesystem::remove_all(c.output_dir);
}
