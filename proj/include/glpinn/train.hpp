#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "glpinn/lowdisc.hpp"
#include "glpinn/net.hpp"
#include "glpinn/problems.hpp"

namespace glpinn::train {

// ---------------------------------------------------------------- metrics

struct RelativeErrors {
    double e_inf = 0.0;
    double e_2 = 0.0;
};

/// e_inf = max|u* - u| / max|u*|,  e_2 = ||u* - u||_2 / ||u*||_2.
RelativeErrors relative_errors(std::span<const double> pred, std::span<const double> exact);

// ------------------------------------------------------- Dirichlet ansatz

/// m(x) = prod_k x_k (1 - x_k) with its gradient and Hessian diagonal.
net::DerivativeBundle dirichlet_multiplier(const Eigen::Ref<const Eigen::VectorXd>& x);

/// u = m(x) * n(x) on the unit box, derivatives by the product rule.
net::DerivativeBundle enforce_zero_dirichlet(const net::DerivativeBundle& raw, const Eigen::Ref<const Eigen::VectorXd>& x);

// ---------------------------------------------------------- observations

struct Observations {
    Eigen::MatrixXd x;  // dim x n
    Eigen::VectorXd values;
};

/// n_obs uniform interior points, values u*(x) (1 + noise * xi), xi ~ N(0,1).
Observations make_observations(const problems::Problem& problem, std::size_t n_obs, std::uint64_t seed, double noise);

// ------------------------------------------------------------------ loss

struct LossWeights {
    double residual = 1.0;
    double boundary = 1.0;
    double data = 1.0;
};

/// The empirical PINN loss
///   a1 V mean_i r(x_i)^2 + a2 mean_j (u(x_j) - g(x_j))^2 + a3 mean_l (u(x_l) - obs_l)^2
/// with V the domain volume (1 when volume factors are off). With the
/// Dirichlet ansatz every network output is multiplied by m(x) and the
/// boundary term must be empty.
class PinnLoss : public net::PointLoss {
public:
    PinnLoss(const problems::Problem& problem, Eigen::MatrixXd interior, Eigen::MatrixXd boundary,
             std::optional<Observations> data, LossWeights weights, bool volume_factors, bool enforce_dirichlet);

    std::size_t batch_count() const override { return 3; }
    const Eigen::MatrixXd& batch_points(std::size_t b) const override;
    bool batch_needs_derivatives(std::size_t b) const override { return b == 0; }
    double contribution(std::size_t b, Eigen::Index first, const net::BatchBundle& out, std::span<const double> scalars,
                        net::BatchBundle& adjoint, std::span<double> scalar_grad) const override;

    double residual_weight() const { return w_res_; }

private:
    double interior_part(Eigen::Index first, const net::BatchBundle& out, std::span<const double> scalars,
                         net::BatchBundle& adj, std::span<double> scalar_grad) const;

    const problems::Problem& problem_;
    Eigen::MatrixXd interior_, boundary_, data_x_;
    Eigen::VectorXd boundary_values_, data_values_;
    Eigen::VectorXd data_mult_;
    std::vector<net::DerivativeBundle> interior_mult_;
    bool enforce_;
    double w_res_ = 0.0, w_bnd_ = 0.0, w_data_ = 0.0;
};

double assemble_loss(const net::NetworkParameters& params, const problems::Problem& problem,
                     const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary, const LossWeights& weights,
                     bool volume_factors, bool enforce_dirichlet = false,
                     const std::optional<Observations>& data = std::nullopt);

// ---------------------------------------------------------------- config

enum class BoundaryScheme { Random, Equispaced };

struct ExperimentConfig {
    std::string name = "run";
    problems::ProblemSpec problem;

    lowdisc::Sampler sampler = lowdisc::Sampler::GLP;
    std::size_t n_interior = 0;
    std::uint64_t sampler_seed = 0;

    BoundaryScheme boundary_scheme = BoundaryScheme::Random;
    std::size_t boundary_per_face = 0;  // boxes, random scheme
    std::size_t boundary_n = 0;         // disk, or equispaced total
    std::uint64_t boundary_seed = 1;

    std::size_t test_grid = 0;  // 2-d: grid points per axis
    std::size_t test_n = 0;     // otherwise: uniform random test points
    std::uint64_t test_seed = 7;

    std::size_t width = 40;
    std::size_t depth = 4;
    net::Activation activation = net::Activation::Tanh;
    std::uint64_t seed = 100;

    std::size_t adam_epochs = 0;
    double adam_lr = 1e-4;
    std::size_t lbfgs_epochs = 0;
    std::size_t lbfgs_history = 50;
    double lbfgs_lr = 1.0;

    LossWeights weights;
    bool volume_factors = true;
    bool enforce_dirichlet = false;

    std::size_t data_n = 0;
    std::uint64_t data_seed = 5;
    double data_noise = 0.0;

    std::size_t log_every = 100;
    std::size_t chunk = 64;
    std::filesystem::path vector_cache;
    std::filesystem::path output_dir;

    void validate() const;
};

/// Parse a JSON config. Relative vector_cache paths resolve against base_dir.
/// Throws ValidationError naming the offending field (or the line of a
/// syntax error).
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// ------------------------------------------------------------------- run

struct MetricRow {
    std::size_t epoch = 0;
    double loss = 0.0;
    double e_inf = 0.0;
    double e_2 = 0.0;
    std::optional<double> k_abs_err;
};

/// Held-out points and the exact solution there.
struct TestSet {
    Eigen::MatrixXd x;
    Eigen::VectorXd exact;
    std::size_t grid = 0;  // > 0 for 2-d tensor grids (row-major, y outer)
};

TestSet make_test_set(const problems::Problem& problem, const ExperimentConfig& cfg);

struct TrainReport {
    std::vector<MetricRow> series;
    net::NetworkParameters params;
    std::vector<std::pair<std::string, double>> final_scalars;
    std::size_t lbfgs_epochs_run = 0;
    std::size_t lbfgs_failures = 0;
    bool lbfgs_stopped_early = false;
    double wall_seconds = 0.0;
};

/// Training diverged: non-finite loss at the given epoch.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t epoch, const std::string& detail)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ": " + detail), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

using Progress = std::function<void(const MetricRow&)>;

/// Build points, initialize, run Adam then L-BFGS, log metrics every
/// log_every epochs (plus epoch 0 and the final epoch).
TrainReport train_run(const ExperimentConfig& cfg, const Progress& progress = {});

/// Network prediction (with the ansatz applied when configured).
Eigen::VectorXd predict(const net::NetworkParameters& params, const Eigen::MatrixXd& x, bool enforce_dirichlet,
                        Eigen::Index chunk = 64);

void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& series);
void write_predictions_csv(std::ostream& os, const TestSet& test, const Eigen::VectorXd& pred);

/// train_run plus artifacts in cfg.output_dir: metrics.csv, predictions.csv
/// (2-d problems), checkpoint.{json,bin} and summary.json.
TrainReport run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

}  // namespace glpinn::train
