#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace glpinn::net {

enum class Activation { Tanh, Sigmoid };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected network input_dim -> widths... -> 1 with a linear output layer.
struct Architecture {
    std::size_t input_dim = 1;
    std::vector<std::size_t> widths;
    Activation activation = Activation::Tanh;
    std::size_t output_dim = 1;

    void validate() const;
    std::size_t layer_count() const { return widths.size() + 1; }
    std::size_t fan_in(std::size_t layer) const { return layer == 0 ? input_dim : widths[layer - 1]; }
    std::size_t fan_out(std::size_t layer) const { return layer == widths.size() ? output_dim : widths[layer]; }
    /// Weights and biases only, without trainable scalars.
    std::size_t weight_count() const;

    bool operator==(const Architecture&) const = default;
};

/// Flat parameter vector. Layout, layer by layer from the input: the weight
/// matrix (fan_out x fan_in, column-major) followed by the bias vector. Named
/// trainable scalars (e.g. the Helmholtz wavenumber) come last, in
/// `scalar_names` order.
///
/// Gradients use the same type, so every entry of a gradient sits at the
/// offset of the parameter it belongs to.
class NetworkParameters {
public:
    NetworkParameters() = default;
    NetworkParameters(Architecture arch, std::vector<std::string> scalar_names);

    const Architecture& architecture() const { return arch_; }
    const std::vector<std::string>& scalar_names() const { return scalar_names_; }

    Eigen::VectorXd& values() { return values_; }
    const Eigen::VectorXd& values() const { return values_; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

    Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
    Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

    std::span<const double> scalars() const;
    std::span<double> scalars();
    double scalar(std::string_view name) const;
    void set_scalar(std::string_view name, double value);

    /// Same shape, all entries zero.
    NetworkParameters zeros_like() const;
    bool all_finite() const { return values_.allFinite(); }

private:
    std::size_t weight_offset(std::size_t layer) const;

    Architecture arch_;
    std::vector<std::string> scalar_names_;
    std::vector<std::size_t> offsets_;
    Eigen::VectorXd values_;
};

/// Xavier-uniform weights with bound sqrt(6 / (fan_in + fan_out)), zero biases.
/// Trainable scalars start at the given values (0 when absent).
NetworkParameters init_xavier(const Architecture& arch, std::uint64_t seed,
                              const std::map<std::string, double>& scalars = {});

/// Value, input gradient and diagonal of the input Hessian at one point.
struct DerivativeBundle {
    double u = 0.0;
    Eigen::VectorXd grad;
    Eigen::VectorXd diag_hess;
};

/// Network outputs over a batch of points (one column per point).
/// grad/diag_hess are empty (0 rows) when derivatives were not requested.
struct BatchBundle {
    Eigen::RowVectorXd u;
    Eigen::MatrixXd grad;
    Eigen::MatrixXd diag_hess;

    Eigen::Index size() const { return u.size(); }
    bool has_derivatives() const { return grad.rows() > 0; }
    void resize(Eigen::Index dim, Eigen::Index n, bool derivatives);
    void set_zero();
    DerivativeBundle at(Eigen::Index i) const;
};

double forward(const NetworkParameters& params, const Eigen::Ref<const Eigen::VectorXd>& x);
DerivativeBundle input_derivatives(const NetworkParameters& params, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Batched evaluation. With derivatives, each coordinate direction carries a
/// (value, first, second) directional triple through every layer.
BatchBundle evaluate(const NetworkParameters& params, const Eigen::Ref<const Eigen::MatrixXd>& x, bool derivatives,
                     Eigen::Index chunk = 64);

/// A scalar loss assembled from network outputs on fixed point batches.
///
/// loss_gradient walks each batch in chunks. For every chunk it evaluates the
/// network and calls contribution() with the outputs of points
/// [first, first + out.size()). The loss fills `adjoint` with the derivative of
/// its contribution with respect to each output entry and adds derivatives
/// with respect to trainable scalars into `scalar_grad`.
class PointLoss {
public:
    virtual ~PointLoss() = default;

    virtual std::size_t batch_count() const = 0;
    virtual const Eigen::MatrixXd& batch_points(std::size_t batch) const = 0;
    virtual bool batch_needs_derivatives(std::size_t batch) const = 0;

    virtual double contribution(std::size_t batch, Eigen::Index first, const BatchBundle& out,
                                std::span<const double> scalars, BatchBundle& adjoint,
                                std::span<double> scalar_grad) const = 0;

    /// Terms that depend on trainable scalars only (none by default).
    virtual double scalar_terms(std::span<const double> /*scalars*/, std::span<double> /*scalar_grad*/) const {
        return 0.0;
    }
};

struct LossGradient {
    double loss = 0.0;
    NetworkParameters grad;
};

/// Exact loss and gradient by reverse accumulation through the network and
/// its directional-derivative triples. Chunks are reduced in a fixed order, so
/// results are bit-reproducible. Throws NonFiniteError with the batch index
/// if a contribution is not finite.
LossGradient loss_gradient(const NetworkParameters& params, const PointLoss& loss, Eigen::Index chunk = 64);

/// Loss only (no reverse pass).
double loss_value(const NetworkParameters& params, const PointLoss& loss, Eigen::Index chunk = 64);

// Checkpoints --------------------------------------------------------------

/// Writes `<stem>.bin` (little-endian float64, flat layout above) and
/// `<stem>.json` (architecture, scalar names, parameter count).
void save_checkpoint(const NetworkParameters& params, const std::filesystem::path& stem);
NetworkParameters load_checkpoint(const std::filesystem::path& stem);

}  // namespace glpinn::net
