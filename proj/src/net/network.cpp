#include <cmath>
#include <random>

#include "glpinn/error.hpp"
#include "glpinn/net.hpp"
#include "net_engine.hpp"

namespace glpinn::net {

std::string_view to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "sigmoid"; }

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ValidationError("unknown activation '" + std::string(name) + "' (expected tanh or sigmoid)");
}

void Architecture::validate() const {
    if (input_dim == 0) throw ValidationError("architecture: input_dim must be positive");
    if (widths.empty()) throw ValidationError("architecture: at least one hidden layer is required");
    for (auto w : widths)
        if (w == 0) throw ValidationError("architecture: hidden widths must be positive");
    if (output_dim != 1) throw ValidationError("architecture: output_dim must be 1");
}

std::size_t Architecture::weight_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) count += fan_out(l) * (fan_in(l) + 1);
    return count;
}

NetworkParameters::NetworkParameters(Architecture arch, std::vector<std::string> scalar_names)
    : arch_(std::move(arch)), scalar_names_(std::move(scalar_names)) {
    arch_.validate();
    std::size_t offset = 0;
    for (std::size_t l = 0; l < arch_.layer_count(); ++l) {
        offsets_.push_back(offset);
        offset += arch_.fan_out(l) * (arch_.fan_in(l) + 1);
    }
    offsets_.push_back(offset);
    values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offset + scalar_names_.size()));
}

std::size_t NetworkParameters::weight_offset(std::size_t layer) const {
    if (layer >= arch_.layer_count()) throw std::out_of_range("layer index out of range");
    return offsets_[layer];
}

Eigen::Map<const Eigen::MatrixXd> NetworkParameters::weight(std::size_t layer) const {
    return {values_.data() + weight_offset(layer), static_cast<Eigen::Index>(arch_.fan_out(layer)),
            static_cast<Eigen::Index>(arch_.fan_in(layer))};
}

Eigen::Map<Eigen::MatrixXd> NetworkParameters::weight(std::size_t layer) {
    return {values_.data() + weight_offset(layer), static_cast<Eigen::Index>(arch_.fan_out(layer)),
            static_cast<Eigen::Index>(arch_.fan_in(layer))};
}

Eigen::Map<const Eigen::VectorXd> NetworkParameters::bias(std::size_t layer) const {
    return {values_.data() + weight_offset(layer) + arch_.fan_out(layer) * arch_.fan_in(layer),
            static_cast<Eigen::Index>(arch_.fan_out(layer))};
}

Eigen::Map<Eigen::VectorXd> NetworkParameters::bias(std::size_t layer) {
    return {values_.data() + weight_offset(layer) + arch_.fan_out(layer) * arch_.fan_in(layer),
            static_cast<Eigen::Index>(arch_.fan_out(layer))};
}

std::span<const double> NetworkParameters::scalars() const {
    return {values_.data() + offsets_.back(), scalar_names_.size()};
}

std::span<double> NetworkParameters::scalars() { return {values_.data() + offsets_.back(), scalar_names_.size()}; }

double NetworkParameters::scalar(std::string_view name) const {
    for (std::size_t i = 0; i < scalar_names_.size(); ++i)
        if (scalar_names_[i] == name) return scalars()[i];
    throw std::out_of_range("no trainable scalar named '" + std::string(name) + "'");
}

void NetworkParameters::set_scalar(std::string_view name, double value) {
    for (std::size_t i = 0; i < scalar_names_.size(); ++i) {
        if (scalar_names_[i] == name) {
            scalars()[i] = value;
            return;
        }
    }
    throw std::out_of_range("no trainable scalar named '" + std::string(name) + "'");
}

NetworkParameters NetworkParameters::zeros_like() const {
    NetworkParameters z = *this;
    z.values_.setZero();
    return z;
}

NetworkParameters init_xavier(const Architecture& arch, std::uint64_t seed,
                              const std::map<std::string, double>& scalars) {
    std::vector<std::string> names;
    for (const auto& [name, _] : scalars) names.push_back(name);
    NetworkParameters p(arch, names);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(arch.fan_in(l) + arch.fan_out(l)));
        auto w = p.weight(l);
        // Column-major fill order, one draw per weight.
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                w(i, j) = bound * (2.0 * u - 1.0);
            }
        p.bias(l).setZero();
    }
    for (const auto& [name, value] : scalars) p.set_scalar(name, value);
    return p;
}

void BatchBundle::resize(Eigen::Index dim, Eigen::Index n, bool derivatives) {
    u.resize(n);
    grad.resize(derivatives ? dim : 0, n);
    diag_hess.resize(derivatives ? dim : 0, n);
}

void BatchBundle::set_zero() {
    u.setZero();
    grad.setZero();
    diag_hess.setZero();
}

DerivativeBundle BatchBundle::at(Eigen::Index i) const {
    DerivativeBundle b;
    b.u = u[i];
    if (has_derivatives()) {
        b.grad = grad.col(i);
        b.diag_hess = diag_hess.col(i);
    }
    return b;
}

BatchBundle evaluate(const NetworkParameters& params, const Eigen::Ref<const Eigen::MatrixXd>& x, bool derivatives,
                     Eigen::Index chunk) {
    const auto& arch = params.architecture();
    if (x.rows() != static_cast<Eigen::Index>(arch.input_dim))
        throw ValidationError("evaluate: points have dimension " + std::to_string(x.rows()) + ", network expects " +
                              std::to_string(arch.input_dim));
    BatchBundle out;
    out.resize(x.rows(), x.cols(), derivatives);
    detail::Engine engine(params);
    BatchBundle part;
    for (Eigen::Index first = 0; first < x.cols(); first += chunk) {
        const Eigen::Index len = std::min(chunk, x.cols() - first);
        engine.forward(x.middleCols(first, len), derivatives);
        engine.outputs(part);
        out.u.segment(first, len) = part.u;
        if (derivatives) {
            out.grad.middleCols(first, len) = part.grad;
            out.diag_hess.middleCols(first, len) = part.diag_hess;
        }
    }
    return out;
}

double forward(const NetworkParameters& params, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return evaluate(params, x, false).u[0];
}

DerivativeBundle input_derivatives(const NetworkParameters& params, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return evaluate(params, x, true).at(0);
}

namespace {

double run_loss(const NetworkParameters& params, const PointLoss& loss, Eigen::Index chunk, NetworkParameters* grad) {
    const auto& arch = params.architecture();
    detail::Engine engine(params);
    std::vector<double> scalar_grad(params.scalars().size(), 0.0);
    BatchBundle out, adjoint;
    double total = 0.0;
    for (std::size_t b = 0; b < loss.batch_count(); ++b) {
        const auto& pts = loss.batch_points(b);
        if (pts.rows() != static_cast<Eigen::Index>(arch.input_dim))
            throw ValidationError("loss batch " + std::to_string(b) + " has points of the wrong dimension");
        const bool derivatives = loss.batch_needs_derivatives(b);
        for (Eigen::Index first = 0; first < pts.cols(); first += chunk) {
            const Eigen::Index len = std::min(chunk, pts.cols() - first);
            engine.forward(pts.middleCols(first, len), derivatives);
            engine.outputs(out);
            adjoint.resize(out.grad.rows() > 0 ? out.grad.rows() : pts.rows(), len, derivatives);
            adjoint.set_zero();
            const double part = loss.contribution(b, first, out, params.scalars(), adjoint, scalar_grad);
            if (!std::isfinite(part)) throw NonFiniteError("non-finite loss contribution in batch", b);
            total += part;
            if (grad) engine.backward(adjoint, *grad);
        }
    }
    const double extra = loss.scalar_terms(params.scalars(), scalar_grad);
    if (!std::isfinite(extra)) throw NonFiniteError("non-finite scalar loss term", loss.batch_count());
    total += extra;
    if (grad) {
        auto gs = grad->scalars();
        for (std::size_t i = 0; i < gs.size(); ++i) gs[i] += scalar_grad[i];
    }
    return total;
}

}  // namespace

LossGradient loss_gradient(const NetworkParameters& params, const PointLoss& loss, Eigen::Index chunk) {
    LossGradient result;
    result.grad = params.zeros_like();
    result.loss = run_loss(params, loss, chunk, &result.grad);
    if (!result.grad.all_finite()) throw NonFiniteError("non-finite gradient", loss.batch_count());
    return result;
}

double loss_value(const NetworkParameters& params, const PointLoss& loss, Eigen::Index chunk) {
    return run_loss(params, loss, chunk, nullptr);
}

}  // namespace glpinn::net
