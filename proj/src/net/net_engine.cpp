#include "net_engine.hpp"

namespace glpinn::net::detail {

Engine::Engine(const NetworkParameters& params)
    : params_(params),
      arch_(params.architecture()),
      pre_(arch_.widths.size()),
      post_(arch_.widths.size()) {}

void Engine::forward(const Eigen::Ref<const Eigen::MatrixXd>& x, bool derivatives) {
    batch_ = x.cols();
    dirs_ = derivatives ? x.rows() : 0;
    const Eigen::Index B = batch_;
    const Eigen::Index blocks = 1 + 2 * dirs_;
    x_ = x;

    for (std::size_t l = 0; l < arch_.widths.size(); ++l) {
        const auto W = params_.weight(l);
        const auto b = params_.bias(l);
        auto& Z = pre_[l];
        Z.resize(W.rows(), blocks * B);
        if (l == 0) {
            // d/dx_k of W x is column k of W; the second derivative vanishes.
            Z.leftCols(B).noalias() = W * x_;
            for (Eigen::Index k = 0; k < dirs_; ++k) {
                Z.middleCols((1 + 2 * k) * B, B) = W.col(k).replicate(1, B);
                Z.middleCols((2 + 2 * k) * B, B).setZero();
            }
        } else {
            Z.noalias() = W * post_[l - 1];
        }
        Z.leftCols(B).colwise() += b;
        activate(l);
    }

    const std::size_t last = arch_.widths.size();
    out_.resize(blocks * B);
    out_.noalias() = params_.weight(last) * post_[last - 1];
    out_.head(B).array() += params_.bias(last)[0];
}

void Engine::slopes(std::size_t layer, bool third) {
    const Eigen::Index B = batch_;
    const auto a = post_[layer].leftCols(B).array();
    if (arch_.activation == Activation::Tanh) {
        s1_ = 1.0 - a.square();
        s2_ = -2.0 * a * s1_;
        if (third) s3_ = s1_ * (6.0 * a.square() - 2.0);
    } else {
        s1_ = a * (1.0 - a);
        s2_ = s1_ * (1.0 - 2.0 * a);
        if (third) s3_ = s1_ * (1.0 - 6.0 * a + 6.0 * a.square());
    }
}

void Engine::activate(std::size_t layer) {
    const Eigen::Index B = batch_;
    const auto& Z = pre_[layer];
    auto& A = post_[layer];
    A.resize(Z.rows(), Z.cols());
    if (arch_.activation == Activation::Tanh)
        A.leftCols(B).array() = Z.leftCols(B).array().tanh();
    else
        A.leftCols(B).array() = 1.0 / (1.0 + (-Z.leftCols(B).array()).exp());
    if (dirs_ == 0) return;

    slopes(layer, false);
    for (Eigen::Index k = 0; k < dirs_; ++k) {
        const auto zd = Z.middleCols((1 + 2 * k) * B, B).array();
        const auto zdd = Z.middleCols((2 + 2 * k) * B, B).array();
        A.middleCols((1 + 2 * k) * B, B).array() = s1_ * zd;
        A.middleCols((2 + 2 * k) * B, B).array() = s2_ * zd.square() + s1_ * zdd;
    }
}

void Engine::outputs(BatchBundle& out) const {
    const Eigen::Index B = batch_;
    out.resize(x_.rows(), B, dirs_ > 0);
    out.u = out_.head(B);
    for (Eigen::Index k = 0; k < dirs_; ++k) {
        out.grad.row(k) = out_.segment((1 + 2 * k) * B, B);
        out.diag_hess.row(k) = out_.segment((2 + 2 * k) * B, B);
    }
}

void Engine::activation_backward(std::size_t layer) {
    // Given dL/dA in post_bar_, produce dL/dZ in pre_bar_.
    const Eigen::Index B = batch_;
    const auto& Z = pre_[layer];
    pre_bar_.resize(Z.rows(), Z.cols());
    slopes(layer, dirs_ > 0);

    auto zv_bar = pre_bar_.leftCols(B).array();
    zv_bar = s1_ * post_bar_.leftCols(B).array();
    for (Eigen::Index k = 0; k < dirs_; ++k) {
        const auto zd = Z.middleCols((1 + 2 * k) * B, B).array();
        const auto zdd = Z.middleCols((2 + 2 * k) * B, B).array();
        const auto ad_bar = post_bar_.middleCols((1 + 2 * k) * B, B).array();
        const auto add_bar = post_bar_.middleCols((2 + 2 * k) * B, B).array();
        zv_bar += s2_ * zd * ad_bar + (s3_ * zd.square() + s2_ * zdd) * add_bar;
        pre_bar_.middleCols((1 + 2 * k) * B, B).array() = s1_ * ad_bar + 2.0 * s2_ * zd * add_bar;
        pre_bar_.middleCols((2 + 2 * k) * B, B).array() = s1_ * add_bar;
    }
}

void Engine::backward(const BatchBundle& adjoint, NetworkParameters& grad) {
    const Eigen::Index B = batch_;
    const Eigen::Index blocks = 1 + 2 * dirs_;
    const std::size_t last = arch_.widths.size();

    Eigen::RowVectorXd out_bar(blocks * B);
    out_bar.head(B) = adjoint.u;
    for (Eigen::Index k = 0; k < dirs_; ++k) {
        out_bar.segment((1 + 2 * k) * B, B) = adjoint.grad.row(k);
        out_bar.segment((2 + 2 * k) * B, B) = adjoint.diag_hess.row(k);
    }

    grad.weight(last).noalias() += out_bar * post_[last - 1].transpose();
    grad.bias(last)[0] += adjoint.u.sum();
    post_bar_.noalias() = params_.weight(last).transpose() * out_bar;

    for (std::size_t l = last; l-- > 0;) {
        activation_backward(l);
        grad.bias(l).noalias() += pre_bar_.leftCols(B).rowwise().sum();
        if (l > 0) {
            grad.weight(l).noalias() += pre_bar_ * post_[l - 1].transpose();
            post_bar_.noalias() = params_.weight(l).transpose() * pre_bar_;
        } else {
            auto gw = grad.weight(0);
            gw.noalias() += pre_bar_.leftCols(B) * x_.transpose();
            for (Eigen::Index k = 0; k < dirs_; ++k) gw.col(k) += pre_bar_.middleCols((1 + 2 * k) * B, B).rowwise().sum();
        }
    }
}

}  // namespace glpinn::net::detail
