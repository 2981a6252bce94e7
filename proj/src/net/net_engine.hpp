#pragma once

#include <vector>

#include <Eigen/Core>

#include "glpinn/net.hpp"

namespace glpinn::net::detail {

/// Forward and reverse sweeps over one chunk of B points.
///
/// With derivatives enabled every layer holds C = 1 + 2d column blocks of
/// width B: the values, then for each input axis k the first and second
/// directional derivatives along e_k. A linear layer acts on all blocks with
/// one matrix product (the bias only touches the value block); activations
/// mix the blocks elementwise.
class Engine {
public:
    explicit Engine(const NetworkParameters& params);

    void forward(const Eigen::Ref<const Eigen::MatrixXd>& x, bool derivatives);
    void outputs(BatchBundle& out) const;
    /// Adds the parameter gradient of sum(adjoint .* outputs) into grad.
    void backward(const BatchBundle& adjoint, NetworkParameters& grad);

private:
    void activate(std::size_t layer);
    void activation_backward(std::size_t layer);
    void slopes(std::size_t layer, bool third);

    const NetworkParameters& params_;
    const Architecture& arch_;
    Eigen::Index batch_ = 0;
    Eigen::Index dirs_ = 0;

    Eigen::MatrixXd x_;
    std::vector<Eigen::MatrixXd> pre_;   // pre-activations, all blocks
    std::vector<Eigen::MatrixXd> post_;  // activations, all blocks
    Eigen::RowVectorXd out_;

    Eigen::ArrayXXd s1_, s2_, s3_;
    Eigen::MatrixXd post_bar_, pre_bar_;
};

}  // namespace glpinn::net::detail
