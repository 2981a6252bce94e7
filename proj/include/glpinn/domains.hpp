#pragma once

#include <cstdint>
#include <vector>

#include "glpinn/lowdisc.hpp"

namespace glpinn::domains {

using lowdisc::PointSet;

enum class DomainKind { Box, Disk };
enum class CircleMode { Equispaced, Random };

/// Axis-aligned box, or the unit disk centred at the origin (dim 2).
struct Domain {
    DomainKind kind = DomainKind::Box;
    Eigen::VectorXd lo, hi;

    static Domain box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static Domain unit_box(std::size_t dim);
    static Domain disk();

    std::size_t dim() const;
    double volume() const;
    bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 0.0) const;
};

/// y_k = lo_k + (hi_k - lo_k) x_k.
PointSet map_affine(const PointSet& ps, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// (r, theta) in [0,1]^2 to (sqrt(r) cos 2 pi theta, sqrt(r) sin 2 pi theta).
/// Uniform on the square maps to uniform on the disk.
PointSet map_disk(const PointSet& ps);

/// Unit-cube points pushed onto the domain (affine for boxes, map_disk for the disk).
PointSet map_to_domain(const PointSet& ps, const Domain& domain);

/// n_per_face uniform points on each of the 2d faces, faces ordered
/// (lo_1, hi_1, lo_2, hi_2, ...).
PointSet boundary_box(const Domain& box, std::size_t n_per_face, std::uint64_t seed);

/// Equispaced points on the box boundary; d <= 2 only (d = 2 walks the perimeter).
PointSet boundary_box_equispaced(const Domain& box, std::size_t n_total);

/// Points on the unit circle.
PointSet boundary_circle(std::size_t n, CircleMode mode, std::uint64_t seed);

}  // namespace glpinn::domains
