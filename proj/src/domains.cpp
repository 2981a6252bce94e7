#include "glpinn/domains.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "glpinn/error.hpp"

namespace glpinn::domains {

namespace {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Domain Domain::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size() || lo.size() == 0) throw ValidationError("box: lo and hi must have the same positive length");
    for (Eigen::Index k = 0; k < lo.size(); ++k)
        if (!(lo[k] < hi[k])) throw ValidationError("box: lo < hi violated on axis " + std::to_string(k));
    return Domain{DomainKind::Box, std::move(lo), std::move(hi)};
}

Domain Domain::unit_box(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return box(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
}

Domain Domain::disk() { return Domain{DomainKind::Disk, Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Ones(2)}; }

std::size_t Domain::dim() const { return kind == DomainKind::Disk ? 2 : static_cast<std::size_t>(lo.size()); }

double Domain::volume() const {
    if (kind == DomainKind::Disk) return std::numbers::pi;
    return (hi - lo).prod();
}

bool Domain::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const {
    if (kind == DomainKind::Disk) return x.squaredNorm() <= 1.0 + tol;
    for (Eigen::Index k = 0; k < x.size(); ++k)
        if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
    return true;
}

PointSet map_affine(const PointSet& ps, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const auto d = static_cast<Eigen::Index>(ps.dim());
    if (lo.size() != d || hi.size() != d)
        throw ValidationError("map_affine: dimension mismatch (points " + std::to_string(d) + ", bounds " +
                              std::to_string(lo.size()) + "/" + std::to_string(hi.size()) + ")");
    PointSet out = ps;
    out.coords = ((hi - lo).asDiagonal() * ps.coords).colwise() + lo;
    return out;
}

PointSet map_disk(const PointSet& ps) {
    if (ps.dim() != 2) throw ValidationError("map_disk: needs 2-d points (got " + std::to_string(ps.dim()) + ")");
    PointSet out = ps;
    for (Eigen::Index i = 0; i < ps.coords.cols(); ++i) {
        const double r = std::sqrt(ps.coords(0, i));
        const double angle = 2.0 * std::numbers::pi * ps.coords(1, i);
        out.coords(0, i) = r * std::cos(angle);
        out.coords(1, i) = r * std::sin(angle);
    }
    return out;
}

PointSet map_to_domain(const PointSet& ps, const Domain& domain) {
    if (domain.kind == DomainKind::Disk) return map_disk(ps);
    return map_affine(ps, domain.lo, domain.hi);
}

PointSet boundary_box(const Domain& box, std::size_t n_per_face, std::uint64_t seed) {
    if (box.kind != DomainKind::Box) throw ValidationError("boundary_box: domain is not a box");
    if (n_per_face == 0) throw ValidationError("boundary_box: n_per_face must be at least 1");
    const auto d = static_cast<Eigen::Index>(box.dim());
    const auto per = static_cast<Eigen::Index>(n_per_face);
    std::mt19937_64 rng(seed);
    PointSet out;
    out.provenance = lowdisc::Sampler::UniformRandom;
    out.seed = seed;
    out.coords.resize(d, 2 * d * per);
    Eigen::Index col = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
        for (int side = 0; side < 2; ++side) {
            const double fixed = side == 0 ? box.lo[k] : box.hi[k];
            for (Eigen::Index i = 0; i < per; ++i, ++col) {
                for (Eigen::Index j = 0; j < d; ++j)
                    out.coords(j, col) = j == k ? fixed : box.lo[j] + (box.hi[j] - box.lo[j]) * unit_draw(rng);
            }
        }
    }
    return out;
}

PointSet boundary_box_equispaced(const Domain& box, std::size_t n_total) {
    if (box.kind != DomainKind::Box) throw ValidationError("boundary_box_equispaced: domain is not a box");
    if (n_total == 0) throw ValidationError("boundary_box_equispaced: n must be at least 1");
    // Deterministic construction; provenance stays at its default and no seed is recorded.
    PointSet out;
    const auto n = static_cast<Eigen::Index>(n_total);
    if (box.dim() == 1) {
        out.coords.resize(1, n);
        for (Eigen::Index i = 0; i < n; ++i) out.coords(0, i) = (i % 2 == 0) ? box.lo[0] : box.hi[0];
        return out;
    }
    if (box.dim() != 2) throw UnsupportedError("equispaced box boundary is only offered for d <= 2");
    const double wx = box.hi[0] - box.lo[0], wy = box.hi[1] - box.lo[1];
    const double perimeter = 2.0 * (wx + wy);
    out.coords.resize(2, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = perimeter * static_cast<double>(i) / static_cast<double>(n);
        double x, y;
        if (s < wx) {
            x = box.lo[0] + s, y = box.lo[1];
        } else if ((s -= wx) < wy) {
            x = box.hi[0], y = box.lo[1] + s;
        } else if ((s -= wy) < wx) {
            x = box.hi[0] - s, y = box.hi[1];
        } else {
            s -= wx;
            x = box.lo[0], y = box.hi[1] - s;
        }
        out.coords(0, i) = x;
        out.coords(1, i) = y;
    }
    return out;
}

PointSet boundary_circle(std::size_t n, CircleMode mode, std::uint64_t seed) {
    if (n == 0) throw ValidationError("boundary_circle: n must be at least 1");
    PointSet out;
    out.coords.resize(2, static_cast<Eigen::Index>(n));
    std::mt19937_64 rng(seed);
    if (mode == CircleMode::Random) out.seed = seed;
    for (Eigen::Index i = 0; i < out.coords.cols(); ++i) {
        const double t = mode == CircleMode::Equispaced ? static_cast<double>(i) / static_cast<double>(n) : unit_draw(rng);
        const double angle = 2.0 * std::numbers::pi * t;
        out.coords(0, i) = std::cos(angle);
        out.coords(1, i) = std::sin(angle);
    }
    return out;
}

}  // namespace glpinn::domains
