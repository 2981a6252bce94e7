#include <algorithm>
#include <cmath>
#include <vector>

#include "glpinn/error.hpp"
#include "glpinn/lowdisc.hpp"

namespace glpinn::lowdisc {

namespace {

// Critical coordinates of one axis: the distinct point coordinates plus 1.
std::vector<double> axis_grid(const Eigen::RowVectorXd& values) {
    std::vector<double> grid(values.data(), values.data() + values.size());
    grid.push_back(1.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    while (!grid.empty() && grid.back() > 1.0) grid.pop_back();
    return grid;
}

std::size_t grid_index(const std::vector<double>& grid, double v) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
}

double star_1d(const PointSet& ps) {
    const auto n = ps.size();
    const auto grid = axis_grid(ps.coords.row(0));
    std::vector<std::size_t> at(grid.size(), 0);
    for (std::size_t i = 0; i < n; ++i) ++at[grid_index(grid, ps.coords(0, static_cast<Eigen::Index>(i)))];

    const double inv_n = 1.0 / static_cast<double>(n);
    double worst = 0.0;
    std::size_t below = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double gamma = grid[g];
        // Open box [0, gamma): points strictly below.
        worst = std::max(worst, gamma - static_cast<double>(below) * inv_n);
        // Closed limit gamma -> g^+, only meaningful inside the cube.
        const std::size_t closed = below + (gamma < 1.0 ? at[g] : 0);
        worst = std::max(worst, static_cast<double>(closed) * inv_n - gamma);
        below += at[g];
    }
    return worst;
}

double star_2d(const PointSet& ps) {
    const auto n = ps.size();
    const auto gx = axis_grid(ps.coords.row(0));
    const auto gy = axis_grid(ps.coords.row(1));

    std::vector<std::pair<std::size_t, std::size_t>> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        ranks[i] = {grid_index(gx, ps.coords(0, c)), grid_index(gy, ps.coords(1, c))};
    }
    std::sort(ranks.begin(), ranks.end());

    const double inv_n = 1.0 / static_cast<double>(n);
    // counts_lt[j]: points with x < gamma_x and y-rank j; counts_le adds x == gamma_x.
    std::vector<std::size_t> counts_lt(gy.size(), 0), counts_le(gy.size(), 0);
    std::size_t cursor = 0;
    double worst = 0.0;
    for (std::size_t a = 0; a < gx.size(); ++a) {
        const double gamma_x = gx[a];
        counts_le = counts_lt;
        std::size_t next = cursor;
        while (next < n && ranks[next].first == a) {
            ++counts_le[ranks[next].second];
            ++next;
        }
        const bool closed_x = gamma_x < 1.0;
        const auto& closed_counts = closed_x ? counts_le : counts_lt;

        std::size_t open_cum = 0, closed_cum = 0;
        for (std::size_t b = 0; b < gy.size(); ++b) {
            const double gamma_y = gy[b];
            const double volume = gamma_x * gamma_y;
            // open_cum counts y-ranks < b, i.e. y < gamma_y.
            worst = std::max(worst, volume - static_cast<double>(open_cum) * inv_n);
            const std::size_t closed = closed_cum + (gamma_y < 1.0 ? closed_counts[b] : 0);
            worst = std::max(worst, static_cast<double>(closed) * inv_n - volume);
            open_cum += counts_lt[b];
            closed_cum += closed_counts[b];
        }
        counts_lt = counts_le;
        cursor = next;
    }
    return worst;
}

}  // namespace

double star_discrepancy_exact(const PointSet& ps) {
    if (ps.size() == 0) throw ValidationError("star discrepancy of an empty point set");
    switch (ps.dim()) {
        case 1:
            return star_1d(ps);
        case 2:
            return star_2d(ps);
        default:
            throw UnsupportedError("exact star discrepancy is only implemented for d <= 2 (got d=" +
                                   std::to_string(ps.dim()) + "); use the L2-star discrepancy");
    }
}

double warnock_l2(const PointSet& ps) {
    const auto n = static_cast<Eigen::Index>(ps.size());
    if (n == 0) throw ValidationError("L2-star discrepancy of an empty point set");
    const auto d = static_cast<Eigen::Index>(ps.dim());
    const auto& x = ps.coords;

    double single = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double prod = 1.0;
        for (Eigen::Index k = 0; k < d; ++k) prod *= 1.0 - x(k, i) * x(k, i);
        single += prod;
    }

    double pair = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            double prod = 1.0;
            for (Eigen::Index k = 0; k < d; ++k) prod *= 1.0 - std::max(x(k, i), x(k, j));
            row += prod;
        }
        pair += row;
    }

    const double nd = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    const double sq = std::pow(3.0, -dd) - std::pow(2.0, 1.0 - dd) / nd * single + pair / (nd * nd);
    return std::sqrt(std::max(sq, 0.0));
}

DiscrepancyReport discrepancy_report(const PointSet& ps, const std::optional<GeneratingVector>& gv) {
    DiscrepancyReport r;
    if (ps.dim() <= 2) r.star = star_discrepancy_exact(ps);
    r.l2_star = warnock_l2(ps);
    if (gv) r.p2 = p2_merit(*gv);
    return r;
}

}  // namespace glpinn::lowdisc
