#include "glpinn/lowdisc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "glpinn/error.hpp"

namespace glpinn::lowdisc {

namespace {

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t n) {
    return static_cast<std::int64_t>(static_cast<__int128>(a) * b % n);
}

std::int64_t powmod(std::int64_t base, std::int64_t exp, std::int64_t n) {
    std::int64_t result = 1 % n;
    base %= n;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, n);
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    return result;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::int64_t euler_phi(std::int64_t n) {
    std::int64_t phi = n;
    for (auto p : prime_factors(n)) phi -= phi / p;
    return phi;
}

double bernoulli2(double t) { return t * t - t + 1.0 / 6.0; }

}  // namespace

void GeneratingVector::validate() const {
    if (n < 1) throw ValidationError("generating vector: n must be positive");
    if (h.empty()) throw ValidationError("generating vector: h must be non-empty");
    if (static_cast<std::int64_t>(h.size()) >= n && n > 1)
        throw ValidationError("generating vector: d < n violated (d=" + std::to_string(h.size()) +
                              ", n=" + std::to_string(n) + ")");
    std::set<std::int64_t> seen;
    for (auto hj : h) {
        // n = 1 admits only the degenerate vector (1; 1).
        if (n == 1 ? hj != 1 : (hj < 1 || hj >= n))
            throw ValidationError("generating vector: 1 <= h_j < n violated (h_j=" + std::to_string(hj) + ")");
        if (std::gcd(hj, n) != 1)
            throw ValidationError("generating vector: gcd(h_j, n) = 1 violated (h_j=" + std::to_string(hj) + ")");
        if (!seen.insert(hj).second)
            throw ValidationError("generating vector: multipliers must be distinct (h_j=" + std::to_string(hj) +
                                  " repeated)");
    }
    if (n > (std::int64_t{1} << 62) / n)
        throw ValidationError("generating vector: n too large for 64-bit modular arithmetic");
}

PointSet lattice_points(const GeneratingVector& gv) {
    gv.validate();
    const auto d = static_cast<Eigen::Index>(gv.dim());
    const auto n = gv.n;
    PointSet ps;
    ps.provenance = Sampler::GLP;
    ps.coords.resize(d, n);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::int64_t i = 1; i <= n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            std::int64_t q = mulmod(i, gv.h[static_cast<std::size_t>(j)], n);
            if (q == 0) q = n;
            ps.coords(j, i - 1) = static_cast<double>(2 * q - 1) / denom;
        }
    }
    return ps;
}

bool is_fibonacci(std::int64_t n) {
    std::int64_t a = 1, b = 1;
    while (b < n) {
        std::int64_t c = a + b;
        a = b;
        b = c;
    }
    return b == n;
}

GeneratingVector fibonacci_gv(std::int64_t n) {
    // F_1 = F_2 = 1, F_3 = 2, F_4 = 3, ...
    std::int64_t prev = 1, cur = 2;
    int k = 3;
    while (cur < n) {
        std::int64_t next = prev + cur;
        prev = cur;
        cur = next;
        ++k;
    }
    if (cur != n || n < 2) throw ValidationError("fibonacci_gv: " + std::to_string(n) + " is not a Fibonacci number");
    if (k < 4)
        throw ValidationError("fibonacci_gv: n = F_" + std::to_string(k) +
                              " yields h = (1, 1); multipliers must be distinct (need k >= 4)");
    GeneratingVector gv{n, {1, prev}};
    gv.validate();
    return gv;
}

double p2_merit(const GeneratingVector& gv) {
    gv.validate();
    const double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;
    const double inv_n = 1.0 / static_cast<double>(gv.n);
    double sum = 0.0;
    for (std::int64_t i = 0; i < gv.n; ++i) {
        double prod = 1.0;
        for (auto hk : gv.h) {
            const double t = static_cast<double>(mulmod(i, hk, gv.n)) * inv_n;
            prod *= 1.0 + two_pi_sq * bernoulli2(t);
        }
        sum += prod;
    }
    return -1.0 + sum * inv_n;
}

bool admits_primitive_roots(std::int64_t n) {
    if (n == 2 || n == 4) return true;
    if (n < 2) return false;
    std::int64_t m = (n % 2 == 0) ? n / 2 : n;
    if (m % 2 == 0) return false;
    auto factors = prime_factors(m);
    return factors.size() == 1;
}

std::vector<std::int64_t> primitive_roots(std::int64_t n) {
    if (!admits_primitive_roots(n))
        throw ValidationError("n = " + std::to_string(n) + " has no primitive roots (need 2, 4, p^l or 2p^l)");
    const std::int64_t phi = euler_phi(n);
    const auto phi_factors = prime_factors(phi);
    std::vector<std::int64_t> roots;
    for (std::int64_t a = 1; a < n; ++a) {
        if (std::gcd(a, n) != 1) continue;
        bool primitive = true;
        for (auto p : phi_factors) {
            if (powmod(a, phi / p, n) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) roots.push_back(a);
    }
    return roots;
}

GeneratingVector korobov_search(std::int64_t n, std::size_t d, bool restrict_primitive_roots) {
    if (d == 0) throw ValidationError("korobov_search: d must be positive");
    if (static_cast<std::int64_t>(d) >= n)
        throw ValidationError("korobov_search: d < n violated (d=" + std::to_string(d) + ", n=" + std::to_string(n) +
                              ")");
    if (d == 1) {
        GeneratingVector gv{n, {1}};
        gv.validate();
        return gv;
    }

    std::vector<std::int64_t> candidates;
    if (restrict_primitive_roots) {
        candidates = primitive_roots(n);
    } else {
        for (std::int64_t a = 2; a < n; ++a)
            if (std::gcd(a, n) == 1) candidates.push_back(a);
    }

    std::optional<GeneratingVector> best;
    double best_merit = 0.0;
    for (auto a : candidates) {
        if (a < 2) continue;
        GeneratingVector gv{n, {}};
        gv.h.reserve(d);
        std::int64_t power = 1;
        for (std::size_t j = 0; j < d; ++j) {
            gv.h.push_back(power);
            power = mulmod(power, a, n);
        }
        try {
            gv.validate();
        } catch (const ValidationError&) {
            continue;
        }
        const double merit = p2_merit(gv);
        // Merits of a and n - a agree up to rounding; keep the smaller a on such ties.
        const double tol = 1e-12 * std::max(std::abs(best_merit), 1e-300);
        if (!best || merit < best_merit - tol) {
            best = std::move(gv);
            best_merit = merit;
        }
    }
    if (!best)
        throw ValidationError("korobov_search: no admissible candidate for n=" + std::to_string(n) +
                              ", d=" + std::to_string(d));
    return *best;
}

GeneratingVector resolve_glp_vector(std::int64_t n, std::size_t d, const VectorCache& cache) {
    if (d == 1) {
        GeneratingVector gv{n, {1}};
        gv.validate();
        return gv;
    }
    if (auto cached = cache.find(n, d)) {
        cached->validate();
        return *cached;
    }
    if (d == 2 && is_fibonacci(n)) return fibonacci_gv(n);
    std::ostringstream msg;
    msg << "no generating vector for GLP with n=" << n << ", d=" << d
        << " (not a Fibonacci lattice and not in the vector cache; run `search` first)";
    throw ValidationError(msg.str());
}

}  // namespace glpinn::lowdisc
