#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <random>

#include "glpinn/error.hpp"
#include "glpinn/lowdisc.hpp"

namespace glpinn::lowdisc {

namespace {

// Joe & Kuo (2008) direction numbers, file new-joe-kuo-6.21201, dimensions 2..16.
// Dimension 1 uses m_k = 1 throughout.
struct SobolPoly {
    unsigned degree;
    unsigned coeffs;
    std::array<std::uint32_t, 8> m;
};

constexpr std::array<SobolPoly, kSobolMaxDim - 1> kSobolTable{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

constexpr unsigned kSobolBits = 32;

std::array<std::uint32_t, kSobolBits> sobol_directions(std::size_t dim) {
    std::array<std::uint32_t, kSobolBits> v{};
    if (dim == 0) {
        for (unsigned k = 0; k < kSobolBits; ++k) v[k] = std::uint32_t{1} << (kSobolBits - 1 - k);
        return v;
    }
    const auto& poly = kSobolTable[dim - 1];
    const unsigned s = poly.degree;
    std::array<std::uint32_t, kSobolBits> m{};
    for (unsigned k = 0; k < s; ++k) m[k] = poly.m[k];
    for (unsigned k = s; k < kSobolBits; ++k) {
        std::uint32_t mk = m[k - s] ^ (m[k - s] << s);
        for (unsigned j = 1; j < s; ++j) {
            if ((poly.coeffs >> (s - 1 - j)) & 1u) mk ^= m[k - j] << j;
        }
        m[k] = mk;
    }
    for (unsigned k = 0; k < kSobolBits; ++k) v[k] = m[k] << (kSobolBits - 1 - k);
    return v;
}

double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

PointSet make(Sampler kind, std::size_t n, std::size_t d, std::optional<std::uint64_t> seed) {
    PointSet ps;
    ps.provenance = kind;
    ps.seed = seed;
    ps.coords.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    return ps;
}

}  // namespace

std::vector<std::uint32_t> first_primes(std::size_t d) {
    std::vector<std::uint32_t> primes;
    for (std::uint32_t c = 2; primes.size() < d; ++c) {
        bool prime = true;
        for (auto p : primes) {
            if (p * p > c) break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
    const double inv_base = 1.0 / base;
    double factor = inv_base;
    double result = 0.0;
    while (index > 0) {
        result += static_cast<double>(index % base) * factor;
        index /= base;
        factor *= inv_base;
    }
    return result;
}

PointSet baseline_sample(Sampler kind, std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0) throw ValidationError("sampler: n must be at least 1");
    if (d == 0) throw ValidationError("sampler: dimension must be at least 1");
    const auto N = static_cast<Eigen::Index>(n);
    const auto D = static_cast<Eigen::Index>(d);

    switch (kind) {
        case Sampler::GLP:
            throw ValidationError("baseline_sample: GLP sets come from lattice_points");

        case Sampler::UniformRandom: {
            auto ps = make(kind, n, d, seed);
            std::mt19937_64 rng(seed);
            for (Eigen::Index i = 0; i < N; ++i)
                for (Eigen::Index k = 0; k < D; ++k) ps.coords(k, i) = to_unit(rng());
            return ps;
        }

        case Sampler::LHS: {
            auto ps = make(kind, n, d, seed);
            std::mt19937_64 rng(seed);
            std::vector<std::size_t> perm(n);
            const double inv_n = 1.0 / static_cast<double>(n);
            for (Eigen::Index k = 0; k < D; ++k) {
                std::iota(perm.begin(), perm.end(), std::size_t{0});
                std::shuffle(perm.begin(), perm.end(), rng);
                for (Eigen::Index i = 0; i < N; ++i)
                    ps.coords(k, i) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + to_unit(rng())) * inv_n;
            }
            return ps;
        }

        case Sampler::Halton: {
            auto ps = make(kind, n, d, std::nullopt);
            const auto bases = first_primes(d);
            for (Eigen::Index i = 0; i < N; ++i)
                for (Eigen::Index k = 0; k < D; ++k)
                    ps.coords(k, i) = radical_inverse(static_cast<std::uint64_t>(i) + 1, bases[static_cast<std::size_t>(k)]);
            return ps;
        }

        case Sampler::Hammersley: {
            auto ps = make(kind, n, d, std::nullopt);
            const auto bases = first_primes(d > 1 ? d - 1 : 0);
            const double inv_n = 1.0 / static_cast<double>(n);
            for (Eigen::Index i = 0; i < N; ++i) {
                ps.coords(0, i) = static_cast<double>(i) * inv_n;
                for (Eigen::Index k = 1; k < D; ++k)
                    ps.coords(k, i) = radical_inverse(static_cast<std::uint64_t>(i), bases[static_cast<std::size_t>(k - 1)]);
            }
            return ps;
        }

        case Sampler::Sobol: {
            if (d > kSobolMaxDim)
                throw UnsupportedError("Sobol sampler supports d <= " + std::to_string(kSobolMaxDim) +
                                       " (got d=" + std::to_string(d) + ")");
            if (n >= (std::size_t{1} << kSobolBits)) throw UnsupportedError("Sobol sampler: n must be < 2^32");
            auto ps = make(kind, n, d, std::nullopt);
            std::vector<std::array<std::uint32_t, kSobolBits>> dirs;
            for (std::size_t k = 0; k < d; ++k) dirs.push_back(sobol_directions(k));
            std::vector<std::uint32_t> state(d, 0);
            // Gray-code order; index 0 (the origin) is skipped.
            for (std::uint64_t i = 0; i < n; ++i) {
                const auto c = static_cast<unsigned>(std::countr_one(i));
                for (std::size_t k = 0; k < d; ++k) state[k] ^= dirs[k][c];
                for (std::size_t k = 0; k < d; ++k)
                    ps.coords(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                        static_cast<double>(state[k]) * 0x1.0p-32;
            }
            return ps;
        }
    }
    throw ValidationError("baseline_sample: unknown sampler");
}

PointSet sample(Sampler kind, std::size_t n, std::size_t d, std::uint64_t seed, const VectorCache& cache) {
    if (kind == Sampler::GLP) return lattice_points(resolve_glp_vector(static_cast<std::int64_t>(n), d, cache));
    return baseline_sample(kind, n, d, seed);
}

}  // namespace glpinn::lowdisc
