#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace glpinn::lowdisc {

enum class Sampler { GLP, UniformRandom, LHS, Halton, Hammersley, Sobol };

std::string_view to_string(Sampler s);
/// Accepts the CLI/config spellings: glp, uniform, lhs, halton, hammersley, sobol.
Sampler parse_sampler(std::string_view name);

/// Rank-1 lattice generator (N; h_1..h_d).
struct GeneratingVector {
    std::int64_t n = 0;
    std::vector<std::int64_t> h;

    std::size_t dim() const { return h.size(); }

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    bool operator==(const GeneratingVector&) const = default;
};

/// Ordered points in [0,1]^dim, stored column-wise (one column per point).
struct PointSet {
    Eigen::MatrixXd coords;  // dim x n
    Sampler provenance = Sampler::UniformRandom;
    std::optional<std::uint64_t> seed;

    std::size_t dim() const { return static_cast<std::size_t>(coords.rows()); }
    std::size_t size() const { return static_cast<std::size_t>(coords.cols()); }
    auto point(std::size_t i) const { return coords.col(static_cast<Eigen::Index>(i)); }
};

struct DiscrepancyReport {
    std::optional<double> star;
    double l2_star = 0.0;
    std::optional<double> p2;
};

// Lattice construction ------------------------------------------------------

PointSet lattice_points(const GeneratingVector& gv);

/// Fibonacci lattice (F_k; 1, F_{k-1}) for k >= 4.
GeneratingVector fibonacci_gv(std::int64_t n);
bool is_fibonacci(std::int64_t n);

/// Bernoulli-polynomial P_2 figure of merit of a lattice rule.
double p2_merit(const GeneratingVector& gv);

bool admits_primitive_roots(std::int64_t n);
/// Primitive roots modulo n in increasing order. Requires admits_primitive_roots(n).
std::vector<std::int64_t> primitive_roots(std::int64_t n);

/// Korobov-form search h = (1, a, a^2, ..., a^{d-1}) mod n minimizing P_2.
/// With restrict_primitive_roots the candidates are the primitive roots mod n,
/// otherwise every unit a in [2, n-1]. Ties go to the smallest a.
GeneratingVector korobov_search(std::int64_t n, std::size_t d, bool restrict_primitive_roots);

// Discrepancy ---------------------------------------------------------------

/// Exact star discrepancy by enumeration of critical boxes. d <= 2 only.
double star_discrepancy_exact(const PointSet& ps);

/// Warnock's closed form of the L2-star discrepancy (returns the root).
double warnock_l2(const PointSet& ps);

DiscrepancyReport discrepancy_report(const PointSet& ps, const std::optional<GeneratingVector>& gv = {});

// Baseline samplers ---------------------------------------------------------

inline constexpr std::size_t kSobolMaxDim = 16;

/// Deterministic in (kind, n, d, seed). kind must not be GLP.
PointSet baseline_sample(Sampler kind, std::size_t n, std::size_t d, std::uint64_t seed);

/// Radical inverse of index in the given base.
double radical_inverse(std::uint64_t index, std::uint32_t base);
/// First d primes.
std::vector<std::uint32_t> first_primes(std::size_t d);

// Vector cache --------------------------------------------------------------

/// Plain-text cache of generating vectors, one `n d h1 ... hd` per line.
/// Lines starting with '#' are comments.
class VectorCache {
public:
    VectorCache() = default;
    static VectorCache load(const std::filesystem::path& path);

    std::optional<GeneratingVector> find(std::int64_t n, std::size_t d) const;
    /// Replaces an existing entry with the same (n, d).
    void put(const GeneratingVector& gv);
    void save(const std::filesystem::path& path) const;

    const std::vector<GeneratingVector>& entries() const { return entries_; }

private:
    std::vector<GeneratingVector> entries_;
};

/// Generating vector used for a GLP set of n points in d dimensions:
/// d = 1 gives (n; 1), a cached entry wins next, then the Fibonacci lattice for
/// d = 2. Throws ValidationError when none applies.
GeneratingVector resolve_glp_vector(std::int64_t n, std::size_t d, const VectorCache& cache);

/// GLP or baseline point set, whichever `kind` asks for.
PointSet sample(Sampler kind, std::size_t n, std::size_t d, std::uint64_t seed, const VectorCache& cache);

// CSV -----------------------------------------------------------------------

void write_csv(std::ostream& os, const Eigen::MatrixXd& coords, const std::vector<std::string>& header);
void write_csv(std::ostream& os, const PointSet& ps);
void write_csv(const std::filesystem::path& path, const PointSet& ps);
/// Reads the `x1,...,xd` format back; provenance is left as UniformRandom.
PointSet read_csv(const std::filesystem::path& path);

}  // namespace glpinn::lowdisc
