#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "glpinn/error.hpp"
#include "glpinn/lowdisc.hpp"
#include "oracles.hpp"

using namespace glpinn;
using namespace glpinn::lowdisc;

namespace {

PointSet from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    PointSet ps;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows.begin()->size());
    ps.coords.resize(d, n);
    Eigen::Index i = 0;
    for (auto r : rows) {
        Eigen::Index k = 0;
        for (double v : r) ps.coords(k++, i) = v;
        ++i;
    }
    return ps;
}

PointSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointSet ps;
    ps.coords.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < ps.coords.size(); ++i) ps.coords.data()[i] = u(rng);
    return ps;
}

void check_points(const PointSet& ps, std::initializer_list<std::initializer_list<double>> expected) {
    auto ref = from_rows(expected);
    REQUIRE(ps.coords.rows() == ref.coords.rows());
    REQUIRE(ps.coords.cols() == ref.coords.cols());
    for (Eigen::Index i = 0; i < ref.coords.size(); ++i) CHECK(ps.coords.data()[i] == ref.coords.data()[i]);
}

}  // namespace

TEST_CASE("lattice_points matches hand-evaluated lattices") {
    check_points(lattice_points({5, {1, 2}}), {{0.1, 0.3}, {0.3, 0.7}, {0.5, 0.1}, {0.7, 0.5}, {0.9, 0.9}});
    check_points(lattice_points({1, {1}}), {{0.5}});
    // i = 8 gives residue 0 in both coordinates, which maps to q = n.
    check_points(lattice_points({8, {1, 5}}), {{0.0625, 0.5625},
                                               {0.1875, 0.1875},
                                               {0.3125, 0.8125},
                                               {0.4375, 0.4375},
                                               {0.5625, 0.0625},
                                               {0.6875, 0.6875},
                                               {0.8125, 0.3125},
                                               {0.9375, 0.9375}});
    CHECK(lattice_points({5, {1, 2}}).provenance == Sampler::GLP);
}

TEST_CASE("lattice_points rejects invalid generating vectors") {
    CHECK_THROWS_WITH_AS(lattice_points({5, {1, 1}}), doctest::Contains("distinct"), ValidationError);
    CHECK_THROWS_WITH_AS(lattice_points({6, {1, 2}}), doctest::Contains("gcd"), ValidationError);
    CHECK_THROWS_WITH_AS(lattice_points({3, {1, 2, 4}}), doctest::Contains("d < n"), ValidationError);
    CHECK_THROWS_AS(lattice_points({5, {1, 7}}), ValidationError);
}

TEST_CASE("lattice projections are midpoint sets") {
    for (GeneratingVector gv : {GeneratingVector{89, {1, 55}}, GeneratingVector{101, {1, 40, 85}},
                                GeneratingVector{64, {1, 7, 49}}}) {
        auto ps = lattice_points(gv);
        const double n = static_cast<double>(gv.n);
        for (Eigen::Index k = 0; k < ps.coords.rows(); ++k) {
            std::vector<double> proj(ps.coords.row(k).begin(), ps.coords.row(k).end());
            std::sort(proj.begin(), proj.end());
            for (std::size_t i = 0; i < proj.size(); ++i) {
                CHECK(proj[i] == (2.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * n));
                // Odd multiple of 1/(2n), inside [1/(2n), 1 - 1/(2n)].
                const double scaled = proj[i] * 2.0 * n;
                CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
                CHECK(std::llround(scaled) % 2 == 1);
            }
        }
    }
}

TEST_CASE("fibonacci_gv") {
    CHECK(fibonacci_gv(10946) == GeneratingVector{10946, {1, 6765}});
    CHECK(fibonacci_gv(5) == GeneratingVector{5, {1, 3}});
    CHECK(fibonacci_gv(3) == GeneratingVector{3, {1, 2}});
    CHECK_THROWS_AS(fibonacci_gv(2), ValidationError);
    CHECK_THROWS_AS(fibonacci_gv(100), ValidationError);
    CHECK(is_fibonacci(987));
    CHECK_FALSE(is_fibonacci(1000));
}

TEST_CASE("p2_merit closed forms and symmetries") {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(p2_merit({1, {1}}) == doctest::Approx(pi2 / 3.0).epsilon(1e-14));
    CHECK(p2_merit({2, {1}}) == doctest::Approx(pi2 / 12.0).epsilon(1e-14));

    const GeneratingVector gv{101, {1, 40, 85}};
    const double base = p2_merit(gv);
    CHECK(p2_merit({101, {85, 1, 40}}) == doctest::Approx(base).epsilon(1e-13));
    CHECK(p2_merit({101, {1, 101 - 40, 85}}) == doctest::Approx(base).epsilon(1e-13));
    CHECK(p2_merit({101, {100, 61, 16}}) == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("p2_merit agrees with a direct Bernoulli-sum oracle") {
    for (GeneratingVector gv : {GeneratingVector{7, {1, 3}}, GeneratingVector{55, {1, 34}},
                                GeneratingVector{31, {1, 3, 9, 27}}}) {
        CHECK(p2_merit(gv) == doctest::Approx(oracle::p2_direct(gv.n, gv.h)).epsilon(1e-12));
    }
}

TEST_CASE("korobov_search picks the exhaustive minimizer") {
    // n = 7, d = 2: all units a in {2..6}.
    double best = 1e300;
    std::int64_t best_a = 0;
    for (std::int64_t a = 2; a <= 6; ++a) {
        const double m = oracle::p2_direct(7, {1, a});
        if (m < best - 1e-12) {
            best = m;
            best_a = a;
        }
    }
    CHECK(korobov_search(7, 2, false) == GeneratingVector{7, {1, best_a}});

    // Restricted to the primitive roots of 7, which are {3, 5}.
    CHECK(primitive_roots(7) == std::vector<std::int64_t>{3, 5});
    const double m3 = oracle::p2_direct(7, {1, 3});
    const double m5 = oracle::p2_direct(7, {1, 5});
    const std::int64_t expected = (m5 < m3 - 1e-12) ? 5 : 3;
    CHECK(korobov_search(7, 2, true) == GeneratingVector{7, {1, expected}});

    CHECK(korobov_search(2, 1, true) == GeneratingVector{2, {1}});
    CHECK_THROWS_AS(korobov_search(5, 5, false), ValidationError);
    CHECK_THROWS_AS(korobov_search(12, 2, true), ValidationError);
}

TEST_CASE("korobov_search in higher dimensions returns valid Korobov vectors") {
    auto gv = korobov_search(101, 4, true);
    CHECK_NOTHROW(gv.validate());
    const auto a = gv.h[1];
    CHECK(gv.h[0] == 1);
    CHECK(gv.h[2] == a * a % 101);
    CHECK(gv.h[3] == a * a % 101 * a % 101);
    // The result is at least as good as every primitive-root candidate.
    const double best = p2_merit(gv);
    for (auto r : primitive_roots(101)) {
        std::vector<std::int64_t> h{1, r, r * r % 101, r * r % 101 * r % 101};
        CHECK(best <= oracle::p2_direct(101, h) + 1e-12);
    }
}

TEST_CASE("primitive root admissibility") {
    for (std::int64_t n : {2, 4, 7, 9, 25, 14, 50, 3001, 10007}) CHECK(admits_primitive_roots(n));
    for (std::int64_t n : {8, 12, 15, 10946, 11215}) CHECK_FALSE(admits_primitive_roots(n));
}

TEST_CASE("star discrepancy: hand-derived values") {
    CHECK(star_discrepancy_exact(from_rows({{0.5}})) == doctest::Approx(0.5));
    CHECK(star_discrepancy_exact(from_rows({{0.1}, {0.3}, {0.5}, {0.7}, {0.9}})) == doctest::Approx(0.1));
    // gamma -> (0.5, 0.5) from above counts the point in a box of volume 1/4.
    CHECK(star_discrepancy_exact(from_rows({{0.5, 0.5}})) == doctest::Approx(0.75));
    CHECK_THROWS_AS(star_discrepancy_exact(from_rows({{0.5, 0.5, 0.5}})), UnsupportedError);
    CHECK_THROWS_AS(star_discrepancy_exact(PointSet{}), ValidationError);
}

TEST_CASE("star discrepancy of midpoint sets is 1/(2N)") {
    for (std::int64_t n = 1; n <= 64; ++n) {
        auto ps = lattice_points({n, {1}});
        CHECK(star_discrepancy_exact(ps) == doctest::Approx(1.0 / (2.0 * n)).epsilon(1e-12));
    }
}

TEST_CASE("star discrepancy agrees with the brute-force critical-box oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + trial % 2;
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 13);
        auto ps = random_set(rng, n, d);
        if (trial % 5 == 0) {
            // Repeated coordinates exercise the tie handling.
            ps.coords(0, 0) = ps.coords(0, static_cast<Eigen::Index>(n - 1));
        }
        CHECK(star_discrepancy_exact(ps) == doctest::Approx(oracle::star_brute_force(ps.coords)).epsilon(1e-13));
    }
}

TEST_CASE("warnock_l2 hand values") {
    CHECK(warnock_l2(from_rows({{0.5}})) == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-14));
    CHECK(warnock_l2(from_rows({{0.5, 0.5}})) ==
          doctest::Approx(std::sqrt(1.0 / 9.0 - 0.28125 + 0.25)).epsilon(1e-14));
    CHECK_THROWS_AS(warnock_l2(PointSet{}), ValidationError);
}

TEST_CASE("warnock_l2 squared matches box-wise integration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 10);
        auto ps = random_set(rng, n, d);
        const double w = warnock_l2(ps);
        const double integral = oracle::l2_star_integral(ps.coords);
        CHECK(w * w == doctest::Approx(integral).epsilon(1e-3));
    }
}

TEST_CASE("Fibonacci lattice beats uniform random on star discrepancy") {
    const double glp = star_discrepancy_exact(lattice_points(fibonacci_gv(987)));
    for (std::uint64_t seed = 100; seed < 110; ++seed)
        CHECK(glp < star_discrepancy_exact(baseline_sample(Sampler::UniformRandom, 987, 2, seed)));
}

TEST_CASE("baseline samplers") {
    auto halton = baseline_sample(Sampler::Halton, 3, 1, 0);
    CHECK(halton.coords(0, 0) == 0.5);
    CHECK(halton.coords(0, 1) == 0.25);
    CHECK(halton.coords(0, 2) == 0.75);

    auto hammersley = baseline_sample(Sampler::Hammersley, 4, 2, 0);
    for (int i = 0; i < 4; ++i) CHECK(hammersley.coords(0, i) == 0.25 * i);
    CHECK(hammersley.coords(1, 1) == 0.5);
    CHECK(hammersley.coords(1, 3) == 0.75);

    CHECK(radical_inverse(5, 3) == doctest::Approx(2.0 / 3.0 + 1.0 / 9.0));
    CHECK(first_primes(6) == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13});

    CHECK_THROWS_AS(baseline_sample(Sampler::Sobol, 8, 32, 0), UnsupportedError);
    CHECK_THROWS_AS(baseline_sample(Sampler::UniformRandom, 0, 2, 0), ValidationError);
}

TEST_CASE("Sobol sequence matches the Joe-Kuo reference points") {
    auto ps = baseline_sample(Sampler::Sobol, 4095, 16, 0);
    // Reference: unscrambled Joe-Kuo 6.21201 sequence in Gray-code order, index i
    // stored in column i - 1.
    const std::vector<double> p8{0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125, 0.4375, 0.9375,
                                 0.9375, 0.3125, 0.6875, 0.0625, 0.9375, 0.9375, 0.8125, 0.9375};
    const std::vector<double> p777{0.6923828125, 0.9365234375, 0.1630859375, 0.2744140625, 0.6357421875,
                                   0.3564453125, 0.1904296875, 0.7626953125, 0.3486328125, 0.3232421875,
                                   0.7451171875, 0.6962890625, 0.3837890625, 0.4736328125, 0.5693359375,
                                   0.5146484375};
    const std::vector<double> p4095{0.000244140625, 0.941162109375, 0.334228515625, 0.901611328125,
                                    0.940185546875, 0.078857421875, 0.949462890625, 0.390869140625,
                                    0.191650390625, 0.246337890625, 0.569580078125, 0.321533203125,
                                    0.368896484375, 0.519775390625, 0.551025390625, 0.416748046875};
    for (int k = 0; k < 16; ++k) {
        CHECK(ps.coords(k, 7) == p8[k]);
        CHECK(ps.coords(k, 776) == p777[k]);
        CHECK(ps.coords(k, 4094) == p4095[k]);
    }
}

TEST_CASE("samplers stay in the unit cube and are reproducible") {
    for (auto kind : {Sampler::UniformRandom, Sampler::LHS, Sampler::Halton, Sampler::Hammersley, Sampler::Sobol}) {
        auto a = baseline_sample(kind, 257, 5, 100);
        auto b = baseline_sample(kind, 257, 5, 100);
        CHECK(a.coords == b.coords);
        CHECK(a.coords.minCoeff() >= 0.0);
        CHECK(a.coords.maxCoeff() <= 1.0);
        CHECK(a.provenance == kind);
    }
    CHECK(baseline_sample(Sampler::UniformRandom, 10, 2, 100).coords !=
          baseline_sample(Sampler::UniformRandom, 10, 2, 101).coords);
}

TEST_CASE("LHS puts exactly one point in each axis stratum") {
    auto ps = baseline_sample(Sampler::LHS, 50, 3, 9);
    for (Eigen::Index k = 0; k < 3; ++k) {
        std::vector<int> hits(50, 0);
        for (Eigen::Index i = 0; i < 50; ++i) ++hits[static_cast<std::size_t>(ps.coords(k, i) * 50.0)];
        for (int h : hits) CHECK(h == 1);
    }
}

TEST_CASE("vector cache round trip and GLP resolution") {
    const auto path = std::filesystem::temp_directory_path() / "glpinn_cache_test.txt";
    VectorCache cache;
    cache.put({101, {1, 40, 85}});
    cache.put({7, {1, 3}});
    cache.put({101, {1, 12, 43}});
    cache.save(path);
    auto loaded = VectorCache::load(path);
    CHECK(loaded.entries().size() == 2);
    CHECK(*loaded.find(101, 3) == GeneratingVector{101, {1, 12, 43}});
    CHECK_FALSE(loaded.find(101, 2).has_value());
    std::filesystem::remove(path);

    CHECK(resolve_glp_vector(7, 2, loaded) == GeneratingVector{7, {1, 3}});
    CHECK(resolve_glp_vector(987, 2, loaded) == fibonacci_gv(987));
    CHECK(resolve_glp_vector(50, 1, loaded) == GeneratingVector{50, {1}});
    CHECK_THROWS_AS(resolve_glp_vector(1000, 2, loaded), ValidationError);
}

TEST_CASE("point CSV format") {
    std::ostringstream os;
    write_csv(os, lattice_points({5, {1, 2}}));
    CHECK(os.str().rfind("x1,x2\n0.10000000000000001,0.29999999999999999\n", 0) == 0);

    const auto path = std::filesystem::temp_directory_path() / "glpinn_points_test.csv";
    auto ps = baseline_sample(Sampler::UniformRandom, 13, 3, 5);
    write_csv(path, ps);
    auto back = read_csv(path);
    CHECK(back.coords == ps.coords);
    std::filesystem::remove(path);
}
