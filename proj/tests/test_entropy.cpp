#include "doctest.h"

#include "smlab/entropy.hpp"

#include <cmath>
#include <random>

using namespace smlab;

namespace {

ProductDist fair_bits(int n) {
    ProductDist d;
    for (int j = 0; j < n; ++j) d.factors.push_back(FiniteDist::uniform(2));
    return d;
}

std::vector<double> random_table(std::size_t n, std::mt19937_64& rng, double lo = 0,
                                 double hi = 3) {
    std::vector<double> f(n);
    std::uniform_real_distribution<double> u(lo, hi);
    for (auto& v : f) v = u(rng);
    return f;
}

} // namespace

TEST_CASE("entropy basics") {
    FiniteDist u2 = FiniteDist::uniform(2);
    CHECK(ent({5.0, 5.0}, u2) == doctest::Approx(0.0));
    CHECK(ent({2.0, 0.0}, u2) == doctest::Approx(std::log(2.0)));
    CHECK(ent({0.0, 0.0}, u2) == 0.0);
    CHECK_THROWS(ent({-1.0, 1.0}, u2));
}

TEST_CASE("entropy is nonnegative and degree-1 homogeneous") {
    std::mt19937_64 rng(211);
    FiniteDist mu(std::vector<Rat>{Rat(1, 6), Rat(1, 3), Rat(1, 4), Rat(1, 4)});
    for (int it = 0; it < 10000; ++it) {
        auto f = random_table(4, rng);
        double e = ent(f, mu);
        CHECK(e >= -kEntropySlackTol);
        double c = 0.1 + 3 * (it % 7);
        std::vector<double> cf = f;
        for (auto& v : cf) v *= c;
        CHECK(ent(cf, mu) == doctest::Approx(c * e).epsilon(1e-9));
    }
}

TEST_CASE("shearer single-block cover is an identity") {
    ProductDist d = fair_bits(3);
    GroundSet g(3);
    Cover whole({AtomSet::full_set(g)});
    std::mt19937_64 rng(223);
    auto f = random_table(8, rng);
    auto rep = shearer_check(f, d, whole, 1);
    CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(1e-12));

    std::vector<double> ones(8, 1.0);
    auto rep1 = shearer_check(ones, d, whole, 1);
    CHECK(rep1.lhs == doctest::Approx(0.0));
    CHECK(rep1.rhs == doctest::Approx(0.0));
}

TEST_CASE("shearer bound over the two-subset cover") {
    GroundSet g(3);
    Cover cyc({AtomSet(g, {0, 1}), AtomSet(g, {1, 2}), AtomSet(g, {0, 2})});
    std::mt19937_64 rng(227);
    for (int it = 0; it < 200; ++it) {
        ProductDist d;
        for (int j = 0; j < 3; ++j) {
            double a = 0.05 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng);
            d.factors.push_back(FiniteDist(std::vector<Rat>{Rat(Int(a * 1000), 1000),
                                                            Rat(Int(1000 - a * 1000), 1000)}));
        }
        auto f = random_table(8, rng);
        auto rep = shearer_check(f, d, cyc, 2);
        CHECK(rep.ok());
    }
}

TEST_CASE("shearer bound over every uniform cover of a 4-set") {
    GroundSet g(4);
    // enumerate all collections of distinct nonempty subsets with equal hit counts
    std::vector<Cover> covers;
    for (std::uint32_t mask = 1; mask < (1u << 15); ++mask) {
        std::vector<AtomSet> sets;
        int hits[4] = {0, 0, 0, 0};
        for (int i = 0; i < 15; ++i) {
            if (!((mask >> i) & 1)) continue;
            std::uint64_t bits = (std::uint64_t)(i + 1);
            sets.emplace_back(g, bits);
            for (int a = 0; a < 4; ++a) hits[a] += (bits >> a) & 1;
        }
        if (hits[0] >= 1 && hits[0] == hits[1] && hits[1] == hits[2] && hits[2] == hits[3])
            covers.emplace_back(std::move(sets));
    }
    CHECK(covers.size() == 879);
    std::mt19937_64 rng(313);
    double min_slack = 0;
    for (const auto& cover : covers) {
        int k = covering_multiplicity(cover);
        REQUIRE(is_uniform(cover));
        for (int it = 0; it < 100; ++it) {
            ProductDist d;
            for (int j = 0; j < 4; ++j) {
                long a = 1 + (long)(rng() % 9), b = 1 + (long)(rng() % 9);
                d.factors.push_back(FiniteDist(std::vector<Rat>{Rat(a), Rat(b)}));
            }
            auto f = random_table(16, rng);
            auto rep = shearer_check(f, d, cover, k);
            min_slack = std::min(min_slack, rep.slack());
        }
    }
    CHECK(min_slack >= -1e-9);
}

TEST_CASE("shearer rejects non-uniform covers") {
    GroundSet g(3);
    ProductDist d = fair_bits(3);
    Cover lopsided({AtomSet(g, {0, 1}), AtomSet(g, {1, 2})});
    std::vector<double> f(8, 1.0);
    CHECK_THROWS(shearer_check(f, d, lopsided, 1));
}

TEST_CASE("ledoux bound") {
    FiniteDist u2 = FiniteDist::uniform(2);
    auto flat = ledoux_check({0.7, 0.7}, u2);
    CHECK(flat.lhs == doctest::Approx(0.0));
    CHECK(flat.rhs == doctest::Approx(0.0));

    // two-point closed form: f = (0, 1)
    auto two = ledoux_check({0.0, 1.0}, u2);
    double m = (1 + std::exp(1.0)) / 2;
    double lhs = 0.5 * std::exp(1.0) - m * std::log(m);
    CHECK(two.lhs == doctest::Approx(lhs));
    CHECK(two.rhs == doctest::Approx(std::exp(1.0) / 4));
    CHECK(two.ok());

    std::mt19937_64 rng(229);
    for (int it = 0; it < 10000; ++it) {
        int n = 2 + (int)(rng() % 15);
        std::vector<Rat> masses;
        for (int i = 0; i < n; ++i) masses.emplace_back(1 + (int)(rng() % 9));
        FiniteDist mu(masses);
        auto f = random_table(n, rng, -2, 2);
        CHECK(ledoux_check(f, mu).ok());
    }
}

TEST_CASE("tail bound closed forms and scalings") {
    auto b = tail_bound(1, {1.0}, 2.0);
    CHECK(b.lipschitz_tail == doctest::Approx(std::exp(-1.0)));
    CHECK(b.alpha_bound == doctest::Approx(std::exp(-0.5)));

    auto b2 = tail_bound(2, {1.0}, 2.0);
    CHECK(b2.lipschitz_tail == doctest::Approx(b.lipschitz_tail * b.lipschitz_tail));

    std::vector<double> w{0.3, 0.4};
    std::vector<double> w2{0.6, 0.8};
    auto s1 = tail_bound(3, w, 0.7);
    auto s2 = tail_bound(3, w2, 1.4);
    CHECK(s1.lipschitz_tail == doctest::Approx(s2.lipschitz_tail));

    auto z = tail_bound(1, {0.0, 0.0}, 1.0);
    CHECK(z.trivial);
    CHECK(z.lipschitz_tail == 1.0);

    CHECK_THROWS(tail_bound(0, w, 1.0));
    CHECK_THROWS(tail_bound(1, w, 0.0));
}

TEST_CASE("herbst chain on a constant function") {
    ProductDist d = fair_bits(3);
    std::vector<double> f(8, 1.5);
    auto rep = herbst_chain_check(f, d, 0.5, {0.5, 1.0, 2.0}, {0.5, 1.0});
    CHECK_FALSE(rep.any_violation);
    CHECK(rep.jensen_ok);
    for (const auto& row : rep.rows) {
        CHECK(row.hypothesis);
        CHECK(row.conclusion);
        CHECK(row.mgf_centered == doctest::Approx(1.0));
    }
    for (const auto& t : rep.tails) CHECK(t.tail == 0.0);
}

TEST_CASE("herbst chain on the scaled coordinate sum") {
    // f = (1/n) sum of fair +-1/2 coordinates, D = 2|w|^2/k = 2/n
    const int n = 8;
    ProductDist d = fair_bits(n);
    std::vector<double> f(d.points());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto c = d.decode(i);
        double s = 0;
        for (int j = 0; j < n; ++j) s += c[j] ? 0.5 : -0.5;
        f[i] = s / n;
    }
    double D = 2.0 / n;
    std::vector<double> lambdas{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> rs{0.1, 0.25, 0.5};
    auto rep = herbst_chain_check(f, d, D, lambdas, rs);
    CHECK_FALSE(rep.any_violation);
    CHECK(rep.jensen_ok);
    for (const auto& row : rep.rows) CHECK(row.hypothesis);
    for (const auto& t : rep.tails) {
        CHECK(t.ok);
        // the exact binomial tail indeed sits below exp(-r^2/(2D))
        int threshold = 0;
        Rat exact = 0;
        for (int ones = 0; ones <= n; ++ones) {
            double val = (ones - n / 2.0) / n;
            if (val >= t.r) exact += Rat(binomial(n, ones), Int(1) << n);
        }
        (void)threshold;
        CHECK(to_double(exact) <= t.bound + 1e-12);
    }
}

TEST_CASE("herbst chain flags jensen sanity") {
    ProductDist d = fair_bits(2);
    std::vector<double> f{0.0, 1.0, 1.0, 2.0};
    auto rep = herbst_chain_check(f, d, 5.0, {0.5, 1.0}, {0.5});
    CHECK(rep.jensen_ok);
    for (const auto& row : rep.rows) CHECK(row.mgf_centered >= 1 - 1e-12);
}
