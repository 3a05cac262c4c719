#include "doctest.h"

#include "smlab/conclab.hpp"

#include <random>

using namespace smlab;

namespace {

Scenario fair_bits_scenario(int n, long trials, std::uint64_t seed) {
    Scenario s;
    s.n = n;
    s.alphabet.assign((std::size_t)n, 2);
    for (int j = 0; j < n; ++j) s.dists.factors.push_back(FiniteDist::uniform(2));
    GroundSet g(n);
    s.cover = Cover(singleton_partition(g).blocks,
                    std::vector<RootSum>((std::size_t)n, RootSum(Rat(1, n))));
    s.f.kind = LipschitzSelector::Kind::coordinate_mean;
    s.trials = trials;
    s.seed = seed;
    return s;
}

// subset-enumeration oracle for the relatedness search
bool sim_related_enumerate(std::uint32_t x, std::uint32_t y, const TreeSpec& spec) {
    int k = spec.depth();
    // collect non-root nodes as (level, index)
    std::vector<std::pair<int, long long>> nodes;
    for (int i = 1; i <= k; ++i)
        for (long long idx = 0; idx < spec.nodes_at(i); ++idx) nodes.emplace_back(i, idx);
    long long nl = spec.leaves();
    for (std::uint64_t mask = 0; mask < (1ull << nodes.size()); ++mask) {
        auto in_s = [&](int level, long long idx) {
            for (std::size_t t = 0; t < nodes.size(); ++t)
                if ((mask >> t) & 1 && nodes[t] == std::make_pair(level, idx)) return true;
            return false;
        };
        // per-node budget clause
        bool ok = true;
        for (int i = 0; i < k && ok; ++i)
            for (long long idx = 0; idx < spec.nodes_at(i) && ok; ++idx) {
                int cnt = 0;
                for (int j = 0; j < spec.M[(std::size_t)i]; ++j)
                    cnt += in_s(i + 1, idx * spec.M[(std::size_t)i] + j);
                if (!((double)cnt < spec.d[(std::size_t)i])) ok = false;
            }
        if (!ok) continue;
        // coverage clause: every differing leaf owns a marked prefix
        bool covers = true;
        for (long long t = 0; t < nl && covers; ++t) {
            if (!(((x ^ y) >> t) & 1)) continue;
            bool found = false;
            long long idx = t;
            for (int i = k; i >= 1 && !found; --i) {
                if (in_s(i, idx)) found = true;
                idx /= spec.M[(std::size_t)i - 1];
            }
            covers = found;
        }
        if (covers) return true;
    }
    return false;
}

} // namespace

TEST_CASE("lipschitz certification") {
    Scenario s = fair_bits_scenario(4, 1000, 1);
    CHECK_FALSE(certify_lipschitz(s).has_value());

    Scenario bad = s;
    bad.cover.weights[0] = RootSum(Rat(1, 2));
    CHECK(certify_lipschitz(bad).has_value());

    Scenario dist = s;
    dist.f.kind = LipschitzSelector::Kind::dist_to_point;
    dist.f.anchor.assign(4, 0);
    CHECK_FALSE(certify_lipschitz(dist).has_value());

    Scenario ws = s;
    ws.f.kind = LipschitzSelector::Kind::weighted_sum;
    ws.f.u.assign(4, 0.25);
    CHECK_FALSE(certify_lipschitz(ws).has_value());
    ws.f.u[0] = 0.3; // exceeds the singleton weight 1/4
    CHECK(certify_lipschitz(ws).has_value());
}

TEST_CASE("mc_tail basics and determinism") {
    Scenario s = fair_bits_scenario(20, 2000, 99);
    s.r_grid = {0.1, 0.25, 2.0};
    auto r1 = mc_tail(s, 1);
    auto r4 = mc_tail(s, 4);
    CHECK(r1.mean == r4.mean);
    REQUIRE(r1.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r1.rows[i].count == r4.rows[i].count);
        CHECK(r1.rows[i].empirical <= 1.0);
    }
    // r beyond the diameter leaves an empty tail
    CHECK(r1.rows[2].count == 0);
    CHECK(r1.k == 1);
    CHECK(r1.mean == doctest::Approx(0.5).epsilon(0.05));

    CHECK_THROWS(mc_tail(fair_bits_scenario(4, 50, 1)));
}

TEST_CASE("mc_tail respects the theorem bound on fair bits") {
    Scenario s = fair_bits_scenario(50, 20000, 7);
    s.r_grid = {0.1, 0.2, 0.3};
    auto res = mc_tail(s, 2);
    for (const auto& row : res.rows) {
        // empirical tail within CI slack of the bound
        CHECK(row.empirical <= row.bound + 3 * (row.ci_hi - row.empirical) + 1e-9);
    }
}

TEST_CASE("mc_tail regression across the built-in selectors") {
    // every certified selector stays below bound + 3 * CI half-width
    std::vector<Scenario> suite;
    {
        Scenario s = fair_bits_scenario(30, 20000, 101);
        s.r_grid = {0.05, 0.15, 0.3};
        suite.push_back(s);
    }
    {
        Scenario s = fair_bits_scenario(16, 20000, 103);
        s.f.kind = LipschitzSelector::Kind::weighted_sum;
        s.f.u.assign(16, 1.0 / 32); // half of each singleton weight
        s.r_grid = {0.02, 0.1, 0.25};
        suite.push_back(s);
    }
    {
        Scenario s = fair_bits_scenario(12, 20000, 107);
        s.f.kind = LipschitzSelector::Kind::dist_to_point;
        s.f.anchor.assign(12, 0);
        s.r_grid = {0.1, 0.2, 0.4};
        suite.push_back(s);
    }
    {
        // non-singleton cover with the distance selector
        Scenario s;
        s.n = 8;
        s.alphabet.assign(8, 2);
        for (int j = 0; j < 8; ++j) s.dists.factors.push_back(FiniteDist::uniform(2));
        GroundSet g(8);
        s.cover = Cover({AtomSet(g, {0, 1, 2}), AtomSet(g, {3, 4, 5}), AtomSet(g, {6, 7}),
                         AtomSet(g, {1, 4, 7})},
                        {RootSum(Rat(1, 4)), RootSum(Rat(1, 4)), RootSum(Rat(1, 4)),
                         RootSum(Rat(1, 4))});
        s.f.kind = LipschitzSelector::Kind::dist_to_point;
        s.f.anchor.assign(8, 1);
        s.r_grid = {0.1, 0.3};
        s.trials = 20000;
        s.seed = 109;
        suite.push_back(s);
    }
    for (const auto& s : suite) {
        REQUIRE_FALSE(certify_lipschitz(s).has_value());
        auto res = mc_tail(s, 2);
        for (const auto& row : res.rows) {
            double ci_half = row.ci_hi - row.empirical;
            CHECK(row.empirical <= row.bound + 3 * ci_half + 1e-9);
        }
    }
}

TEST_CASE("constant selector gives empty tails") {
    Scenario s = fair_bits_scenario(6, 500, 3);
    s.f.kind = LipschitzSelector::Kind::weighted_sum;
    s.f.u.assign(6, 0.0); // certified, constant zero
    s.r_grid = {0.05, 0.5};
    auto res = mc_tail(s);
    for (const auto& row : res.rows) CHECK(row.count == 0);
}

TEST_CASE("alpha_exact on the 4-cube") {
    Scenario s = fair_bits_scenario(4, 1000, 1);
    auto a = alpha_exact(s, RootSum(Rat(1, 4)));
    CHECK(a.alpha == Rat(1, 2));
    CHECK(a.points == 16);

    // eps beyond the diameter swallows the space
    auto wide = alpha_exact(s, RootSum(Rat(2)));
    CHECK(wide.alpha == 0);

    // monotone non-increasing in eps
    Rat prev = 1;
    for (Rat eps : {Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)}) {
        auto r = alpha_exact(s, RootSum(eps));
        CHECK(r.alpha <= prev);
        prev = r.alpha;
    }
}

TEST_CASE("alpha_exact closed-form fixtures") {
    // two fair points at distance c: alpha = 1/2 up to eps = c, then 0
    FiniteMmSpace two;
    two.mass = {Rat(1, 2), Rat(1, 2)};
    two.dist = {{RootSum(), RootSum(Rat(1, 3))}, {RootSum(Rat(1, 3)), RootSum()}};
    CHECK(alpha_exact(two, RootSum(Rat(1, 3))).alpha == Rat(1, 2));
    CHECK(alpha_exact(two, RootSum(Rat(1, 2))).alpha == 0);

    // three points on a path 0-1-2 with masses (1/4, 1/4, 1/2), unit steps:
    // at eps = 1 the best half-mass set is {2} whose ball misses {0}
    FiniteMmSpace path;
    path.mass = {Rat(1, 4), Rat(1, 4), Rat(1, 2)};
    auto d = [](int a) { return RootSum(Rat(a)); };
    path.dist = {{d(0), d(1), d(2)}, {d(1), d(0), d(1)}, {d(2), d(1), d(0)}};
    auto a1 = alpha_exact(path, RootSum(Rat(3, 2)));
    CHECK(a1.alpha == Rat(1, 4));
    CHECK(a1.witness == 0b100u);
    CHECK(alpha_exact(path, RootSum(Rat(5, 2))).alpha == 0);
    // strictness of the ball: eps = 1 excludes points at distance exactly 1
    CHECK(alpha_exact(path, RootSum(Rat(1))).alpha == Rat(1, 2));
}

TEST_CASE("alpha_exact on a biased cube with a two-tier cover") {
    // expected values derived by independent subset enumeration over all
    // half-mass sets, with distances recomputed by brute force
    Scenario s;
    s.n = 3;
    s.alphabet.assign(3, 2);
    s.dists.factors.push_back(FiniteDist(std::vector<Rat>{Rat(1, 3), Rat(2, 3)}));
    s.dists.factors.push_back(FiniteDist(std::vector<Rat>{Rat(1, 2), Rat(1, 2)}));
    s.dists.factors.push_back(FiniteDist(std::vector<Rat>{Rat(1, 4), Rat(3, 4)}));
    GroundSet g3(3);
    s.cover = Cover({AtomSet(g3, {0, 1}), AtomSet(g3, {1, 2}), AtomSet(g3, {2})},
                    {RootSum(Rat(2, 10)), RootSum(Rat(3, 10)), RootSum(Rat(1, 10))});
    CHECK(alpha_exact(s, RootSum(Rat(1, 10))).alpha == Rat(1, 2));
    CHECK(alpha_exact(s, RootSum(Rat(2, 10))).alpha == Rat(1, 2));
    CHECK(alpha_exact(s, RootSum(Rat(3, 10))).alpha == Rat(1, 12));
    CHECK(alpha_exact(s, RootSum(Rat(4, 10))).alpha == 0);
    CHECK(alpha_exact(s, RootSum(Rat(1, 2))).alpha == 0);
}

TEST_CASE("alpha_exact obeys the concentration-function relation") {
    // alpha(r) <= sup over half-mass sets of the tail of min(d(.,A), r) at r/2
    Scenario s = fair_bits_scenario(3, 1000, 1);
    FiniteMmSpace sp = scenario_space(s);
    std::size_t m = sp.points();
    for (Rat r : {Rat(1, 3), Rat(2, 3), Rat(1)}) {
        auto a = alpha_exact(sp, RootSum(r));
        double sup_tail = 0;
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            Rat mass = 0;
            for (std::size_t i = 0; i < m; ++i)
                if ((mask >> i) & 1) mass += sp.mass[i];
            if (mass < Rat(1, 2)) continue;
            std::vector<double> f(m);
            for (std::size_t i = 0; i < m; ++i) {
                RootSum dmin;
                bool first = true;
                for (std::size_t j = 0; j < m; ++j) {
                    if (!((mask >> j) & 1)) continue;
                    if (first || sp.dist[i][j] < dmin) dmin = sp.dist[i][j];
                    first = false;
                }
                f[i] = std::min(dmin.to_double(), to_double(r));
            }
            double mean = 0;
            for (std::size_t i = 0; i < m; ++i) mean += to_double(sp.mass[i]) * f[i];
            double tail = 0;
            for (std::size_t i = 0; i < m; ++i)
                if (f[i] - mean >= to_double(r) / 2) tail += to_double(sp.mass[i]);
            sup_tail = std::max(sup_tail, tail);
        }
        CHECK(to_double(a.alpha) <= sup_tail + 1e-9);
    }
}

TEST_CASE("alpha_sampled stays below alpha_exact") {
    for (int n : {2, 3, 4}) {
        Scenario s = fair_bits_scenario(n, 1000, 1);
        for (Rat eps : {Rat(1, 4), Rat(1, 2), Rat(1)}) {
            auto ex = alpha_exact(s, RootSum(eps));
            auto sm = alpha_sampled(s, RootSum(eps), 32, 5);
            CHECK(sm.exact_candidates);
            CHECK(sm.alpha <= to_double(ex.alpha) + 1e-12);
        }
    }
}

TEST_CASE("alpha_sampled finds the exact minimizer on the 4-cube") {
    Scenario s = fair_bits_scenario(4, 1000, 1);
    auto ex = alpha_exact(s, RootSum(Rat(1, 4)));
    auto sm = alpha_sampled(s, RootSum(Rat(1, 4)), 32, 5);
    CHECK(sm.alpha == doctest::Approx(to_double(ex.alpha)));
    auto wide = alpha_sampled(s, RootSum(Rat(2)), 32, 5);
    CHECK(wide.alpha == doctest::Approx(0.0));
}

TEST_CASE("alpha_sampled on a larger cube uses cylinder candidates") {
    Scenario s = fair_bits_scenario(10, 1000, 1);
    auto r = alpha_sampled(s, RootSum(Rat(1, 20)), 16, 42);
    CHECK(r.candidates > 0);
    CHECK(r.lower_bound_estimate);
    CHECK(r.alpha >= 0);
    CHECK(r.alpha <= 0.5 + 1e-9);
}

TEST_CASE("probe on uniform equipartitions") {
    GroundSet g(8);
    auto phi = make_measure(g, std::vector<Rat>(8, Rat(1, 8)));
    std::vector<Partition> chain;
    chain.push_back(Partition({AtomSet(g, {0, 1, 2, 3}), AtomSet(g, {4, 5, 6, 7})}));
    chain.push_back(Partition({AtomSet(g, {0, 1}), AtomSet(g, {2, 3}), AtomSet(g, {4, 5}),
                               AtomSet(g, {6, 7})}));
    chain.push_back(singleton_partition(g));
    auto rep = covering_concentration_probe(phi, chain, RootSum(Rat(1, 3)), 11);
    REQUIRE(rep.rows.size() == 3);
    // bound column strictly decreasing along the refinement
    CHECK(rep.rows[0].bound > rep.rows[1].bound);
    CHECK(rep.rows[1].bound > rep.rows[2].bound);
    // two half-mass blocks: exp(-eps^2 / (8 * 2 * (1/2)^2)) at eps = 1/3
    CHECK(rep.rows[0].bound == doctest::Approx(std::exp(-1.0 / 36)).epsilon(1e-9));
    // exact alpha available for the small partitions and below the bound
    CHECK(rep.rows[0].exact);
    CHECK(rep.rows[1].exact);
    CHECK(to_double(rep.rows[0].alpha_exact_value) <= rep.rows[0].bound + 1e-9);
    CHECK(to_double(rep.rows[1].alpha_exact_value) <= rep.rows[1].bound + 1e-9);

    // single-block partition: everything within eps > phi(1)
    std::vector<Partition> whole{Partition({AtomSet::full_set(g)})};
    auto rw = covering_concentration_probe(phi, whole, RootSum(Rat(2)), 1);
    CHECK(rw.rows[0].exact);
    CHECK(rw.rows[0].alpha_exact_value == 0);

    // non-refining chains must be rejected
    std::vector<Partition> bad{singleton_partition(g),
                               Partition({AtomSet(g, {0, 1, 2, 3}), AtomSet(g, {4, 5, 6, 7})})};
    CHECK_THROWS(covering_concentration_probe(phi, bad, RootSum(Rat(1, 3)), 1));
}

TEST_CASE("probe on the depth-2 truncation chain") {
    auto ex = example_easy(2);
    std::vector<Partition> chain;
    chain.push_back(Partition({AtomSet::full_set(ex.ground)}));
    chain.push_back(ex.index.level_partition(ex.ground, 2));
    auto rep = covering_concentration_probe(ex.phi, chain, RootSum(Rat(1, 2)), 3);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].exact);
    CHECK(rep.rows[1].exact);
    // alpha non-increasing along the refinement
    CHECK(rep.rows[1].alpha_exact_value <= rep.rows[0].alpha_exact_value);
}

TEST_CASE("tree extensions on the 2x2 tree") {
    TreeSpec spec{{2, 2}, {1.0, 1.0}};
    // all-zero and all-one leaves
    CHECK(ybar_extension(0, spec)[0][0] == 0);
    CHECK(ybar_extension(15, spec)[0][0] == 1);
    CHECK(yhat_extension(0, spec)[0][0] == 0);

    // the root sees 1 exactly when every leaf is 1
    for (std::uint32_t y = 0; y < 16; ++y) {
        CHECK((ybar_extension(y, spec)[0][0] == 1) == (y == 15));
        CHECK((yhat_extension(y, spec)[0][0] == 1) == (y == 15));
    }

    // huge thresholds force the root to 0
    TreeSpec big{{2, 2}, {100.0, 100.0}};
    for (std::uint32_t y = 0; y < 16; ++y) CHECK(yhat_extension(y, big)[0][0] == 0);
}

TEST_CASE("sim_related matches subset enumeration") {
    for (TreeSpec spec : {TreeSpec{{2, 2}, {1.0, 1.0}}, TreeSpec{{2, 2}, {2.0, 1.0}},
                          TreeSpec{{3, 2}, {1.0, 1.0}}, TreeSpec{{3, 2}, {2.0, 1.0}}}) {
        long long nl = spec.leaves();
        for (std::uint32_t x = 0; x < (1u << nl); ++x)
            for (std::uint32_t y = 0; y < (1u << nl); ++y) {
                bool fast = sim_related(x, y, spec);
                bool slow = sim_related_enumerate(x, y, spec);
                REQUIRE(fast == slow);
            }
    }
}

TEST_CASE("unit thresholds reduce relatedness to equality") {
    TreeSpec spec{{2, 2}, {1.0, 1.0}};
    for (std::uint32_t x = 0; x < 16; ++x)
        for (std::uint32_t y = 0; y < 16; ++y)
            CHECK(sim_related(x, y, spec) == (x == y));
}

TEST_CASE("claim check on small trees") {
    auto r22 = claim_msds_check(TreeSpec{{2, 2}, {1.0, 1.0}});
    CHECK(r22.size_a == 15);
    CHECK(r22.size_b == 15);
    CHECK(r22.lower_bound == 8);
    CHECK(r22.size_ok);
    CHECK(r22.inclusion_checked);
    CHECK(r22.inclusion_holds);

    auto r32 = claim_msds_check(TreeSpec{{3, 2}, {1.0, 1.0}});
    CHECK(r32.size_a == 54); // complement of >= 2 all-ones pairs among 3
    CHECK(r32.size_ok);
    CHECK(r32.inclusion_checked);
    CHECK(r32.inclusion_holds);

    auto r32w = claim_msds_check(TreeSpec{{3, 2}, {2.0, 1.0}});
    CHECK(r32w.size_ok);
    CHECK(r32w.inclusion_checked);
    CHECK(r32w.inclusion_holds);

    // all-ones never lands in the small side
    for (auto spec : {TreeSpec{{2, 2}, {1.0, 1.0}}, TreeSpec{{3, 2}, {1.0, 1.0}}}) {
        std::uint32_t ones = (1u << spec.leaves()) - 1;
        CHECK(ybar_extension(ones, spec)[0][0] == 1);
    }

    CHECK_THROWS(claim_msds_check(TreeSpec{{2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2},
                                           std::vector<double>(13, 1.0)}));
}

TEST_CASE("claim check passes on every small tree shape") {
    std::vector<TreeSpec> specs;
    for (std::vector<int> M : {std::vector<int>{2, 2}, {3, 2}, {2, 3}, {4, 2}, {2, 4},
                               {5}, {8}, {2, 2, 2}}) {
        for (double d1 : {1.0, 1.5, 2.0}) {
            std::vector<double> d(M.size(), 1.0);
            d[0] = d1;
            specs.push_back(TreeSpec{M, d});
        }
    }
    for (const auto& spec : specs) {
        auto r = claim_msds_check(spec);
        CHECK(r.size_ok);
        if (r.inclusion_checked) CHECK(r.inclusion_holds);
    }
}

TEST_CASE("berry esseen bound evaluator") {
    // a = 1/2, delta = 0: lhs - 1/2 <= 0 < K/sqrt(n)
    for (int n : {1, 10, 100}) {
        auto r = berry_esseen_bound(0.5, 0.0, n, 1.0);
        REQUIRE(r.lhs_available);
        CHECK(r.verdict);
        CHECK(r.rhs == doctest::Approx(1.0 / std::sqrt((double)n)));
        CHECK(r.lhs - Rat(1, 2) <= Rat(1, 2));
    }
    // enormous delta: lhs = 1, rhs blows past 1/2
    auto big = berry_esseen_bound(0.5, 100.0, 25, 1.0);
    CHECK(big.lhs == 1);
    CHECK(big.verdict);

    auto mid = berry_esseen_bound(0.51, 0.1, 100, 1.0);
    REQUIRE(mid.lhs_available);
    CHECK(mid.verdict);

    CHECK_THROWS(berry_esseen_bound(0.4, 0.0, 10, 1.0));
    CHECK_THROWS(berry_esseen_bound(0.8, 0.0, 10, 1.0));
}
