#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "smlab/algebra.hpp"
#include "smlab/atomset.hpp"
#include "smlab/rng.hpp"
#include "smlab/rootsum.hpp"

namespace smlab {

// atom-additive set function with exact (possibly root-valued) atom weights
class AtomMeasure {
public:
    AtomMeasure() = default;
    AtomMeasure(GroundSet g, std::vector<RootSum> weights)
        : ground_(g), weights_(std::move(weights)) {
        if ((int)weights_.size() != g.n_atoms)
            throw std::invalid_argument("AtomMeasure: weight count mismatch");
        for (const auto& w : weights_)
            if (w.sign() < 0) throw std::invalid_argument("AtomMeasure: negative weight");
    }
    static AtomMeasure from_rationals(GroundSet g, const std::vector<Rat>& w) {
        std::vector<RootSum> v(w.begin(), w.end());
        return AtomMeasure(g, std::move(v));
    }

    GroundSet ground() const { return ground_; }
    const std::vector<RootSum>& atom_weights() const { return weights_; }

    RootSum operator()(const AtomSet& a) const {
        RootSum s;
        for (int atom : a.atoms()) s += weights_[atom];
        return s;
    }
    RootSum total() const { return (*this)(AtomSet::full_set(ground_)); }

private:
    GroundSet ground_{1};
    std::vector<RootSum> weights_;
};

// generating family for an infimum-of-weighted-covers submeasure; the
// whole-space fallback keeps every evaluation feasible
struct WeightedCoverFamily {
    GroundSet ground{1};
    std::vector<std::pair<AtomSet, RootSum>> generators;
    RootSum fallback_weight{Rat(1)};

    void validate() const {
        for (const auto& [s, w] : generators) {
            if (s.ground() != ground)
                throw std::invalid_argument("WeightedCoverFamily: mixed ground sets");
            if (w.sign() <= 0)
                throw std::invalid_argument("WeightedCoverFamily: weights must be positive");
        }
        if (fallback_weight.sign() <= 0)
            throw std::invalid_argument("WeightedCoverFamily: fallback weight must be positive");
    }
};

namespace detail {

// precomputed union frontier: all distinct generator unions that are not
// dominated by a cheaper union covering at least as much, sorted by weight
struct CoverFrontier {
    std::vector<Bits> masks;
    std::vector<RootSum> weights;

    static CoverFrontier build(const WeightedCoverFamily& fam) {
        const auto& gens = fam.generators;
        std::size_t g = gens.size();
        std::vector<std::pair<Bits, RootSum>> entries;
        entries.reserve((std::size_t(1) << g) + 1);
        entries.emplace_back(fam.ground.full_mask(), fam.fallback_weight);
        std::unordered_map<Bits, std::size_t, BitsHash> by_mask;
        by_mask.emplace(entries[0].first, 0);
        for (std::uint64_t sub = 1; sub < (std::uint64_t(1) << g); ++sub) {
            Bits m = 0;
            RootSum w;
            for (std::uint64_t b = sub; b; b &= b - 1) {
                std::size_t i = std::countr_zero(b);
                m |= gens[i].first.bits();
                w += gens[i].second;
            }
            auto [it, fresh] = by_mask.try_emplace(m, entries.size());
            if (fresh) entries.emplace_back(m, std::move(w));
            else if (w < entries[it->second].second) entries[it->second].second = std::move(w);
        }
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; });
        CoverFrontier f;
        for (const auto& [m, w] : entries) {
            bool dominated = false;
            for (Bits kept : f.masks)
                if ((m & ~kept) == 0) { dominated = true; break; }
            if (!dominated) {
                f.masks.push_back(m);
                f.weights.push_back(w);
            }
        }
        return f;
    }

    RootSum evaluate(Bits target) const {
        if (!target) return RootSum();
        for (std::size_t i = 0; i < masks.size(); ++i)
            if ((target & ~masks[i]) == 0) return weights[i];
        throw std::logic_error("CoverFrontier: fallback entry missing");
    }
};

} // namespace detail

// monotone subadditive set function vanishing on the empty set; evaluators
// are immutable after construction
class Submeasure {
public:
    enum class Kind { measure, table, cover_generated, example_easy };

    Submeasure() = default;

    Kind kind() const { return kind_; }
    GroundSet ground() const { return ground_; }
    RootSum operator()(const AtomSet& a) const {
        if (a.ground() != ground_) throw std::invalid_argument("Submeasure: wrong ground set");
        return eval_(a);
    }
    RootSum total() const { return (*this)(AtomSet::full_set(ground_)); }

    const AtomMeasure* as_measure() const { return measure_.get(); }
    const WeightedCoverFamily* family() const { return family_.get(); }

    static Submeasure measure(AtomMeasure m) {
        Submeasure s;
        s.kind_ = Kind::measure;
        s.ground_ = m.ground();
        s.measure_ = std::make_shared<const AtomMeasure>(std::move(m));
        auto ref = s.measure_;
        s.eval_ = [ref](const AtomSet& a) { return (*ref)(a); };
        return s;
    }

    static Submeasure table(GroundSet g, std::vector<RootSum> values) {
        if (g.n_atoms > 20)
            throw limit_error("Submeasure::table: ground set too large for a table");
        if (values.size() != (std::size_t(1) << g.n_atoms))
            throw std::invalid_argument("Submeasure::table: need one value per subset");
        if (!values[0].is_zero())
            throw std::invalid_argument("Submeasure::table: value on the empty set must be 0");
        Submeasure s;
        s.kind_ = Kind::table;
        s.ground_ = g;
        auto tab = std::make_shared<std::vector<RootSum>>(std::move(values));
        s.eval_ = [tab](const AtomSet& a) { return (*tab)[a.bits()]; };
        return s;
    }

    static Submeasure cover_generated(WeightedCoverFamily fam,
                                      Kind kind = Kind::cover_generated) {
        fam.validate();
        Submeasure s;
        s.kind_ = kind;
        s.ground_ = fam.ground;
        s.family_ = std::make_shared<const WeightedCoverFamily>(std::move(fam));
        auto ref = s.family_;
        if (ref->generators.size() <= 20) {
            auto frontier =
                std::make_shared<detail::CoverFrontier>(detail::CoverFrontier::build(*ref));
            s.eval_ = [frontier](const AtomSet& a) { return frontier->evaluate(a.bits()); };
        } else {
            s.eval_ = [ref](const AtomSet& a) {
                std::vector<AtomSet> sets;
                std::vector<RootSum> w;
                sets.reserve(ref->generators.size() + 1);
                for (const auto& [g, gw] : ref->generators) {
                    sets.push_back(g);
                    w.push_back(gw);
                }
                sets.push_back(AtomSet::full_set(ref->ground));
                w.push_back(ref->fallback_weight);
                return min_weight_cover(a, sets, w).weight;
            };
        }
        return s;
    }

private:
    Kind kind_ = Kind::measure;
    GroundSet ground_{1};
    std::function<RootSum(const AtomSet&)> eval_;
    std::shared_ptr<const AtomMeasure> measure_;
    std::shared_ptr<const WeightedCoverFamily> family_;
};

inline Submeasure make_measure(GroundSet g, std::vector<RootSum> atom_weights) {
    return Submeasure::measure(AtomMeasure(g, std::move(atom_weights)));
}
inline Submeasure make_measure(GroundSet g, const std::vector<Rat>& atom_weights) {
    return Submeasure::measure(AtomMeasure::from_rationals(g, atom_weights));
}
inline Submeasure make_cover_generated(WeightedCoverFamily fam) {
    return Submeasure::cover_generated(std::move(fam));
}

// addresses the cells of a truncated product of finite levels; level n is
// partitioned into blocks {x : x_n = i}
struct LevelBlockIndex {
    int depth = 1;
    std::vector<int> level_sizes; // K_1..K_depth

    int n_atoms() const {
        long long n = 1;
        for (int k : level_sizes) n *= k;
        return (int)n;
    }
    int stride(int level) const { // level in 1..depth
        int s = 1;
        for (int j = level; j < depth; ++j) s *= level_sizes[j];
        return s;
    }
    int coord(int atom, int level) const {
        return (atom / stride(level)) % level_sizes[level - 1];
    }
    AtomSet block(GroundSet g, int level, int value) const {
        Bits bits = 0;
        for (int a = 0; a < g.n_atoms; ++a)
            if (coord(a, level) == value) bits |= Bits(1) << a;
        return AtomSet(g, bits);
    }
    Partition level_partition(GroundSet g, int level) const {
        std::vector<AtomSet> blocks;
        for (int i = 0; i < level_sizes[level - 1]; ++i) blocks.push_back(block(g, level, i));
        return Partition(std::move(blocks));
    }
};

struct ExampleEasy {
    Submeasure phi;
    std::vector<AtomMeasure> mu;  // mu_1..mu_depth
    std::vector<RootSum> xi;      // xi_0..xi_depth
    std::vector<long long> M;     // M_1..M_depth
    LevelBlockIndex index;
    GroundSet ground{1};
};

// truncated product construction: levels K_n = M_n/n, block weights
// xi_n = 1/sqrt(M_n), companion measures mu_n with the level-n factor
// carrying atom weight 1/sqrt(M_n) and every other factor 1/K_j
inline ExampleEasy example_easy(
    int depth, const std::function<long long(int)>& m_rule = [](int n) {
        return (long long)n * n * n;
    }) {
    if (depth < 1) throw std::invalid_argument("example_easy: depth must be >= 1");
    std::vector<long long> M;
    std::vector<int> K;
    for (int n = 1; n <= depth; ++n) {
        long long m = m_rule(n);
        if (m <= 0 || m % n != 0)
            throw std::invalid_argument("example_easy: level rule must yield n | M_n");
        if (m < (long long)n * n)
            throw std::invalid_argument("example_easy: level rule must keep sqrt(M_n)/n >= 1");
        if (n >= 2) {
            // sqrt(M_{n-1})/(n-1) <= sqrt(M_n)/n, cross-multiplied
            __int128 lhs = (__int128)M.back() * n * n;
            __int128 rhs = (__int128)m * (n - 1) * (n - 1);
            if (lhs > rhs)
                throw std::invalid_argument("example_easy: level rule must be monotone");
        }
        M.push_back(m);
        K.push_back((int)(m / n));
    }
    LevelBlockIndex idx{depth, K};
    long long atoms = 1;
    for (int k : K) {
        atoms *= k;
        if (atoms > kMaxAtoms)
            throw limit_error("example_easy: truncation exceeds the atom limit");
    }
    GroundSet g((int)atoms);

    ExampleEasy out;
    out.index = idx;
    out.ground = g;
    out.M = M;
    out.xi.push_back(RootSum(Rat(1))); // xi_0
    for (int n = 1; n <= depth; ++n) out.xi.push_back(RootSum::inv_sqrt((std::uint64_t)M[n - 1]));

    WeightedCoverFamily fam;
    fam.ground = g;
    fam.fallback_weight = out.xi[0];
    for (int n = 1; n <= depth; ++n)
        for (int i = 0; i < K[n - 1]; ++i)
            fam.generators.emplace_back(idx.block(g, n, i), out.xi[n]);
    out.phi = Submeasure::cover_generated(std::move(fam), Submeasure::Kind::example_easy);

    for (int n = 1; n <= depth; ++n) {
        Rat flat = 1; // product of 1/K_j over the other levels
        for (int j = 1; j <= depth; ++j)
            if (j != n) flat /= K[j - 1];
        RootSum per_atom = flat * RootSum::inv_sqrt((std::uint64_t)M[n - 1]);
        out.mu.emplace_back(g, std::vector<RootSum>((std::size_t)atoms, per_atom));
    }
    return out;
}

struct AuditCounterexample {
    std::string axiom; // "empty", "monotone", "subadditive"
    AtomSet a, b;
};

struct AuditReport {
    bool passed = true;
    long trials = 0;
    std::uint64_t seed = 0;
    std::vector<AuditCounterexample> counterexamples;
};

// randomized check of the submeasure axioms; counterexamples are reported,
// not thrown
inline AuditReport audit_submeasure(const Submeasure& phi, long trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("audit_submeasure: trials must be >= 1");
    AuditReport rep;
    rep.trials = trials;
    rep.seed = seed;
    GroundSet g = phi.ground();
    auto note = [&](const char* axiom, AtomSet a, AtomSet b) {
        rep.passed = false;
        if (rep.counterexamples.size() < 16)
            rep.counterexamples.push_back({axiom, a, b});
    };
    if (!phi(AtomSet::empty_set(g)).is_zero())
        note("empty", AtomSet::empty_set(g), AtomSet::empty_set(g));
    Rng rng(seed);
    for (long t = 0; t < trials; ++t) {
        AtomSet a(g, ((Bits(rng.bits()) << 64) | rng.bits()) & g.full_mask());
        AtomSet b(g, ((Bits(rng.bits()) << 64) | rng.bits()) & g.full_mask());
        RootSum va = phi(a), vb = phi(b), vu = phi(a | b);
        if ((va - vu).sign() > 0) note("monotone", a, b);
        if ((vu - va - vb).sign() > 0) note("subadditive", a, b);
    }
    return rep;
}

// exhaustive variant of the audit, gated to small ground sets
inline AuditReport audit_submeasure_exhaustive(const Submeasure& phi) {
    GroundSet g = phi.ground();
    if (g.n_atoms > 12) throw limit_error("audit_submeasure_exhaustive: too many atoms");
    AuditReport rep;
    rep.trials = -1;
    auto note = [&](const char* axiom, AtomSet a, AtomSet b) {
        rep.passed = false;
        if (rep.counterexamples.size() < 16)
            rep.counterexamples.push_back({axiom, a, b});
    };
    std::uint64_t full = g.full_mask64();
    std::vector<RootSum> val(full + 1);
    for (std::uint64_t m = 0; m <= full; ++m) val[m] = phi(AtomSet(g, m));
    if (!val[0].is_zero()) note("empty", AtomSet::empty_set(g), AtomSet::empty_set(g));
    for (std::uint64_t a = 0; a <= full; ++a)
        for (std::uint64_t b = 0; b <= full; ++b) {
            if ((val[a] - val[a | b]).sign() > 0)
                note("monotone", AtomSet(g, a), AtomSet(g, b));
            if ((val[a | b] - val[a] - val[b]).sign() > 0)
                note("subadditive", AtomSet(g, a), AtomSet(g, b));
        }
    return rep;
}

// parameter generation for the non-concentrating cover-generated family;
// weights shrink so fast that everything is carried in log2 space, with raw
// doubles reported where they stay representable
struct BerryEsseenParams {
    int i_max = 0;
    double K = 1;
    std::vector<double> log2_w;   // w_1..w_imax
    std::vector<double> log2_M;   // M_1..M_imax
    std::vector<double> w;        // raw (0 when underflowed)
    std::vector<double> M;        // raw (inf when overflowed)
    std::vector<long long> M_int; // exact integer levels, 0 when out of range
    std::vector<double> log2_eps; // eps_0..eps_imax (last = -inf)
    std::vector<double> eps;
    bool ok = false;
    std::string error;
    bool w_bound_ok = false;    // w_i <= 2^-i
    bool sandwich_ok = false;   // both level inequalities re-verified
    bool eps_positive = false;  // eps_k > 0 for k < i_max
    bool eps0_small = false;    // eps_0 < 1/4
    bool eps_decreasing = false;
};

inline BerryEsseenParams berry_esseen_params(
    const std::function<double(double)>& theta_log2_at_log2, int i_max, double c_three_quarters = 1.0,
    int search_budget = 4000) {
    BerryEsseenParams out;
    out.i_max = i_max;
    out.K = std::max(c_three_quarters, 1.0);
    if (i_max < 1 || i_max > 8) {
        out.error = "i_max must lie in 1..8";
        return out;
    }
    double lK = std::log2(out.K);
    double prod_lM = 0;
    std::vector<double> ltheta;
    for (int i = 1; i <= i_max; ++i) {
        double lw = -i;
        int steps = 0;
        auto bad = [&](double lw_try) {
            double lth = theta_log2_at_log2(lw_try);
            return (2 * i + 5) + prod_lM + i * lK + 0.5 * lth >= 0;
        };
        while (bad(lw)) {
            lw -= std::max(1.0, std::abs(lw) * 0.5);
            if (++steps > search_budget || !std::isfinite(lw)) {
                out.error = "no admissible weight found within the search budget at level " +
                            std::to_string(i);
                return out;
            }
        }
        double lth = theta_log2_at_log2(lw);
        double X = i + lw + 0.5 * prod_lM + 0.5 * lth;
        double lM;
        long long m_int = 0;
        if (-2 * X <= 52) {
            double lo = std::exp2(-2 * X - 2), hi = std::exp2(-2 * X);
            m_int = (long long)std::ceil(lo);
            if (m_int < 1) m_int = 1;
            if ((double)m_int > hi) {
                out.error = "no integer level size inside the sandwich at level " +
                            std::to_string(i);
                return out;
            }
            lM = std::log2((double)m_int);
        } else {
            lM = -2 * X - 1; // midpoint of the admissible interval
        }
        if (lM < 0) {
            out.error = "level size below 1 at level " + std::to_string(i);
            return out;
        }
        out.log2_w.push_back(lw);
        out.log2_M.push_back(lM);
        out.M_int.push_back(m_int);
        ltheta.push_back(lth);
        prod_lM += lM;
    }

    // eps via the backward recursion from a zero tail
    std::vector<double> leps(i_max + 1);
    leps[i_max] = -std::numeric_limits<double>::infinity();
    for (int k = i_max; k >= 1; --k) {
        double a = -out.log2_w[k - 1] - 0.5 * out.log2_M[k - 1];
        double b = 0.5 * out.log2_M[k - 1] + leps[k];
        double c = -0.5 * out.log2_M[k - 1];
        double mx = std::max({a, b, c});
        double sum = std::exp2(a - mx) + (std::isfinite(b) ? std::exp2(b - mx) : 0.0) +
                     std::exp2(c - mx);
        leps[k - 1] = std::log2(out.K) + mx + std::log2(sum);
    }
    out.log2_eps = leps;

    out.w_bound_ok = true;
    for (int i = 1; i <= i_max; ++i)
        if (out.log2_w[i - 1] > -i + 1e-12) out.w_bound_ok = false;
    out.sandwich_ok = true;
    double acc = 0;
    for (int i = 1; i <= i_max; ++i) {
        double X = i + out.log2_w[i - 1] + 0.5 * acc + 0.5 * ltheta[i - 1];
        double half = -0.5 * out.log2_M[i - 1];
        if (!(X <= half + 1e-9 && half <= X + 1 + 1e-9)) out.sandwich_ok = false;
        acc += out.log2_M[i - 1];
    }
    out.eps_positive = true; // finite log2 values are positive by construction
    for (int k = 0; k < i_max; ++k)
        if (!std::isfinite(leps[k])) out.eps_positive = false;
    out.eps0_small = leps[0] < -2;
    out.eps_decreasing = true;
    for (int k = 1; k <= i_max; ++k)
        if (!(leps[k - 1] > leps[k])) out.eps_decreasing = false;

    for (double lw : out.log2_w) out.w.push_back(std::exp2(lw));
    for (double lM : out.log2_M) out.M.push_back(std::exp2(lM));
    for (double le : out.log2_eps) out.eps.push_back(std::exp2(le));
    out.ok = out.w_bound_ok && out.sandwich_ok && out.eps_positive && out.eps0_small &&
             out.eps_decreasing;
    if (!out.ok && out.error.empty()) out.error = "generated sequences failed re-verification";
    return out;
}

// theta(xi) = xi^p expressed in log2 space
inline std::function<double(double)> power_theta_log2(double p) {
    return [p](double lxi) { return p * lxi; };
}

} // namespace smlab
