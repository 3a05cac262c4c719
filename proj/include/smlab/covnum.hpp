#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "smlab/algebra.hpp"
#include "smlab/lp.hpp"
#include "smlab/submeasure.hpp"

namespace smlab {

inline constexpr int kSubsetSweepLimit = 16;

// exact fractional covering value with both certificates: an integer
// sequence realizing hits/length = value and a dominated atom measure of
// total mass 1/value
struct CoveringCertificate {
    Rat value;
    std::vector<std::pair<AtomSet, long long>> primal; // (set, multiplicity)
    long long primal_length = 0;                       // sum of multiplicities
    long long primal_hits = 0;                         // min per-atom hit count
    bool dual_unbounded = false;                       // value 0 leaves no finite witness
    std::vector<Rat> dual_atom_mass;

    // verification helpers used by callers and tests
    bool primal_matches_value(GroundSet g) const {
        if (value == 0) return primal.empty();
        if (primal_length <= 0) return false;
        long long hits = -1;
        for (int a = 0; a < g.n_atoms; ++a) {
            long long h = 0;
            for (const auto& [s, mult] : primal)
                if (s.contains(a)) h += mult;
            hits = hits < 0 ? h : std::min(hits, h);
        }
        return hits == primal_hits && Rat(Int(primal_hits), Int(primal_length)) == value;
    }
};

// fractional covering number of a family, as the exact optimum of
//   max t   s.t.  sum_B x_B [a in B] >= t for every atom a,  sum_B x_B = 1
// with the dual measure recovered from the atom-row multipliers
inline CoveringCertificate covering_number(GroundSet g, const std::vector<AtomSet>& family) {
    if (family.empty()) throw std::invalid_argument("covering_number: empty family");
    for (const auto& s : family)
        if (s.ground() != g) throw std::invalid_argument("covering_number: mixed ground sets");

    // only maximal distinct sets can matter; sweep by descending size so a
    // set is dominated exactly when it sits inside an already kept one
    std::vector<Bits> masks;
    masks.reserve(family.size());
    for (const auto& s : family)
        if (!s.empty()) masks.push_back(s.bits());
    std::sort(masks.begin(), masks.end(), [](Bits a, Bits b) {
        int ca = popcount128(a), cb = popcount128(b);
        return ca != cb ? ca > cb : a < b;
    });
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    std::vector<AtomSet> kept;
    for (Bits m : masks) {
        bool dominated = false;
        for (const auto& k : kept)
            if ((m & ~k.bits()) == 0) { dominated = true; break; }
        if (!dominated) kept.emplace_back(g, m);
    }

    CoveringCertificate cert;
    if (kept.empty()) { // family of empty sets only
        cert.value = 0;
        cert.dual_unbounded = true;
        return cert;
    }

    const std::size_t f = kept.size();
    RationalLP lp;
    lp.sense = LpSense::maximize;
    lp.objective.assign(f + 1, Rat(0));
    lp.objective[f] = 1; // the t variable
    for (int a = 0; a < g.n_atoms; ++a) {
        LpRow row;
        row.coef.assign(f + 1, Rat(0));
        for (std::size_t j = 0; j < f; ++j) row.coef[j] = kept[j].contains(a) ? 1 : 0;
        row.coef[f] = -1;
        row.rel = LpRel::ge;
        row.rhs = 0;
        lp.rows.push_back(std::move(row));
    }
    LpRow norm;
    norm.coef.assign(f + 1, Rat(0));
    for (std::size_t j = 0; j < f; ++j) norm.coef[j] = 1;
    norm.rel = LpRel::eq;
    norm.rhs = 1;
    lp.rows.push_back(std::move(norm));

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error("covering_number: LP must be solvable");
    cert.value = sol.value;

    if (cert.value == 0) {
        cert.dual_unbounded = true;
        return cert;
    }

    // integer sequence: scale the fractional solution by the lcm of denominators
    Int L = 1;
    for (std::size_t j = 0; j < f; ++j)
        if (sol.x[j] != 0) L = lcm_int(L, denominator(sol.x[j]));
    long long total = 0;
    for (std::size_t j = 0; j < f; ++j) {
        if (sol.x[j] == 0) continue;
        Int mult = numerator(sol.x[j]) * (L / denominator(sol.x[j]));
        cert.primal.emplace_back(kept[j], mult.convert_to<long long>());
        total += mult.convert_to<long long>();
    }
    cert.primal_length = total;
    long long hits = -1;
    for (int a = 0; a < g.n_atoms; ++a) {
        long long h = 0;
        for (const auto& [s, mult] : cert.primal)
            if (s.contains(a)) h += mult;
        hits = hits < 0 ? h : std::min(hits, h);
    }
    cert.primal_hits = hits;
    if (!cert.primal_matches_value(g))
        throw std::logic_error("covering_number: primal certificate mismatch");

    // dual measure: atom-row multipliers scaled by 1/value
    cert.dual_atom_mass.resize(g.n_atoms);
    Rat mass = 0;
    for (int a = 0; a < g.n_atoms; ++a) {
        Rat y = rat_abs(sol.row_dual[a]);
        cert.dual_atom_mass[a] = y / cert.value;
        mass += cert.dual_atom_mass[a];
    }
    if (mass * cert.value != 1)
        throw std::logic_error("covering_number: dual mass mismatch");
    for (const auto& s : kept) {
        Rat mu = 0;
        for (int a : s.atoms()) mu += cert.dual_atom_mass[a];
        if (mu > 1) throw std::logic_error("covering_number: dual constraint violated");
    }
    return cert;
}

struct HPhiResult {
    RootSum xi;
    Rat c;                    // covering number of the sub-xi family
    bool lower_bound = false; // family was truncated to generator unions
    CoveringCertificate cert;
    std::vector<RootSum> dual_measure; // xi * (dual atom mass), when finite
    std::size_t family_size = 0;

    double h_double() const { return to_double(c) / to_double(xi); }
    // exact comparisons, phrased without dividing by xi
    bool h_le_inverse(const RootSum& p) const { return !((p * RootSum(c) - xi).sign() > 0); }
    bool xi_h_le_one() const { return c <= 1; }
};

// the sub-threshold family {A : phi(A) <= xi}; full sweep up to the subset
// limit, generator-union truncation beyond (flagged: the value is then only
// a lower bound)
inline std::vector<AtomSet> sub_level_family(const Submeasure& phi, const RootSum& xi,
                                             bool* truncated = nullptr) {
    GroundSet g = phi.ground();
    std::vector<AtomSet> fam;
    if (g.n_atoms <= kSubsetSweepLimit) {
        if (truncated) *truncated = false;
        for (std::uint64_t m = 0; m <= g.full_mask64(); ++m) {
            AtomSet a(g, m);
            if (phi(a) <= xi) fam.push_back(a);
        }
        return fam;
    }
    const WeightedCoverFamily* wf = phi.family();
    if (!wf)
        throw limit_error("sub_level_family: ground set too large for a full subset sweep");
    if (truncated) *truncated = true;
    // unions of generators whose weights already sum below the threshold
    std::vector<Bits> masks{0};
    std::vector<RootSum> weights{RootSum()};
    std::unordered_set<Bits, BitsHash> seen{0};
    for (const auto& [s, w] : wf->generators) {
        std::size_t count = masks.size();
        for (std::size_t i = 0; i < count && masks.size() < 20000; ++i) {
            RootSum nw = weights[i] + w;
            if (nw <= xi) {
                Bits nm = masks[i] | s.bits();
                if (seen.insert(nm).second) {
                    masks.push_back(nm);
                    weights.push_back(nw);
                }
            }
        }
    }
    if (phi.total() <= xi && seen.insert(g.full_mask()).second)
        masks.push_back(g.full_mask());
    for (Bits m : masks) fam.emplace_back(g, m);
    return fam;
}

inline HPhiResult h_phi(const Submeasure& phi, const RootSum& xi) {
    if (xi.sign() <= 0) throw std::invalid_argument("h_phi: threshold must be positive");
    HPhiResult res;
    res.xi = xi;
    bool truncated = false;
    std::vector<AtomSet> fam = sub_level_family(phi, xi, &truncated);
    res.lower_bound = truncated;
    res.family_size = fam.size();
    res.cert = covering_number(phi.ground(), fam);
    res.c = res.cert.value;
    if (!res.cert.dual_unbounded) {
        for (const Rat& m : res.cert.dual_atom_mass) res.dual_measure.push_back(xi * RootSum(m));
        // the scaled dual really dominates nothing in the family beyond xi
        for (const auto& s : fam) {
            RootSum mu;
            for (int a : s.atoms()) mu += res.dual_measure[a];
            if ((mu - xi).sign() > 0)
                throw std::logic_error("h_phi: scaled dual exceeds the threshold");
        }
    }
    return res;
}

// largest total mass of an atom measure dominated by phi; when phi takes
// irrational values the optimum is bracketed by rational relaxations
struct PathologyResult {
    Rat lower;        // witness-backed
    Rat upper;        // certified upper bound
    bool exact = false;
    std::vector<Rat> witness; // feasible for the true constraints
};

namespace detail {

// rational lower/upper approximations of a root sum with gap <= 2^-60
inline std::pair<Rat, Rat> rat_bracket(const RootSum& v) {
    if (v.is_rational()) {
        Rat r = v.as_rational();
        return {r, r};
    }
    Rat eps(Int(1), Int(1) << 60);
    // binary search between double-based anchors, verified exactly
    double d = v.to_double();
    Rat lo = Rat(Int(std::floor((d - 1) * 1e6)), 1000000);
    Rat hi = Rat(Int(std::ceil((d + 1) * 1e6)), 1000000);
    while (!(RootSum(lo) <= v)) lo -= 1;
    while (!(v <= RootSum(hi))) hi += 1;
    while (hi - lo > eps) {
        Rat mid = (lo + hi) / 2;
        if (RootSum(mid) <= v) lo = mid;
        else hi = mid;
    }
    return {lo, hi};
}

inline constexpr int kPathologyAtomLimit = 12;

inline PathologyResult pathology_lp(const Submeasure& phi, bool upper_side) {
    GroundSet g = phi.ground();
    if (g.n_atoms > kPathologyAtomLimit)
        throw limit_error("pathology_index: ground set too large for a full subset sweep");
    // minimize sum_A phi(A) z_A subject to every atom being fractionally
    // covered; the row multipliers are the dominated measure
    std::uint64_t full = g.full_mask64();
    std::vector<Rat> rhs(full + 1);
    bool exact = true;
    for (std::uint64_t m = 1; m <= full; ++m) {
        RootSum v = phi(AtomSet(g, m));
        auto [lo, hi] = rat_bracket(v);
        exact = exact && lo == hi;
        rhs[m] = upper_side ? hi : lo;
    }
    RationalLP lp;
    lp.sense = LpSense::minimize;
    lp.objective.assign(full, Rat(0));
    for (std::uint64_t m = 1; m <= full; ++m) lp.objective[m - 1] = rhs[m];
    for (int a = 0; a < g.n_atoms; ++a) {
        LpRow row;
        row.coef.assign(full, Rat(0));
        for (std::uint64_t m = 1; m <= full; ++m)
            if ((m >> a) & 1) row.coef[m - 1] = 1;
        row.rel = LpRel::ge;
        row.rhs = 1;
        lp.rows.push_back(std::move(row));
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error("pathology_index: LP must be solvable");
    PathologyResult res;
    res.exact = exact;
    res.lower = res.upper = sol.value;
    res.witness.assign(sol.row_dual.begin(), sol.row_dual.end());
    return res;
}

} // namespace detail

inline PathologyResult pathology_index(const Submeasure& phi) {
    GroundSet g = phi.ground();
    PathologyResult lo = detail::pathology_lp(phi, /*upper_side=*/false);
    PathologyResult res;
    res.exact = lo.exact;
    res.lower = lo.lower;
    res.witness = lo.witness;
    if (lo.exact) {
        res.upper = lo.upper;
    } else {
        PathologyResult hi = detail::pathology_lp(phi, /*upper_side=*/true);
        res.upper = hi.upper;
    }
    // the witness must genuinely sit below phi
    std::uint64_t full = g.full_mask64();
    Rat mass = 0;
    for (int a = 0; a < g.n_atoms; ++a) {
        if (res.witness[a] < 0) throw std::logic_error("pathology_index: negative witness");
        mass += res.witness[a];
    }
    if (mass != res.lower) throw std::logic_error("pathology_index: witness mass mismatch");
    for (std::uint64_t m = 1; m <= full; ++m) {
        Rat mu = 0;
        for (int a = 0; a < g.n_atoms; ++a)
            if ((m >> a) & 1) mu += res.witness[a];
        if ((RootSum(mu) - phi(AtomSet(g, m))).sign() > 0)
            throw std::logic_error("pathology_index: witness not dominated");
    }
    return res;
}

// quantitative pathology signature: xi*h >= 1-xi, with the realizing sequence
struct ChristensenGap {
    RootSum xi_h;         // equals the covering value c
    RootSum one_minus_xi;
    bool satisfied = false;
    HPhiResult h;
};

inline ChristensenGap christensen_gap(const Submeasure& phi, const RootSum& xi) {
    if (xi.sign() <= 0 || (xi - RootSum(Rat(1))).sign() >= 0)
        throw std::invalid_argument("christensen_gap: threshold must lie in (0,1)");
    ChristensenGap gap;
    gap.h = h_phi(phi, xi);
    gap.xi_h = RootSum(gap.h.c); // xi * (c/xi)
    gap.one_minus_xi = RootSum(Rat(1)) - xi;
    gap.satisfied = !(gap.xi_h < gap.one_minus_xi);
    return gap;
}

enum class Verdict { elliptic_consistent, parabolic_consistent, hyperbolic_consistent,
                     inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::elliptic_consistent: return "elliptic-consistent";
        case Verdict::parabolic_consistent: return "parabolic-consistent";
        case Verdict::hyperbolic_consistent: return "hyperbolic-consistent";
        default: return "inconclusive";
    }
}

struct ClassificationReport {
    std::vector<HPhiResult> grid;
    Verdict verdict = Verdict::inconclusive;
    PathologyResult pathology;
    bool truncation_exhausted = false; // trailing thresholds with empty families
    std::string note;
};

inline std::vector<RootSum> default_xi_grid(const Submeasure& phi, int points = 10) {
    RootSum total = phi.total();
    if (total.sign() <= 0) total = RootSum(Rat(1));
    std::vector<RootSum> grid;
    Rat scale(1, 2);
    for (int j = 1; j <= points; ++j) {
        grid.push_back(scale * total);
        scale /= 2;
    }
    return grid;
}

// finite-truncation classification probe; verdicts are labeled "-consistent"
// because a finite grid cannot certify the limit behavior
inline ClassificationReport classify(const Submeasure& phi, const std::vector<RootSum>& grid) {
    if (grid.empty()) throw std::invalid_argument("classify: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] < grid[i - 1]))
            throw std::invalid_argument("classify: grid must be strictly decreasing");
    ClassificationReport rep;
    for (const RootSum& xi : grid) rep.grid.push_back(h_phi(phi, xi));
    rep.pathology = pathology_index(phi);

    // cross-checks from the dominated-measure bound; the witness measure has
    // total mass pathology.lower, so h <= 1/lower is the rigorous direction
    RootSum p_lo(rep.pathology.lower);
    for (const auto& h : rep.grid) {
        if (!h.xi_h_le_one()) throw std::logic_error("classify: xi*h exceeded 1");
        if (rep.pathology.lower > 0 && !h.h_le_inverse(p_lo))
            throw std::logic_error("classify: h exceeded the dominated-measure bound");
    }

    // drop trailing thresholds the truncation can no longer see
    std::size_t last = rep.grid.size();
    while (last > 0 && rep.grid[last - 1].c == 0) --last;
    rep.truncation_exhausted = last < rep.grid.size();
    if (last == 0) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "every grid threshold fell below the truncation's resolution";
        return rep;
    }
    const HPhiResult& fin = rep.grid[last - 1];

    // hyperbolic signature: xi*h >= 1-xi at the finest visible threshold
    RootSum one_minus = RootSum(Rat(1)) - fin.xi;
    if (!(RootSum(fin.c) < one_minus)) {
        rep.verdict = Verdict::hyperbolic_consistent;
        return rep;
    }
    if (last >= 2) {
        const HPhiResult& prev = rep.grid[last - 2];
        // stable positive h: c/xi ratios agree within 25 percent
        double h1 = prev.h_double(), h2 = fin.h_double();
        if (h2 > 0 && h1 > 0 && h2 <= 1.25 * h1 && h1 <= 1.25 * h2) {
            rep.verdict = Verdict::parabolic_consistent;
            return rep;
        }
        // h shrinking at least linearly with xi suggests an elliptic profile
        if (h2 <= 0.75 * h1 || h2 == 0) {
            rep.verdict = Verdict::elliptic_consistent;
            return rep;
        }
    }
    rep.verdict = Verdict::inconclusive;
    return rep;
}

inline ClassificationReport classify(const Submeasure& phi) {
    return classify(phi, default_xi_grid(phi));
}

// checks f(xi+zeta) >= f(xi)+f(zeta)-f(xi)f(zeta) on grid pairs whose sum is
// also on the grid; violations point at truncation artifacts
struct ConvergencePair {
    Rat xi, zeta;
    Rat lhs, rhs;
    bool ok = false;
};

struct ConvergenceReport {
    std::vector<ConvergencePair> pairs;
    int violations = 0;
    std::vector<double> ratio_trend; // f(xi)/xi along the grid
};

inline ConvergenceReport convergence_diagnostic(const std::vector<std::pair<Rat, Rat>>& samples) {
    if (samples.size() < 3)
        throw std::invalid_argument("convergence_diagnostic: need at least 3 samples");
    ConvergenceReport rep;
    std::map<Rat, Rat> table(samples.begin(), samples.end());
    for (const auto& [xi, fxi] : table)
        for (const auto& [zeta, fzeta] : table) {
            auto it = table.find(xi + zeta);
            if (it == table.end()) continue;
            ConvergencePair p;
            p.xi = xi;
            p.zeta = zeta;
            p.lhs = it->second;
            p.rhs = fxi + fzeta - fxi * fzeta;
            p.ok = p.lhs >= p.rhs;
            if (!p.ok) ++rep.violations;
            rep.pairs.push_back(std::move(p));
        }
    for (const auto& [xi, fxi] : table)
        if (xi != 0) rep.ratio_trend.push_back(to_double(fxi) / to_double(xi));
    return rep;
}

} // namespace smlab
