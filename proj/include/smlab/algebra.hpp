#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "smlab/atomset.hpp"
#include "smlab/rootsum.hpp"

namespace smlab {

// finite sequence of sets, optionally weighted; empty entries are allowed,
// a genuine cover is one with covering_multiplicity >= 1
struct Cover {
    std::vector<AtomSet> sets;
    std::vector<RootSum> weights; // empty means unweighted

    Cover() = default;
    Cover(std::vector<AtomSet> s, std::vector<RootSum> w = {})
        : sets(std::move(s)), weights(std::move(w)) {
        if (sets.empty()) throw std::invalid_argument("Cover: needs at least one entry");
        for (const auto& a : sets)
            if (a.n_atoms() != sets[0].n_atoms())
                throw std::invalid_argument("Cover: mixed ground sets");
        if (!weights.empty() && weights.size() != sets.size())
            throw std::invalid_argument("Cover: weight count mismatch");
        for (const auto& w : weights)
            if (w.sign() < 0) throw std::invalid_argument("Cover: negative weight");
    }

    GroundSet ground() const { return sets.at(0).ground(); }
    std::size_t size() const { return sets.size(); }
};

struct Partition {
    std::vector<AtomSet> blocks;

    Partition() = default;
    explicit Partition(std::vector<AtomSet> b) : blocks(std::move(b)) {
        if (blocks.empty()) throw std::invalid_argument("Partition: no blocks");
        GroundSet g = blocks[0].ground();
        AtomSet seen = AtomSet::empty_set(g);
        for (const auto& blk : blocks) {
            if (blk.ground() != g) throw std::invalid_argument("Partition: mixed ground sets");
            if (blk.empty()) throw std::invalid_argument("Partition: empty block");
            if (!(seen & blk).empty()) throw std::invalid_argument("Partition: overlapping blocks");
            seen |= blk;
        }
        if (seen != AtomSet::full_set(g))
            throw std::invalid_argument("Partition: blocks do not exhaust the ground set");
    }

    GroundSet ground() const { return blocks.at(0).ground(); }
    std::size_t size() const { return blocks.size(); }
};

inline Partition singleton_partition(GroundSet g) {
    std::vector<AtomSet> blocks;
    for (int a = 0; a < g.n_atoms; ++a) blocks.push_back(AtomSet::singleton(g, a));
    return Partition(std::move(blocks));
}

inline int hit_count(const Cover& c, int atom) {
    int k = 0;
    for (const auto& s : c.sets) k += s.contains(atom);
    return k;
}

// min over atoms of the number of entries containing it; 0 if some atom is uncovered
inline int covering_multiplicity(const Cover& c) {
    GroundSet g = c.ground();
    int k = std::numeric_limits<int>::max();
    for (int a = 0; a < g.n_atoms; ++a) k = std::min(k, hit_count(c, a));
    return k;
}

inline bool is_uniform(const Cover& c) {
    GroundSet g = c.ground();
    int t = hit_count(c, 0);
    for (int a = 1; a < g.n_atoms; ++a)
        if (hit_count(c, a) != t) return false;
    return true;
}

// shrinks each entry so that every atom is hit exactly k times, k the
// multiplicity of the input; each atom keeps its k lowest containing indices
inline Cover uniform_refinement(const Cover& c) {
    int k = covering_multiplicity(c);
    if (k < 1) throw std::invalid_argument("uniform_refinement: input is not a cover");
    GroundSet g = c.ground();
    std::vector<Bits> out(c.size(), 0);
    for (int a = 0; a < g.n_atoms; ++a) {
        int kept = 0;
        for (std::size_t i = 0; i < c.size() && kept < k; ++i)
            if (c.sets[i].contains(a)) {
                out[i] |= Bits(1) << a;
                ++kept;
            }
    }
    std::vector<AtomSet> sets;
    sets.reserve(c.size());
    for (auto bits : out) sets.emplace_back(g, bits);
    return Cover(std::move(sets), c.weights);
}

template <typename W>
struct MinCoverResult {
    bool feasible = false;
    W weight{};
    std::vector<int> chosen; // indices into the candidate list, ascending
};

namespace detail {

template <typename W>
struct MinCoverSearch {
    const std::vector<Bits>& sets;
    const std::vector<W>& weights;
    Bits target;
    std::vector<W> atom_min; // cheapest single set covering each target atom
    W best_weight{};
    bool have_best = false;
    std::vector<int> best_chosen;
    std::vector<int> chosen;

    void run() {
        dfs(0, W{});
    }

    void dfs(Bits covered, W acc) {
        Bits missing = target & ~covered;
        if (!missing) {
            if (!have_best || acc < best_weight) {
                best_weight = acc;
                best_chosen = chosen;
                have_best = true;
            }
            return;
        }
        if (have_best) {
            // any completion pays at least the cheapest cover of the scarcest atom
            W lb{};
            for (Bits b = missing; b; b &= b - 1) {
                const W& am = atom_min[countr_zero128(b)];
                if (lb < am) lb = am;
            }
            W reach = acc;
            reach += lb;
            if (!(reach < best_weight)) return;
        }
        // branch on the uncovered atom with fewest candidates
        int pick = -1, pick_cands = std::numeric_limits<int>::max();
        for (Bits b = missing; b; b &= b - 1) {
            int a = countr_zero128(b);
            int cands = 0;
            for (std::size_t i = 0; i < sets.size(); ++i)
                if ((sets[i] >> a) & 1) ++cands;
            if (cands < pick_cands) { pick_cands = cands; pick = a; }
        }
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (!((sets[i] >> pick) & 1)) continue;
            W next = acc;
            next += weights[i];
            if (have_best && !(next < best_weight)) continue;
            chosen.push_back((int)i);
            dfs(covered | sets[i], next);
            chosen.pop_back();
        }
    }
};

} // namespace detail

// exact minimum-weight cover of `target` by a sub-collection of `candidates`;
// infeasible result when the candidates cannot cover the target
template <typename W>
MinCoverResult<W> min_weight_cover(const AtomSet& target,
                                   const std::vector<AtomSet>& candidates,
                                   const std::vector<W>& weights) {
    if (candidates.size() != weights.size())
        throw std::invalid_argument("min_weight_cover: weight count mismatch");
    MinCoverResult<W> res;
    if (target.empty()) {
        res.feasible = true;
        return res;
    }
    Bits t = target.bits();
    Bits all = 0;
    for (const auto& s : candidates) all |= s.bits();
    if (t & ~all) return res; // infeasible

    // restrict to candidates that meet the target
    std::vector<Bits> sets;
    std::vector<W> w;
    std::vector<int> orig;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Bits inter = candidates[i].bits() & t;
        if (!inter) continue;
        sets.push_back(inter);
        w.push_back(weights[i]);
        orig.push_back((int)i);
    }

    detail::MinCoverSearch<W> search{sets, w, t, {}, {}, false, {}, {}};
    search.atom_min.resize(kMaxAtoms + 1);
    for (Bits b = t; b; b &= b - 1) {
        int a = countr_zero128(b);
        bool first = true;
        for (std::size_t i = 0; i < sets.size(); ++i)
            if ((sets[i] >> a) & 1) {
                if (first || w[i] < search.atom_min[a]) search.atom_min[a] = w[i];
                first = false;
            }
    }
    // greedy seed: repeatedly take the cheapest set covering the scarcest atom
    {
        Bits covered = 0;
        W acc{};
        std::vector<int> picks;
        while ((t & ~covered) != 0) {
            int a = countr_zero128(t & ~covered);
            int bi = -1;
            for (std::size_t i = 0; i < sets.size(); ++i)
                if ((sets[i] >> a) & 1 && (bi < 0 || w[i] < w[bi])) bi = (int)i;
            picks.push_back(bi);
            acc += w[bi];
            covered |= sets[bi];
        }
        search.best_weight = acc;
        search.best_chosen = picks;
        search.have_best = true;
    }
    search.run();
    res.feasible = true;
    res.weight = search.best_weight;
    for (int i : search.best_chosen) res.chosen.push_back(orig[i]);
    std::sort(res.chosen.begin(), res.chosen.end());
    return res;
}

// coarsest partition finer than both; blocks ordered by (index in p, index in q)
inline Partition refine_partitions(const Partition& p, const Partition& q) {
    if (p.ground() != q.ground())
        throw std::invalid_argument("refine_partitions: mixed ground sets");
    std::vector<AtomSet> blocks;
    for (const auto& bp : p.blocks)
        for (const auto& bq : q.blocks) {
            AtomSet inter = bp & bq;
            if (!inter.empty()) blocks.push_back(inter);
        }
    return Partition(std::move(blocks));
}

// true when every block of `finer` lies inside a block of `coarser`
inline bool is_refinement(const Partition& coarser, const Partition& finer) {
    if (coarser.ground() != finer.ground()) return false;
    for (const auto& b : finer.blocks) {
        bool inside = false;
        for (const auto& c : coarser.blocks)
            if (b.subset_of(c)) { inside = true; break; }
        if (!inside) return false;
    }
    return true;
}

} // namespace smlab
