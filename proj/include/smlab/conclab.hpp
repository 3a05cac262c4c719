#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "smlab/covnum.hpp"
#include "smlab/entropy.hpp"
#include "smlab/metric.hpp"
#include "smlab/rng.hpp"

namespace smlab {

inline constexpr int kAlphaExactPointLimit = 16;

// built-in observables with constructive Lipschitz certificates; arbitrary
// functions are confined to explore mode where no bound column is produced
struct LipschitzSelector {
    enum class Kind { coordinate_mean, weighted_sum, dist_to_point };
    Kind kind = Kind::coordinate_mean;
    std::vector<double> u;                // weighted_sum coefficients
    std::vector<std::uint32_t> anchor;    // dist_to_point reference
};

struct Scenario {
    int n = 1;
    std::vector<int> alphabet;    // symbols per index
    ProductDist dists;
    Cover cover;                  // weighted
    LipschitzSelector f;
    std::vector<double> r_grid;
    long trials = 0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("Scenario: n must be positive");
        if ((int)alphabet.size() != n || (int)dists.n() != n)
            throw std::invalid_argument("Scenario: alphabet/distribution count mismatch");
        for (int j = 0; j < n; ++j) {
            if (alphabet[j] < 2) throw std::invalid_argument("Scenario: alphabet too small");
            if ((int)dists.factors[j].size() != alphabet[j])
                throw std::invalid_argument("Scenario: distribution width mismatch");
        }
        if (cover.ground().n_atoms != n)
            throw std::invalid_argument("Scenario: cover indexes the wrong set");
        if (cover.weights.empty())
            throw std::invalid_argument("Scenario: cover carries no weights");
    }
};

// returns an explanation when the selector cannot be certified 1-Lipschitz
// for the scenario's weighted cover
inline std::optional<std::string> certify_lipschitz(const Scenario& s) {
    switch (s.f.kind) {
        case LipschitzSelector::Kind::dist_to_point: {
            if ((int)s.f.anchor.size() != s.n)
                return "dist_to_point anchor has the wrong length";
            return std::nullopt; // triangle inequality
        }
        case LipschitzSelector::Kind::coordinate_mean: {
            if ((int)s.cover.size() != s.n) return "coordinate_mean needs the singleton cover";
            for (int j = 0; j < s.n; ++j) {
                if (!(s.cover.sets[j] == AtomSet::singleton(s.cover.ground(), j)))
                    return "coordinate_mean needs the singleton cover in index order";
                if (!(s.cover.weights[j] == RootSum(Rat(1, s.n))))
                    return "coordinate_mean needs uniform weights 1/n";
            }
            return std::nullopt;
        }
        case LipschitzSelector::Kind::weighted_sum: {
            if ((int)s.f.u.size() != s.n) return "weighted_sum coefficients have the wrong length";
            for (double c : s.f.u)
                if (c < 0) return "weighted_sum coefficients must be nonnegative";
            for (std::size_t i = 0; i < s.cover.size(); ++i) {
                Rat inside = 0;
                for (int j : s.cover.sets[i].atoms()) inside += Rat(s.f.u[j]);
                if ((RootSum(inside) - s.cover.weights[i]).sign() > 0)
                    return "weighted_sum coefficients exceed a cover weight";
            }
            return std::nullopt;
        }
    }
    return "unknown selector";
}

namespace detail {

struct SelectorEval {
    const Scenario& s;
    std::vector<double> wfp;
    bool singleton_cover = false;

    explicit SelectorEval(const Scenario& sc) : s(sc) {
        for (const auto& w : s.cover.weights) wfp.push_back(to_double(w));
        singleton_cover = (int)s.cover.size() == s.n;
        if (singleton_cover)
            for (int j = 0; j < s.n; ++j)
                singleton_cover =
                    singleton_cover && s.cover.sets[j] == AtomSet::singleton(s.cover.ground(), j);
    }

    double normalized(int j, std::uint32_t symbol) const {
        return s.alphabet[j] > 1 ? (double)symbol / (s.alphabet[j] - 1) : 0.0;
    }

    double operator()(const std::vector<std::uint32_t>& x) const {
        switch (s.f.kind) {
            case LipschitzSelector::Kind::coordinate_mean: {
                double acc = 0;
                for (int j = 0; j < s.n; ++j) acc += normalized(j, x[j]);
                return acc / s.n;
            }
            case LipschitzSelector::Kind::weighted_sum: {
                double acc = 0;
                for (int j = 0; j < s.n; ++j) acc += s.f.u[j] * normalized(j, x[j]);
                return acc;
            }
            case LipschitzSelector::Kind::dist_to_point: {
                if (singleton_cover) {
                    double acc = 0;
                    for (int j = 0; j < s.n; ++j)
                        if (x[j] != s.f.anchor[j]) acc += wfp[j];
                    return acc;
                }
                ProductPoint a{std::vector<std::uint32_t>(s.f.anchor)};
                ProductPoint b{std::vector<std::uint32_t>(x)};
                return dist_cover_fp(a, b, s.cover, wfp);
            }
        }
        return 0;
    }
};

} // namespace detail

struct McRow {
    double r = 0;
    long long count = 0;
    double empirical = 0;
    double ci_lo = 0, ci_hi = 0; // Wilson score, z = 1.96
    double bound = 1;            // exp(-k r^2 / (4 |w|^2))
};

struct McTailResult {
    long long trials = 0;
    double mean = 0;
    int k = 0;
    double w_norm2 = 0;
    std::vector<McRow> rows;
    std::string rng_name;
    std::uint64_t seed = 0;
    int threads = 1;
};

// seeded Monte Carlo estimate of the upper tail of a certified 1-Lipschitz
// observable; identical scenario and seed give identical results for any
// worker count (fixed chunk streams, fixed reduction order)
inline McTailResult mc_tail(const Scenario& s, int threads = 1) {
    s.validate();
    if (s.trials < 100)
        throw std::invalid_argument("mc_tail: needs at least 100 trials for meaningful intervals");
    if (auto why = certify_lipschitz(s))
        throw std::invalid_argument("mc_tail: selector not certified: " + *why);
    int k = covering_multiplicity(s.cover);
    if (k < 1) throw std::invalid_argument("mc_tail: the cover must be a genuine cover");

    detail::SelectorEval eval(s);
    const long long T = s.trials;
    const int chunks = (int)std::min<long long>(64, T);
    std::vector<double> values((std::size_t)T);

    // per-index cumulative distributions
    std::vector<std::vector<double>> cum(s.n);
    for (int j = 0; j < s.n; ++j) {
        double acc = 0;
        for (double p : s.dists.factors[j].p) {
            acc += p;
            cum[j].push_back(acc);
        }
        cum[j].back() = 1.0;
    }

    auto run_chunk = [&](int c) {
        long long lo = T * c / chunks, hi = T * (c + 1) / chunks;
        Rng rng(s.seed, (std::uint64_t)c);
        std::vector<std::uint32_t> x((std::size_t)s.n);
        for (long long t = lo; t < hi; ++t) {
            for (int j = 0; j < s.n; ++j) {
                double u = rng.uniform();
                std::uint32_t sym = 0;
                while (sym + 1 < cum[j].size() && u >= cum[j][sym]) ++sym;
                x[j] = sym;
            }
            values[(std::size_t)t] = eval(x);
        }
    };

    int workers = std::max(1, std::min(threads, chunks));
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    int c = next.fetch_add(1);
                    if (c >= chunks) return;
                    run_chunk(c);
                }
            });
        for (auto& th : pool) th.join();
    }

    McTailResult res;
    res.trials = T;
    res.k = k;
    res.seed = s.seed;
    res.rng_name = Rng::name();
    res.threads = workers;
    for (double w : eval.wfp) res.w_norm2 += w * w;

    detail::Kahan mean;
    for (double v : values) mean.add(v);
    res.mean = mean.sum / (double)T;

    const double z = 1.96;
    for (double r : s.r_grid) {
        McRow row;
        row.r = r;
        for (double v : values)
            if (v - res.mean >= r) ++row.count;
        double phat = (double)row.count / (double)T;
        row.empirical = phat;
        double denom = 1 + z * z / (double)T;
        double center = (phat + z * z / (2.0 * T)) / denom;
        double half = z * std::sqrt(phat * (1 - phat) / (double)T + z * z / (4.0 * T * T)) / denom;
        row.ci_lo = std::max(0.0, center - half);
        row.ci_hi = std::min(1.0, center + half);
        row.bound = r > 0 ? tail_bound(k, eval.wfp, r).lipschitz_tail : 1.0;
        res.rows.push_back(row);
    }
    return res;
}

// finite metric measure space with exact masses and distances
struct FiniteMmSpace {
    std::vector<Rat> mass;
    std::vector<std::vector<RootSum>> dist;

    std::size_t points() const { return mass.size(); }
    void validate() const {
        if (mass.empty() || dist.size() != mass.size())
            throw std::invalid_argument("FiniteMmSpace: shape mismatch");
        for (const auto& row : dist)
            if (row.size() != mass.size())
                throw std::invalid_argument("FiniteMmSpace: shape mismatch");
    }
};

// full product space of a scenario, exact masses and weighted-cover distances
inline FiniteMmSpace scenario_space(const Scenario& s) {
    s.validate();
    std::size_t pts = s.dists.points();
    if (pts > kAlphaExactPointLimit)
        throw limit_error("scenario_space: product too large for exhaustive treatment");
    FiniteMmSpace sp;
    sp.mass.resize(pts);
    sp.dist.assign(pts, std::vector<RootSum>(pts));
    std::vector<ProductPoint> points;
    for (std::size_t i = 0; i < pts; ++i) {
        auto c = s.dists.decode(i);
        sp.mass[i] = s.dists.mass_exact(c);
        points.emplace_back(std::move(c));
    }
    for (std::size_t i = 0; i < pts; ++i)
        for (std::size_t j = i + 1; j < pts; ++j) {
            RootSum d = dist_cover(points[i], points[j], s.cover);
            sp.dist[i][j] = d;
            sp.dist[j][i] = d;
        }
    return sp;
}

struct AlphaExactResult {
    Rat alpha;                  // 1 - min mass of an eps-enlargement
    std::uint32_t witness = 0;  // minimizing half-mass set
    std::size_t points = 0;
};

// exact concentration function by sweeping every subset of a small space;
// balls use the strict inequality d < eps
inline AlphaExactResult alpha_exact(const FiniteMmSpace& sp, const RootSum& eps) {
    sp.validate();
    if (eps.sign() <= 0) throw std::invalid_argument("alpha_exact: eps must be positive");
    std::size_t m = sp.points();
    if (m > kAlphaExactPointLimit)
        throw limit_error("alpha_exact: too many points, use the sampled estimator");

    std::vector<std::uint32_t> nbr(m, 0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t x = 0; x < m; ++x)
            if (sp.dist[a][x] < eps) nbr[a] |= std::uint32_t(1) << x;

    Int denom = 1;
    for (const Rat& q : sp.mass) denom = lcm_int(denom, denominator(q));
    std::vector<Int> numer(m);
    Int total = 0;
    for (std::size_t i = 0; i < m; ++i) {
        numer[i] = numerator(sp.mass[i]) * (denom / denominator(sp.mass[i]));
        total += numer[i];
    }

    const std::uint32_t full = m == 32 ? 0xffffffffu : ((std::uint32_t(1) << m) - 1);
    std::vector<Int> setmass(std::size_t(full) + 1);
    setmass[0] = 0;
    for (std::uint32_t sset = 1; sset <= full; ++sset) {
        std::uint32_t low = sset & (~sset + 1);
        setmass[sset] = setmass[sset ^ low] + numer[std::countr_zero(low)];
    }

    std::optional<Int> best;
    std::uint32_t witness = 0;
    for (std::uint32_t a = 1; a <= full; ++a) {
        if (2 * setmass[a] < total) continue; // mass below one half
        std::uint32_t ball = 0;
        for (std::uint32_t b = a; b;) {
            std::uint32_t low = b & (~b + 1);
            ball |= nbr[std::countr_zero(low)];
            b ^= low;
        }
        if (!best || setmass[ball] < *best) {
            best = setmass[ball];
            witness = a;
        }
    }
    AlphaExactResult res;
    res.points = m;
    res.witness = witness;
    res.alpha = best ? Rat(1) - Rat(*best, total) : Rat(0);
    if (res.alpha < 0 || res.alpha > Rat(1, 2))
        throw std::logic_error("alpha_exact: result escaped [0, 1/2]");
    return res;
}

inline AlphaExactResult alpha_exact(const Scenario& s, const RootSum& eps) {
    return alpha_exact(scenario_space(s), eps);
}

// candidate-family estimate of the concentration function; restricting the
// infimum to sampled candidates can only shrink the reported value, so this
// is a lower-bound style estimate and is flagged as such
struct AlphaSampledResult {
    double alpha = 0;           // 1 - smallest candidate enlargement mass
    double min_ball_mass = 1;
    double ci_half = 0;         // binomial CI at the minimizing candidate
    std::size_t candidates = 0;
    bool exact_candidates = false; // candidate values computed exactly
    bool lower_bound_estimate = true;
};

inline AlphaSampledResult alpha_sampled(const Scenario& s, const RootSum& eps,
                                        int family_budget, std::uint64_t seed) {
    s.validate();
    if (family_budget < 1)
        throw std::invalid_argument("alpha_sampled: family budget must be positive");
    if (eps.sign() <= 0) throw std::invalid_argument("alpha_sampled: eps must be positive");
    AlphaSampledResult res;

    std::size_t pts = 1;
    bool small = true;
    for (int j = 0; j < s.n && small; ++j) {
        pts *= s.alphabet[j];
        small = pts <= kAlphaExactPointLimit;
    }

    if (small) {
        // evaluate candidate sets exactly: thresholds of f plus cylinders
        FiniteMmSpace sp = scenario_space(s);
        detail::SelectorEval eval(s);
        std::size_t m = sp.points();
        std::vector<double> fval(m);
        for (std::size_t i = 0; i < m; ++i) fval[i] = eval(s.dists.decode(i));
        std::vector<std::uint32_t> nbr(m, 0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t x = 0; x < m; ++x)
                if (sp.dist[a][x] < eps) nbr[a] |= std::uint32_t(1) << x;
        Int denom = 1;
        for (const Rat& q : sp.mass) denom = lcm_int(denom, denominator(q));
        std::vector<Int> numer(m);
        Int total = 0;
        for (std::size_t i = 0; i < m; ++i) {
            numer[i] = numerator(sp.mass[i]) * (denom / denominator(sp.mass[i]));
            total += numer[i];
        }
        auto mass_of = [&](std::uint32_t mask) {
            Int acc = 0;
            for (std::uint32_t b = mask; b;) {
                std::uint32_t low = b & (~b + 1);
                acc += numer[std::countr_zero(low)];
                b ^= low;
            }
            return acc;
        };
        auto ball_of = [&](std::uint32_t mask) {
            std::uint32_t ball = 0;
            for (std::uint32_t b = mask; b;) {
                std::uint32_t low = b & (~b + 1);
                ball |= nbr[std::countr_zero(low)];
                b ^= low;
            }
            return ball;
        };
        std::vector<std::uint32_t> cands;
        // lower threshold sets of f
        for (std::size_t i = 0; i < m; ++i) {
            std::uint32_t mask = 0;
            for (std::size_t x = 0; x < m; ++x)
                if (fval[x] <= fval[i]) mask |= std::uint32_t(1) << x;
            cands.push_back(mask);
            cands.push_back(~mask & ((m == 32 ? 0xffffffffu : ((std::uint32_t(1) << m) - 1))));
        }
        // single-coordinate cylinders
        for (int j = 0; j < s.n; ++j)
            for (int v = 0; v < s.alphabet[j]; ++v) {
                std::uint32_t mask = 0;
                for (std::size_t x = 0; x < m; ++x)
                    if (s.dists.decode(x)[(std::size_t)j] == (std::uint32_t)v)
                        mask |= std::uint32_t(1) << x;
                cands.push_back(mask);
            }
        std::optional<Int> bestball;
        for (std::uint32_t mask : cands) {
            if (!mask) continue;
            if (2 * mass_of(mask) < total) continue;
            Int bm = mass_of(ball_of(mask));
            if (!bestball || bm < *bestball) bestball = bm;
            ++res.candidates;
        }
        res.exact_candidates = true;
        if (bestball) {
            res.min_ball_mass = to_double(Rat(*bestball, total));
            res.alpha = to_double(Rat(1) - Rat(*bestball, total));
        } else {
            res.min_ball_mass = 1;
            res.alpha = 0;
        }
        return res;
    }

    // large spaces: cylinder candidates with exact masses, ball masses by MC
    struct Cylinder {
        std::vector<std::pair<int, std::uint32_t>> fixed; // (index, symbol)
    };
    std::vector<Cylinder> cands;
    for (int j = 0; j < s.n; ++j)
        for (int v = 0; v < s.alphabet[j]; ++v)
            if (s.dists.factors[j].p_exact[(std::size_t)v] >= Rat(1, 2))
                cands.push_back({{{j, (std::uint32_t)v}}});
    Rng crng(seed, 0xC0FFEE);
    while ((int)cands.size() < family_budget) {
        Cylinder cyl;
        Rat mass = 1;
        for (int tries = 0; tries < 2 * s.n; ++tries) {
            int j = (int)crng.below((std::uint64_t)s.n);
            bool used = false;
            for (auto& [jj, vv] : cyl.fixed) used = used || jj == j;
            if (used) continue;
            // keep the heaviest symbol so the cylinder can stay above half mass
            std::uint32_t best_v = 0;
            for (std::uint32_t v = 1; v < (std::uint32_t)s.alphabet[j]; ++v)
                if (s.dists.factors[j].p_exact[v] > s.dists.factors[j].p_exact[best_v]) best_v = v;
            Rat next = mass * s.dists.factors[j].p_exact[best_v];
            if (next < Rat(1, 2)) break;
            cyl.fixed.emplace_back(j, best_v);
            mass = next;
        }
        if (cyl.fixed.empty()) break;
        cands.push_back(std::move(cyl));
        if (cands.size() > 4096) break;
    }
    if (cands.empty()) {
        res.alpha = 0;
        res.candidates = 0;
        return res;
    }

    std::vector<std::vector<double>> cum(s.n);
    for (int j = 0; j < s.n; ++j) {
        double acc = 0;
        for (double p : s.dists.factors[j].p) {
            acc += p;
            cum[j].push_back(acc);
        }
        cum[j].back() = 1.0;
    }
    const long mc = 20000;
    double best_mass = 1;
    std::size_t kept = 0;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const Cylinder& cyl = cands[ci];
        // exact candidate mass must reach one half
        Rat mass = 1;
        for (auto& [j, v] : cyl.fixed) mass *= s.dists.factors[j].p_exact[v];
        if (mass < Rat(1, 2)) continue;
        ++kept;
        // membership in the eps-ball: cover the mismatched fixed indices
        GroundSet g = s.cover.ground();
        std::unordered_map<Bits, bool, BitsHash> memo;
        auto in_ball = [&](const std::vector<std::uint32_t>& x) {
            Bits mismatch = 0;
            for (auto& [j, v] : cyl.fixed)
                if (x[(std::size_t)j] != v) mismatch |= Bits(1) << j;
            if (!mismatch) return true;
            auto it = memo.find(mismatch);
            if (it != memo.end()) return it->second;
            auto mw = min_weight_cover(AtomSet(g, mismatch), s.cover.sets, s.cover.weights);
            bool in = mw.feasible && mw.weight < eps;
            memo.emplace(mismatch, in);
            return in;
        };
        Rng rng(seed, 0xA11CE + ci);
        long hits = 0;
        std::vector<std::uint32_t> x((std::size_t)s.n);
        for (long t = 0; t < mc; ++t) {
            for (int j = 0; j < s.n; ++j) {
                double u = rng.uniform();
                std::uint32_t sym = 0;
                while (sym + 1 < cum[j].size() && u >= cum[j][sym]) ++sym;
                x[j] = sym;
            }
            if (in_ball(x)) ++hits;
        }
        double est = (double)hits / mc;
        // the ball always contains the candidate itself, whose mass is exact
        est = std::max(est, to_double(mass));
        if (est < best_mass) {
            best_mass = est;
            res.ci_half = 1.96 * std::sqrt(est * (1 - est) / mc);
        }
    }
    res.candidates = kept;
    res.min_ball_mass = best_mass;
    res.alpha = 1 - best_mass;
    return res;
}

// one row per partition of a refining chain: the concentration function of
// the induced block space (exact when small) next to the certificate-backed
// exponential bound
struct ProbeRow {
    std::size_t blocks = 0;
    bool exact = false;
    double alpha = 0;
    Rat alpha_exact_value;
    double bound = 1;
    long long cert_hits = 0;   // k of the certificate sequence
    long long cert_length = 0; // m of the certificate sequence
    double xi = 0;             // threshold the certificate family used
    bool family_truncated = false;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    double epsilon = 0;
};

inline ProbeReport covering_concentration_probe(const Submeasure& phi,
                                                const std::vector<Partition>& chain,
                                                const RootSum& eps, std::uint64_t seed) {
    if (chain.empty()) throw std::invalid_argument("probe: empty chain");
    for (std::size_t i = 1; i < chain.size(); ++i)
        if (!is_refinement(chain[i - 1], chain[i]))
            throw std::invalid_argument("probe: chain is not refining");
    for (const auto& part : chain)
        if (part.ground() != phi.ground())
            throw std::invalid_argument("probe: partition over the wrong ground set");

    ProbeReport rep;
    rep.epsilon = eps.to_double();
    for (std::size_t pi = 0; pi < chain.size(); ++pi) {
        const Partition& part = chain[pi];
        std::size_t q = part.size();
        ProbeRow row;
        row.blocks = q;

        // distances on the block space depend only on the flip pattern
        if (q <= 4) {
            std::size_t m = std::size_t(1) << q;
            std::vector<RootSum> flip(m);
            for (std::size_t pat = 0; pat < m; ++pat) {
                AtomSet u = AtomSet::empty_set(phi.ground());
                for (std::size_t b = 0; b < q; ++b)
                    if ((pat >> b) & 1) u |= part.blocks[b];
                flip[pat] = phi(u);
            }
            FiniteMmSpace sp;
            sp.mass.assign(m, Rat(1, (long)m));
            sp.dist.assign(m, std::vector<RootSum>(m));
            for (std::size_t x = 0; x < m; ++x)
                for (std::size_t y = 0; y < m; ++y) sp.dist[x][y] = flip[x ^ y];
            auto a = alpha_exact(sp, eps);
            row.exact = true;
            row.alpha_exact_value = a.alpha;
            row.alpha = to_double(a.alpha);
        } else {
            // fair two-point blocks: half-space candidates have closed form,
            // the nearest point of the half-space differs in one block
            bool any_far = false;
            for (const auto& b : part.blocks)
                if (!(phi(b) < eps)) any_far = true;
            row.exact = false;
            row.alpha = any_far ? 0.5 : 0.0;
        }

        // certificate bound: unions of blocks below the coarsest block value
        RootSum xi;
        for (const auto& b : part.blocks) {
            RootSum v = phi(b);
            if (xi < v) xi = v;
        }
        if (xi.sign() <= 0) xi = RootSum(Rat(1));
        row.xi = xi.to_double();
        if (q <= kSubsetSweepLimit) {
            GroundSet bg((int)q);
            std::vector<AtomSet> fam;
            std::vector<RootSum> weights; // weight of each family set under phi
            for (std::uint64_t mask = 0; mask <= bg.full_mask64(); ++mask) {
                AtomSet u = AtomSet::empty_set(phi.ground());
                for (std::size_t b = 0; b < q; ++b)
                    if ((mask >> b) & 1) u |= part.blocks[b];
                if (phi(u) <= xi) fam.emplace_back(bg, mask);
            }
            auto cert = covering_number(bg, fam);
            row.cert_hits = cert.primal_hits;
            row.cert_length = cert.primal_length;
            double sum_sq = 0;
            for (const auto& [setb, mult] : cert.primal) {
                AtomSet u = AtomSet::empty_set(phi.ground());
                for (int b : setb.atoms()) u |= part.blocks[(std::size_t)b];
                double w = phi(u).to_double();
                sum_sq += (double)mult * w * w;
            }
            double e = eps.to_double();
            row.bound = sum_sq > 0 ? std::exp(-(double)cert.primal_hits * e * e / (8 * sum_sq))
                                   : 1.0;
        } else {
            // single blocks are always a 1-cover
            row.family_truncated = true;
            row.cert_hits = 1;
            row.cert_length = (long long)q;
            double sum_sq = 0;
            for (const auto& b : part.blocks) {
                double w = phi(b).to_double();
                sum_sq += w * w;
            }
            double e = eps.to_double();
            row.bound = sum_sq > 0 ? std::exp(-e * e / (8 * sum_sq)) : 1.0;
        }
        rep.rows.push_back(row);
    }
    (void)seed;
    return rep;
}

// finite tree of labelings: levels M_1..M_k of children, thresholds d_1..d_k
struct TreeSpec {
    std::vector<int> M;
    std::vector<double> d;

    int depth() const { return (int)M.size(); }
    long long leaves() const {
        long long t = 1;
        for (int m : M) t *= m;
        return t;
    }
    long long nodes_at(int level) const {
        long long t = 1;
        for (int i = 0; i < level; ++i) t *= M[i];
        return t;
    }
    void validate() const {
        if (M.empty() || M.size() != d.size())
            throw std::invalid_argument("TreeSpec: level/threshold mismatch");
        for (int m : M)
            if (m < 2) throw std::invalid_argument("TreeSpec: level sizes must be >= 2");
        for (double t : d)
            if (!(t > 0)) throw std::invalid_argument("TreeSpec: thresholds must be positive");
    }
};

// labels for every node, level by level; level k holds the leaves
using TreeLabeling = std::vector<std::vector<std::uint8_t>>;

// majority-style extension: a node is 1 when strictly more than half of its
// children are 1
inline TreeLabeling ybar_extension(std::uint32_t leaf_bits, const TreeSpec& spec) {
    spec.validate();
    int k = spec.depth();
    TreeLabeling lab((std::size_t)k + 1);
    long long nl = spec.leaves();
    lab[(std::size_t)k].resize((std::size_t)nl);
    for (long long t = 0; t < nl; ++t) lab[(std::size_t)k][(std::size_t)t] = (leaf_bits >> t) & 1;
    for (int i = k - 1; i >= 0; --i) {
        long long cnt = spec.nodes_at(i);
        lab[(std::size_t)i].resize((std::size_t)cnt);
        for (long long idx = 0; idx < cnt; ++idx) {
            int ones = 0;
            for (int j = 0; j < spec.M[(std::size_t)i]; ++j)
                ones += lab[(std::size_t)i + 1][(std::size_t)(idx * spec.M[(std::size_t)i] + j)];
            lab[(std::size_t)i][(std::size_t)idx] = (2 * ones > spec.M[(std::size_t)i]) ? 1 : 0;
        }
    }
    return lab;
}

// shifted-threshold extension: a node is 0 when its count of 1-children stays
// below M/2 + d
inline TreeLabeling yhat_extension(std::uint32_t leaf_bits, const TreeSpec& spec) {
    spec.validate();
    int k = spec.depth();
    TreeLabeling lab((std::size_t)k + 1);
    long long nl = spec.leaves();
    lab[(std::size_t)k].resize((std::size_t)nl);
    for (long long t = 0; t < nl; ++t) lab[(std::size_t)k][(std::size_t)t] = (leaf_bits >> t) & 1;
    for (int i = k - 1; i >= 0; --i) {
        long long cnt = spec.nodes_at(i);
        lab[(std::size_t)i].resize((std::size_t)cnt);
        for (long long idx = 0; idx < cnt; ++idx) {
            int ones = 0;
            for (int j = 0; j < spec.M[(std::size_t)i]; ++j)
                ones += lab[(std::size_t)i + 1][(std::size_t)(idx * spec.M[(std::size_t)i] + j)];
            double threshold = spec.M[(std::size_t)i] / 2.0 + spec.d[(std::size_t)i];
            lab[(std::size_t)i][(std::size_t)idx] = ((double)ones < threshold) ? 0 : 1;
        }
    }
    return lab;
}

// relatedness: differing leaves must be covered by marked prefixes with
// fewer than d_{i+1} marks below any node; marking a node covers its whole
// subtree, so the greedy bottom-up propagation is exact
inline bool sim_related(std::uint32_t x_bits, std::uint32_t y_bits, const TreeSpec& spec) {
    spec.validate();
    if (x_bits == y_bits) return true;
    int k = spec.depth();
    long long nl = spec.leaves();
    std::vector<std::uint8_t> unhandled((std::size_t)nl);
    for (long long t = 0; t < nl; ++t)
        unhandled[(std::size_t)t] = ((x_bits ^ y_bits) >> t) & 1;
    for (int i = k - 1; i >= 0; --i) {
        long long cnt = spec.nodes_at(i);
        std::vector<std::uint8_t> up((std::size_t)cnt);
        for (long long idx = 0; idx < cnt; ++idx) {
            int marks = 0;
            for (int j = 0; j < spec.M[(std::size_t)i]; ++j)
                marks += unhandled[(std::size_t)(idx * spec.M[(std::size_t)i] + j)];
            up[(std::size_t)idx] = ((double)marks < spec.d[(std::size_t)i]) ? 0 : 1;
        }
        unhandled = std::move(up);
    }
    return unhandled[0] == 0;
}

struct ClaimMsdsResult {
    long long size_a = 0;
    long long size_b = 0;
    long long lower_bound = 0; // 2^{|T|-1}
    bool size_ok = false;
    bool inclusion_holds = false;
    bool inclusion_checked = false;
};

// brute-force verification of both halves of the tree-labeling claim
inline ClaimMsdsResult claim_msds_check(const TreeSpec& spec) {
    spec.validate();
    long long nl = spec.leaves();
    if (nl > 24) throw limit_error("claim_msds_check: too many leaves to enumerate");
    ClaimMsdsResult res;
    res.lower_bound = 1LL << (nl - 1);
    std::uint64_t all = (nl == 64) ? ~0ull : ((1ull << nl) - 1);
    std::vector<std::uint8_t> in_a, in_b;
    in_a.reserve(all + 1);
    in_b.reserve(all + 1);
    for (std::uint64_t y = 0; y <= all; ++y) {
        in_a.push_back(ybar_extension((std::uint32_t)y, spec)[0][0] == 0);
        in_b.push_back(yhat_extension((std::uint32_t)y, spec)[0][0] == 0);
        res.size_a += in_a.back();
        res.size_b += in_b.back();
    }
    res.size_ok = res.size_a >= res.lower_bound;
    long long total_nodes = 0;
    for (int i = 0; i <= spec.depth(); ++i) total_nodes += spec.nodes_at(i);
    if (nl <= 8 && total_nodes <= 13) {
        res.inclusion_checked = true;
        res.inclusion_holds = true;
        for (std::uint64_t x = 0; x <= all && res.inclusion_holds; ++x) {
            if (!in_a[x]) continue;
            for (std::uint64_t y = 0; y <= all; ++y) {
                if (in_b[y]) continue;
                if (sim_related((std::uint32_t)x, (std::uint32_t)y, spec)) {
                    res.inclusion_holds = false;
                    break;
                }
            }
        }
    }
    return res;
}

// evaluates the near-median binomial deviation bound: the exact left side
// against K(delta + (a - 1/2) sqrt(n) + 1/sqrt(n))
struct BerryEsseenBound {
    double rhs = 0;
    Rat lhs;               // P[ones < n/2 + delta sqrt(n)]
    bool lhs_available = false;
    bool verdict = false;  // lhs - 1/2 < rhs, strict
};

inline BerryEsseenBound berry_esseen_bound(double a, double delta, int n, double K) {
    if (!(a >= 0.5 && a <= 0.75))
        throw std::invalid_argument("berry_esseen_bound: a must lie in [1/2, 3/4]");
    if (delta < 0 || n < 1 || K < 1)
        throw std::invalid_argument("berry_esseen_bound: bad parameters");
    BerryEsseenBound out;
    out.rhs = K * (delta + (a - 0.5) * std::sqrt((double)n) + 1.0 / std::sqrt((double)n));
    if (n <= 2000) {
        Rat b = Rat(1) - Rat(a); // exact dyadic reading of the double
        double threshold = n / 2.0 + delta * std::sqrt((double)n);
        long long strict_below = (long long)std::ceil(threshold) - 1;
        if (strict_below >= n) {
            out.lhs = 1;
        } else if (strict_below < 0) {
            out.lhs = 0;
        } else {
            out.lhs = Rat(1) - binomial_tail_ge((unsigned)n, (unsigned)(strict_below + 1), b);
        }
        out.lhs_available = true;
        out.verdict = out.lhs - Rat(1, 2) < Rat(out.rhs);
    }
    return out;
}

} // namespace smlab
