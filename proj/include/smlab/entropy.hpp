#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "smlab/algebra.hpp"
#include "smlab/rational.hpp"

namespace smlab {

inline constexpr double kEntropySlackTol = 1e-9;

// finite probability vector; doubles for the entropy path, exact rationals
// kept alongside for the concentration-function path
struct FiniteDist {
    std::vector<double> p;
    std::vector<Rat> p_exact;

    FiniteDist() = default;
    explicit FiniteDist(std::vector<Rat> exact) : p_exact(std::move(exact)) {
        Rat sum = 0;
        for (const Rat& v : p_exact) {
            if (v < 0) throw std::invalid_argument("FiniteDist: negative mass");
            sum += v;
        }
        if (sum == 0) throw std::invalid_argument("FiniteDist: zero mass");
        for (Rat& v : p_exact) v /= sum;
        for (const Rat& v : p_exact) p.push_back(to_double(v));
    }
    explicit FiniteDist(const std::vector<double>& probs) {
        double sum = 0;
        for (double v : probs) {
            if (v < 0) throw std::invalid_argument("FiniteDist: negative mass");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("FiniteDist: probabilities must sum to 1");
        // read the doubles as exact dyadic rationals and renormalize
        Rat rsum = 0;
        for (double v : probs) {
            p_exact.emplace_back(v);
            rsum += p_exact.back();
        }
        for (Rat& v : p_exact) v /= rsum;
        p = probs;
    }

    static FiniteDist uniform(int n) {
        return FiniteDist(std::vector<Rat>((std::size_t)n, Rat(1, n)));
    }
    std::size_t size() const { return p.size(); }
};

struct ProductDist {
    std::vector<FiniteDist> factors;

    std::size_t n() const { return factors.size(); }
    std::size_t points() const {
        std::size_t t = 1;
        for (const auto& f : factors) t *= f.size();
        return t;
    }
    // mixed-radix decoding: index -> per-coordinate symbols
    std::vector<std::uint32_t> decode(std::size_t idx) const {
        std::vector<std::uint32_t> c(factors.size());
        for (std::size_t j = factors.size(); j-- > 0;) {
            c[j] = (std::uint32_t)(idx % factors[j].size());
            idx /= factors[j].size();
        }
        return c;
    }
    std::size_t encode(const std::vector<std::uint32_t>& c) const {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < factors.size(); ++j)
            idx = idx * factors[j].size() + c[j];
        return idx;
    }
    double mass(const std::vector<std::uint32_t>& c) const {
        double m = 1;
        for (std::size_t j = 0; j < factors.size(); ++j) m *= factors[j].p[c[j]];
        return m;
    }
    Rat mass_exact(const std::vector<std::uint32_t>& c) const {
        Rat m = 1;
        for (std::size_t j = 0; j < factors.size(); ++j) m *= factors[j].p_exact[c[j]];
        return m;
    }
};

namespace detail {

// compensated accumulation
struct Kahan {
    double sum = 0, carry = 0;
    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

inline double xlnx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

} // namespace detail

// Ent(f) = E[f ln f] - E[f] ln E[f] for f >= 0, with 0 ln 0 = 0
inline double ent(const std::vector<double>& f, const std::vector<double>& weights) {
    if (f.size() != weights.size()) throw std::invalid_argument("ent: size mismatch");
    detail::Kahan mean, flnf;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0) throw std::invalid_argument("ent: negative function value");
        mean.add(weights[i] * f[i]);
        flnf.add(weights[i] * detail::xlnx(f[i]));
    }
    if (mean.sum <= 0) return 0.0;
    return flnf.sum - detail::xlnx(mean.sum);
}

inline double ent(const std::vector<double>& f, const FiniteDist& mu) { return ent(f, mu.p); }

inline double ent_product(const std::vector<double>& f, const ProductDist& dist) {
    std::vector<double> w(dist.points());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = dist.mass(dist.decode(i));
    return ent(f, w);
}

struct SlackReport {
    double lhs = 0, rhs = 0;
    double slack() const { return rhs - lhs; }
    bool ok(double tol = kEntropySlackTol) const { return slack() >= -tol; }
};

// tensorized entropy bound over a uniform k-cover of the index set:
//   Ent(f) <= (1/k) sum_i E_z [ Ent(f conditioned on the block C_i) ]
// the cover must be uniform, otherwise the bound does not apply
inline SlackReport shearer_check(const std::vector<double>& f, const ProductDist& dist,
                                 const Cover& cover, int k) {
    GroundSet g = cover.ground();
    if ((std::size_t)g.n_atoms != dist.n())
        throw std::invalid_argument("shearer_check: cover and product disagree");
    if (!is_uniform(cover) || covering_multiplicity(cover) != k)
        throw std::invalid_argument("shearer_check: cover is not a uniform k-cover");
    if (f.size() != dist.points()) throw std::invalid_argument("shearer_check: table size");
    for (double v : f)
        if (v < 0) throw std::invalid_argument("shearer_check: f must be nonnegative");

    SlackReport rep;
    rep.lhs = ent_product(f, dist);

    detail::Kahan rhs;
    const std::size_t n = dist.n();
    for (const AtomSet& block : cover.sets) {
        // enumerate assignments of the complement z and condition on the block
        std::vector<std::size_t> inside, outside;
        for (std::size_t j = 0; j < n; ++j)
            (block.contains((int)j) ? inside : outside).push_back(j);
        std::size_t out_points = 1, in_points = 1;
        for (std::size_t j : outside) out_points *= dist.factors[j].size();
        for (std::size_t j : inside) in_points *= dist.factors[j].size();

        std::vector<std::uint32_t> coords(n, 0);
        for (std::size_t zi = 0; zi < out_points; ++zi) {
            std::size_t rest = zi;
            double zmass = 1;
            for (std::size_t idx = outside.size(); idx-- > 0;) {
                std::size_t j = outside[idx];
                coords[j] = (std::uint32_t)(rest % dist.factors[j].size());
                rest /= dist.factors[j].size();
                zmass *= dist.factors[j].p[coords[j]];
            }
            std::vector<double> fz(in_points), wz(in_points);
            for (std::size_t xi = 0; xi < in_points; ++xi) {
                std::size_t r = xi;
                double xmass = 1;
                for (std::size_t idx = inside.size(); idx-- > 0;) {
                    std::size_t j = inside[idx];
                    coords[j] = (std::uint32_t)(r % dist.factors[j].size());
                    r /= dist.factors[j].size();
                    xmass *= dist.factors[j].p[coords[j]];
                }
                fz[xi] = f[dist.encode(coords)];
                wz[xi] = xmass;
            }
            rhs.add(zmass * ent(fz, wz));
        }
    }
    rep.rhs = rhs.sum / k;
    return rep;
}

// squared-difference bound on the entropy of exp(f)
inline SlackReport ledoux_check(const std::vector<double>& f, const FiniteDist& mu) {
    if (f.size() != mu.size()) throw std::invalid_argument("ledoux_check: size mismatch");
    SlackReport rep;
    std::vector<double> ef(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) ef[i] = std::exp(f[i]);
    rep.lhs = ent(ef, mu);
    detail::Kahan rhs;
    for (std::size_t x = 0; x < f.size(); ++x)
        for (std::size_t y = 0; y < f.size(); ++y)
            if (f[x] >= f[y])
                rhs.add((f[x] - f[y]) * (f[x] - f[y]) * ef[x] * mu.p[y] * mu.p[x]);
    rep.rhs = rhs.sum;
    return rep;
}

// tail bounds for 1-Lipschitz functions over a weighted k-cover metric:
// the one-sided bound and the concentration-function bound
struct TailBound {
    double lipschitz_tail = 1; // exp(-k r^2 / (4 |w|^2))
    double alpha_bound = 1;    // exp(-k r^2 / (8 |w|^2))
    bool trivial = false;      // all-zero weights
};

inline TailBound tail_bound(long long k, const std::vector<double>& w, double r) {
    if (k < 1) throw std::invalid_argument("tail_bound: k must be >= 1");
    if (r <= 0) throw std::invalid_argument("tail_bound: r must be positive");
    double norm2 = 0;
    for (double v : w) norm2 += v * v;
    TailBound b;
    if (norm2 == 0) {
        b.trivial = true;
        return b;
    }
    b.lipschitz_tail = std::exp(-(double)k * r * r / (4 * norm2));
    b.alpha_bound = std::exp(-(double)k * r * r / (8 * norm2));
    return b;
}

// one row per lambda: the entropy hypothesis, the moment bound it should
// imply, and per-r Markov tails
struct HerbstRow {
    double lambda = 0;
    double ent_value = 0, ent_bound = 0;
    bool hypothesis = false;          // Ent(e^{lf}) <= (l^2 D / 2) E e^{lf}
    bool hypothesis_prefix = false;   // hypothesis held at every grid lambda' <= lambda
    double mgf_centered = 1, mgf_bound = 1;
    bool conclusion = false;          // E e^{l(f-Ef)} <= e^{l^2 D / 2}
    bool implication_violated = false;
};

struct HerbstTailRow {
    double r = 0;
    double tail = 0, bound = 1;
    bool ok = false;
};

struct HerbstReport {
    std::vector<HerbstRow> rows;
    std::vector<HerbstTailRow> tails;
    bool any_violation = false;  // hypothesis-prefix held but a conclusion failed
    bool jensen_ok = true;       // centered mgf never drops below 1
};

inline HerbstReport herbst_chain_check(const std::vector<double>& f, const ProductDist& dist,
                                       double D, const std::vector<double>& lambda_grid,
                                       const std::vector<double>& r_grid) {
    if (D <= 0) throw std::invalid_argument("herbst_chain_check: D must be positive");
    std::size_t pts = dist.points();
    if (f.size() != pts) throw std::invalid_argument("herbst_chain_check: table size");
    std::vector<double> w(pts);
    for (std::size_t i = 0; i < pts; ++i) w[i] = dist.mass(dist.decode(i));
    detail::Kahan meanf;
    for (std::size_t i = 0; i < pts; ++i) meanf.add(w[i] * f[i]);
    double ef = meanf.sum;

    HerbstReport rep;
    bool prefix = true;
    for (double lambda : lambda_grid) {
        if (lambda <= 0) throw std::invalid_argument("herbst_chain_check: lambda must be positive");
        HerbstRow row;
        row.lambda = lambda;
        std::vector<double> elf(pts);
        detail::Kahan mgf, centered;
        for (std::size_t i = 0; i < pts; ++i) {
            elf[i] = std::exp(lambda * f[i]);
            mgf.add(w[i] * elf[i]);
            centered.add(w[i] * std::exp(lambda * (f[i] - ef)));
        }
        row.ent_value = ent(elf, w);
        row.ent_bound = 0.5 * lambda * lambda * D * mgf.sum;
        row.hypothesis = row.ent_value <= row.ent_bound + kEntropySlackTol * (1 + row.ent_bound);
        prefix = prefix && row.hypothesis;
        row.hypothesis_prefix = prefix;
        row.mgf_centered = centered.sum;
        row.mgf_bound = std::exp(0.5 * lambda * lambda * D);
        row.conclusion =
            row.mgf_centered <= row.mgf_bound * (1 + kEntropySlackTol);
        row.implication_violated = row.hypothesis_prefix && !row.conclusion;
        rep.any_violation = rep.any_violation || row.implication_violated;
        if (row.mgf_centered < 1 - kEntropySlackTol) rep.jensen_ok = false;
        rep.rows.push_back(row);
    }
    for (double r : r_grid) {
        if (r <= 0) throw std::invalid_argument("herbst_chain_check: r must be positive");
        HerbstTailRow row;
        row.r = r;
        detail::Kahan tail;
        for (std::size_t i = 0; i < pts; ++i)
            if (f[i] - ef >= r) tail.add(w[i]);
        row.tail = tail.sum;
        row.bound = std::exp(-r * r / (2 * D));
        row.ok = row.tail <= row.bound * (1 + kEntropySlackTol) + kEntropySlackTol;
        rep.tails.push_back(row);
    }
    return rep;
}

} // namespace smlab
