#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smlab/rational.hpp"

namespace smlab {

// Exact value of the form sum_i p_i * sqrt(q_i) with rational p_i and
// distinct square-free positive integers q_i.  Closed under +, -, * and
// under multiplication by rationals; ordering is decided exactly (interval
// refinement; for distinct square-free radicals the sum is zero only when
// every coefficient is zero).
class RootSum {
public:
    RootSum() = default;
    RootSum(const Rat& r) { if (r != 0) terms_.emplace_back(1, r); }
    RootSum(long long n) : RootSum(Rat(n)) {}
    RootSum(int n) : RootSum(Rat(n)) {}

    // p * sqrt(q); q need not be square-free on input
    static RootSum root(const Rat& p, std::uint64_t q) {
        if (q == 0 || p == 0) return RootSum();
        auto [s, f] = split_square(q);
        RootSum r;
        r.terms_.emplace_back(f, p * Rat(Int(s)));
        return r;
    }

    static RootSum sqrt_of(std::uint64_t n) { return root(Rat(1), n); }

    // 1/sqrt(n) = sqrt(n)/n, exact
    static RootSum inv_sqrt(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("RootSum::inv_sqrt(0)");
        return root(Rat(Int(1), Int(n)), n);
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 1);
    }
    Rat as_rational() const {
        if (terms_.empty()) return Rat(0);
        if (!is_rational()) throw std::domain_error("RootSum: not rational");
        return terms_[0].second;
    }

    const std::vector<std::pair<std::uint64_t, Rat>>& terms() const { return terms_; }

    friend RootSum operator+(const RootSum& a, const RootSum& b) {
        RootSum r;
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() ||
                (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
                r.terms_.push_back(b.terms_[j++]);
            } else {
                Rat c = a.terms_[i].second + b.terms_[j].second;
                if (c != 0) r.terms_.emplace_back(a.terms_[i].first, c);
                ++i; ++j;
            }
        }
        return r;
    }

    RootSum operator-() const {
        RootSum r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }
    friend RootSum operator-(const RootSum& a, const RootSum& b) { return a + (-b); }

    RootSum& operator+=(const RootSum& o) { *this = *this + o; return *this; }
    RootSum& operator-=(const RootSum& o) { *this = *this - o; return *this; }

    friend RootSum operator*(const RootSum& a, const RootSum& b) {
        RootSum r;
        for (const auto& [qa, pa] : a.terms_)
            for (const auto& [qb, pb] : b.terms_) {
                // sqrt(qa)*sqrt(qb) = g*sqrt(qa*qb/g^2), g = gcd
                std::uint64_t g = gcd64(qa, qb);
                std::uint64_t q = (qa / g) * (qb / g);
                RootSum t;
                t.terms_.emplace_back(q, pa * pb * Rat(Int(g)));
                r = r + t;
            }
        return r;
    }
    friend RootSum operator*(const Rat& c, const RootSum& a) {
        if (c == 0) return RootSum();
        RootSum r = a;
        for (auto& t : r.terms_) t.second *= c;
        return r;
    }
    friend RootSum operator*(const RootSum& a, const Rat& c) { return c * a; }
    RootSum& operator*=(const Rat& c) { *this = c * *this; return *this; }

    // sign of the exact value: -1, 0, +1
    int sign() const {
        if (terms_.empty()) return 0;
        if (terms_.size() == 1) return terms_[0].second.sign();
        for (unsigned prec = 48;; prec *= 2) {
            if (prec > 1 << 14)
                throw std::logic_error("RootSum::sign: interval refinement did not resolve");
            Rat lo = 0, hi = 0;
            for (const auto& [q, p] : terms_) {
                auto [slo, shi] = sqrt_bracket(q, prec);
                if (p >= 0) { lo += p * slo; hi += p * shi; }
                else        { lo += p * shi; hi += p * slo; }
            }
            if (lo > 0) return 1;
            if (hi < 0) return -1;
            if (lo == 0 && hi == 0) return 0;
        }
    }

    friend bool operator==(const RootSum& a, const RootSum& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const RootSum& a, const RootSum& b) { return !(a == b); }
    friend bool operator<(const RootSum& a, const RootSum& b) { return (a - b).sign() < 0; }
    friend bool operator>(const RootSum& a, const RootSum& b) { return (a - b).sign() > 0; }
    friend bool operator<=(const RootSum& a, const RootSum& b) { return (a - b).sign() <= 0; }
    friend bool operator>=(const RootSum& a, const RootSum& b) { return (a - b).sign() >= 0; }

    double to_double() const {
        double v = 0;
        for (const auto& [q, p] : terms_) v += smlab::to_double(p) * std::sqrt((double)q);
        return v;
    }

    // reciprocal of a single-term value: 1/(p*sqrt(q)) = sqrt(q)/(p*q)
    RootSum reciprocal() const {
        if (terms_.size() != 1)
            throw std::domain_error("RootSum::reciprocal: only single-term values supported");
        const auto& [q, p] = terms_[0];
        RootSum r;
        r.terms_.emplace_back(q, Rat(1) / (p * Rat(Int(q))));
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) s += " + ";
            s += format_rat(terms_[i].second);
            if (terms_[i].first != 1) s += "*sqrt(" + std::to_string(terms_[i].first) + ")";
        }
        return s;
    }

private:
    // sorted by square-free index q; coefficients nonzero
    std::vector<std::pair<std::uint64_t, Rat>> terms_;

    static std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
        while (b) { std::uint64_t t = a % b; a = b; b = t; }
        return a;
    }

    // n = s^2 * f with f square-free; trial division, enough for desk-scale n
    static std::pair<std::uint64_t, std::uint64_t> split_square(std::uint64_t n) {
        std::uint64_t s = 1, f = 1;
        for (std::uint64_t p = 2; p * p <= n; ++p) {
            if (n % p) continue;
            unsigned e = 0;
            while (n % p == 0) { n /= p; ++e; }
            for (unsigned i = 0; i + 1 < e; i += 2) s *= p;
            if (e & 1) f *= p;
        }
        f *= n;
        return {s, f};
    }

    // rational bracket lo <= sqrt(q) <= hi with hi - lo = 2^-prec
    static std::pair<Rat, Rat> sqrt_bracket(std::uint64_t q, unsigned prec) {
        thread_local std::map<std::pair<std::uint64_t, unsigned>, std::pair<Rat, Rat>> cache;
        auto key = std::make_pair(q, prec);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Int scaled = Int(q) << (2 * prec);
        Int lo = sqrt(scaled);
        Rat den = Rat(Int(1) << prec);
        std::pair<Rat, Rat> br{Rat(lo) / den, Rat(lo + 1) / den};
        cache.emplace(key, br);
        return br;
    }
};

inline double to_double(const RootSum& r) { return r.to_double(); }

} // namespace smlab
