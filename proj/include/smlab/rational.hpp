#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace smlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// thrown when an input breaches a configured enumeration/size cap;
// the CLI maps this to a distinct exit code
struct limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// parses "p", "p/q", or a plain decimal such as "0.25" (read exactly)
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int p(s.substr(0, slash));
        Int q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
        return Rat(p, q);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string head = s.substr(0, dot);
        std::string tail = s.substr(dot + 1);
        if (tail.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("parse_rat: bad decimal '" + s + "'");
        bool neg = !head.empty() && head[0] == '-';
        if (neg) head = head.substr(1);
        if (head.empty()) head = "0";
        Int ip(head);
        Int frac = tail.empty() ? Int(0) : Int(tail);
        Int scale = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) scale *= 10;
        Rat v = Rat(ip) + Rat(frac, scale);
        return neg ? Rat(-v) : v;
    }
    return Rat(Int(s));
}

inline std::string format_rat(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += '/';
        s += denominator(r).str();
    }
    return s;
}

// floor of log2 style helpers are not needed; just lcm of denominators
inline Int lcm_int(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return a / gcd(a, b) * b;
}

// exact binomial coefficient
inline Int binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    Int r = 1;
    for (unsigned i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

// P[Bin(n,p) >= k], exact
inline Rat binomial_tail_ge(unsigned n, unsigned k, const Rat& p) {
    if (p < 0 || p > 1) throw std::invalid_argument("binomial_tail_ge: p outside [0,1]");
    Rat q = 1 - p;
    Rat sum = 0;
    for (unsigned j = k; j <= n; ++j) {
        Rat term = Rat(binomial(n, j));
        for (unsigned i = 0; i < j; ++i) term *= p;
        for (unsigned i = 0; i < n - j; ++i) term *= q;
        sum += term;
    }
    return sum;
}

} // namespace smlab
