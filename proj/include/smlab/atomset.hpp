#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smlab {

inline constexpr int kDefaultAtomLimit = 24;
inline constexpr int kMaxAtoms = 120;

// wide mask so index sets of a few hundred coordinates stay representable;
// exhaustive routines gate themselves to far smaller grounds
using Bits = unsigned __int128;

inline int popcount128(Bits b) {
    return std::popcount((std::uint64_t)b) + std::popcount((std::uint64_t)(b >> 64));
}
inline int countr_zero128(Bits b) {
    std::uint64_t lo = (std::uint64_t)b;
    if (lo) return std::countr_zero(lo);
    return 64 + std::countr_zero((std::uint64_t)(b >> 64));
}

struct BitsHash {
    std::size_t operator()(Bits b) const {
        std::uint64_t lo = (std::uint64_t)b, hi = (std::uint64_t)(b >> 64);
        return std::hash<std::uint64_t>()(lo ^ (hi * 0x9E3779B97F4A7C15ULL));
    }
};

// finite ground set; atoms are indices 0..n_atoms-1
struct GroundSet {
    int n_atoms = 1;

    explicit GroundSet(int n = 1) : n_atoms(n) {
        if (n < 1 || n > kMaxAtoms)
            throw std::invalid_argument("GroundSet: n_atoms out of range");
    }
    Bits full_mask() const { return (Bits(1) << n_atoms) - 1; }
    // for subset sweeps, which require a one-word ground
    std::uint64_t full_mask64() const {
        if (n_atoms > 62)
            throw std::invalid_argument("GroundSet: ground too large for a subset sweep");
        return (std::uint64_t(1) << n_atoms) - 1;
    }
    friend bool operator==(const GroundSet& a, const GroundSet& b) = default;
};

// subset of a ground set, stored as a bit mask
class AtomSet {
public:
    AtomSet() = default;
    AtomSet(GroundSet g, Bits bits) : n_(g.n_atoms), bits_(bits) {
        if (bits & ~g.full_mask())
            throw std::invalid_argument("AtomSet: member outside ground set");
    }
    AtomSet(GroundSet g, std::uint64_t bits) : AtomSet(g, Bits(bits)) {}
    AtomSet(GroundSet g, const std::vector<int>& atoms) : n_(g.n_atoms) {
        for (int a : atoms) {
            if (a < 0 || a >= n_) throw std::invalid_argument("AtomSet: atom index out of range");
            bits_ |= Bits(1) << a;
        }
    }
    AtomSet(GroundSet g, std::initializer_list<int> atoms)
        : AtomSet(g, std::vector<int>(atoms)) {}

    static AtomSet empty_set(GroundSet g) { return AtomSet(g, Bits(0)); }
    static AtomSet full_set(GroundSet g) { return AtomSet(g, g.full_mask()); }
    static AtomSet singleton(GroundSet g, int atom) {
        return AtomSet(g, std::vector<int>{atom});
    }

    int n_atoms() const { return n_; }
    GroundSet ground() const { return GroundSet(n_); }
    Bits bits() const { return bits_; }
    std::uint64_t bits64() const {
        if (n_ > 62) throw std::invalid_argument("AtomSet: ground too large for one word");
        return (std::uint64_t)bits_;
    }
    bool contains(int a) const { return (bits_ >> a) & 1; }
    bool empty() const { return bits_ == 0; }
    int count() const { return popcount128(bits_); }
    bool subset_of(const AtomSet& o) const { return (bits_ & ~o.bits_) == 0; }

    AtomSet operator|(const AtomSet& o) const { return with_bits(bits_ | o.bits_); }
    AtomSet operator&(const AtomSet& o) const { return with_bits(bits_ & o.bits_); }
    AtomSet operator-(const AtomSet& o) const { return with_bits(bits_ & ~o.bits_); }
    AtomSet operator^(const AtomSet& o) const { return with_bits(bits_ ^ o.bits_); }
    AtomSet complement() const { return with_bits(~bits_ & GroundSet(n_).full_mask()); }
    AtomSet& operator|=(const AtomSet& o) { bits_ |= o.bits_; return *this; }

    friend bool operator==(const AtomSet& a, const AtomSet& b) {
        return a.n_ == b.n_ && a.bits_ == b.bits_;
    }

    std::vector<int> atoms() const {
        std::vector<int> v;
        for (Bits b = bits_; b; b &= b - 1) v.push_back(countr_zero128(b));
        return v;
    }

    std::string str() const {
        std::string s = "{";
        bool first = true;
        for (int a : atoms()) {
            if (!first) s += ",";
            s += std::to_string(a);
            first = false;
        }
        return s + "}";
    }

private:
    AtomSet with_bits(Bits b) const {
        AtomSet r;
        r.n_ = n_;
        r.bits_ = b;
        return r;
    }
    int n_ = 1;
    Bits bits_ = 0;
};

} // namespace smlab
