#pragma once

// Residue arithmetic for small moduli (q < 2^63).

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "formcount/forms.hpp"

namespace formcount::detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    if (q <= (std::uint64_t{1} << 32)) return a * b % q;
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

inline std::uint64_t powmod(std::uint64_t a, unsigned e, std::uint64_t q) {
    std::uint64_t out = 1 % q;
    for (unsigned i = 0; i < e; ++i) out = mulmod(out, a, q);
    return out;
}

/// Inverse of a unit mod prime p.
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
    std::uint64_t out = 1, base = a % p;
    for (std::uint64_t e = p - 2; e; e >>= 1) {
        if (e & 1) out = mulmod(out, base, p);
        base = mulmod(base, base, p);
    }
    return out;
}

/// Nonnegative residue of an integral rational.
inline std::uint64_t residue(const Rational& c, std::uint64_t q) {
    return mpz_fdiv_ui(c.get_num().get_mpz_t(), q);
}

inline bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t f = 2; f * f <= p; ++f)
        if (p % f == 0) return false;
    return true;
}

struct ModTerm {
    Exponents exps;
    std::uint64_t coeff;
};

/// Terms of an integral form reduced mod q, zero residues dropped.
inline std::vector<ModTerm> reduce_form(const Form& f, std::uint64_t q) {
    std::vector<ModTerm> out;
    for (const auto& t : f.terms()) {
        const auto c = residue(t.coeff, q);
        if (c != 0) out.push_back({t.exps, c});
    }
    return out;
}

inline std::uint64_t eval_mod(const std::vector<ModTerm>& terms, const std::vector<std::uint64_t>& x,
                              std::uint64_t q) {
    std::uint64_t acc = 0;
    for (const auto& t : terms) {
        std::uint64_t v = t.coeff;
        for (std::size_t i = 0; i < x.size() && v != 0; ++i) v = mulmod(v, powmod(x[i], t.exps[i], q), q);
        acc = (acc + v) % q;
    }
    return acc;
}

using ModMatrix = std::vector<std::vector<std::uint64_t>>;

/// Row-reduces `a` in place mod prime p; returns the pivot columns.
inline std::vector<std::size_t> row_reduce_mod(ModMatrix& a, std::uint64_t p) {
    std::vector<std::size_t> pivots;
    if (a.empty()) return pivots;
    const std::size_t rows = a.size(), cols = a.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && a[sel][c] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(a[sel], a[r]);
        const auto inv = invmod(a[r][c], p);
        for (auto& v : a[r]) v = mulmod(v, inv, p);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const auto factor = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] = (a[i][j] + p - mulmod(factor, a[r][j], p)) % p;
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank_mod(ModMatrix a, std::uint64_t p) { return row_reduce_mod(a, p).size(); }

/// Basis of {y : a y = 0} mod prime p.
inline std::vector<std::vector<std::uint64_t>> kernel_mod(ModMatrix a, std::size_t cols, std::uint64_t p) {
    const auto pivots = row_reduce_mod(a, p);
    std::vector<char> is_pivot(cols, 0);
    for (auto c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<std::uint64_t>> out;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<std::uint64_t> v(cols, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = (p - a[r][f]) % p;
        out.push_back(std::move(v));
    }
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent seed for stream (a, b) of a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

}  // namespace formcount::detail
