#pragma once

// Dense machine-integer copies of derivative tensors for the enumeration
// kernels. Every kernel picks its integer width from an a-priori magnitude
// bound, so arithmetic inside the kernels never overflows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "formcount/errors.hpp"
#include "formcount/forms.hpp"

namespace formcount::detail {

using i128 = __int128;
using u128 = unsigned __int128;

inline Integer to_integer(i128 v) {
    const bool neg = v < 0;
    u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    Integer hi = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
    Integer lo = static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    Integer out = (hi << 64) + lo;
    return neg ? Integer(-out) : out;
}

inline Integer to_integer(u128 v) {
    Integer hi = static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64));
    Integer lo = static_cast<unsigned long>(static_cast<std::uint64_t>(v));
    return (hi << 64) + lo;
}

template <typename Int>
Int from_integer(const Integer& z) {
    if constexpr (std::is_same_v<Int, std::int64_t>) {
        return static_cast<std::int64_t>(z.get_si());
    } else {
        const bool neg = sgn(z) < 0;
        Integer a = abs(z);
        Integer hi_z = a >> 64;
        Integer lo_z = a - (hi_z << 64);
        u128 u = (static_cast<u128>(hi_z.get_ui()) << 64) | static_cast<u128>(lo_z.get_ui());
        return neg ? -static_cast<i128>(u) : static_cast<i128>(u);
    }
}

/// Fits in a signed integer type with `bits` magnitude bits.
inline bool fits_bits(const Integer& bound, unsigned bits) { return mpz_sizeinbase(bound.get_mpz_t(), 2) <= bits; }

/// Dense order-r tensor, first index slowest: data[((j1 * n + j2) * n + ...)].
template <typename Int>
struct DenseTensor {
    std::size_t n = 0;
    unsigned order = 0;
    std::vector<Int> data;
};

/// Dense copy of `scale * tensor`; throws InputError if the scaled entries
/// are not integral.
template <typename Int>
DenseTensor<Int> dense_tensor(const DerivativeTensor& tensor, const Integer& scale = 1) {
    DenseTensor<Int> out;
    out.n = tensor.n();
    out.order = tensor.order();
    std::size_t size = 1;
    for (unsigned r = 0; r < out.order; ++r) size *= out.n;
    out.data.assign(size, Int(0));
    for (const auto& [key, value] : tensor.entries()) {
        Rational scaled = value * scale;
        scaled.canonicalize();
        if (scaled.get_den() != 1) throw InputError("tensor entries are not integral after scaling");
        const Int v = from_integer<Int>(scaled.get_num());
        std::vector<unsigned> perm = key;
        do {
            std::size_t idx = 0;
            for (auto j : perm) idx = idx * out.n + j;
            out.data[idx] = v;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return out;
}

/// Sum of |entries| over the full dense tensor: bounds |m_i| / B^(d-1).
inline Integer dense_abs_sum(const DerivativeTensor& tensor, const Integer& scale = 1) {
    Integer total = 0;
    for (const auto& [key, value] : tensor.entries()) {
        // number of distinct orderings of the multiset `key`
        Integer perms = factorial(static_cast<unsigned>(key.size()));
        for (std::size_t i = 0; i < key.size();) {
            std::size_t j = i;
            while (j < key.size() && key[j] == key[i]) ++j;
            perms /= factorial(static_cast<unsigned>(j - i));
            i = j;
        }
        Rational a = abs(value) * scale;
        total += perms * (a.get_num() / a.get_den() + 1);
    }
    return total;
}

/// Contracts the first index of `t` (order r) with x, giving order r - 1.
template <typename Int>
void contract_first(const std::vector<Int>& t, std::size_t n, std::size_t block, std::span<const Int> x,
                    std::vector<Int>& out) {
    out.assign(block, Int(0));
    for (std::size_t j = 0; j < n; ++j) {
        const Int xj = x[j];
        if (xj == 0) continue;
        const Int* src = t.data() + j * block;
        for (std::size_t b = 0; b < block; ++b) out[b] += xj * src[b];
    }
}

inline std::uint64_t ipow(std::uint64_t base, unsigned e) {
    std::uint64_t out = 1;
    for (unsigned i = 0; i < e; ++i) out *= base;
    return out;
}

inline double dpow(double base, double e) { return std::pow(base, e); }

}  // namespace formcount::detail
