#pragma once

// Brute-force reference implementations. They share only the data types with
// the library and recompute everything from the monomial lists.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "formcount/forms.hpp"

namespace oracle {

using formcount::Form;
using formcount::FormSystem;
using formcount::Integer;
using formcount::Rational;

inline Rational eval(const Form& f, const std::vector<Rational>& x) {
    Rational acc = 0;
    for (const auto& t : f.terms()) {
        Rational v = t.coeff;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (unsigned e = 0; e < t.exps[i]; ++e) v *= x[i];
        acc += v;
    }
    return acc;
}

inline Integer eval_int(const Form& f, const std::vector<long>& x) {
    Integer acc = 0;
    for (const auto& t : f.terms()) {
        Integer v = t.coeff.get_num();
        for (std::size_t i = 0; i < x.size(); ++i)
            for (unsigned e = 0; e < t.exps[i]; ++e) v *= x[i];
        acc += v;
    }
    return acc;
}

/// d-th partial derivative along `idx` by differentiating monomial by monomial.
inline Rational dth_partial(const Form& f, const std::vector<unsigned>& idx) {
    Rational total = 0;
    for (const auto& t : f.terms()) {
        auto exps = t.exps;
        Rational c = t.coeff;
        for (auto j : idx) {
            if (exps[j] == 0) {
                c = 0;
                break;
            }
            c *= exps[j];
            --exps[j];
        }
        if (std::all_of(exps.begin(), exps.end(), [](unsigned e) { return e == 0; })) total += c;
    }
    return total;
}

/// Dense table of d-th partials, first index slowest.
inline std::vector<Rational> dense_partials(const Form& f) {
    const std::size_t n = f.n();
    const unsigned d = f.degree();
    std::size_t size = 1;
    for (unsigned i = 0; i < d; ++i) size *= n;
    std::vector<Rational> out(size);
    std::vector<unsigned> idx(d, 0);
    for (std::size_t flat = 0; flat < size; ++flat) {
        std::size_t rem = flat;
        for (unsigned k = d; k-- > 0;) {
            idx[k] = static_cast<unsigned>(rem % n);
            rem /= n;
        }
        out[flat] = dth_partial(f, idx);
    }
    return out;
}

/// m_i by summing over all index tuples of the dense partial table.
inline std::vector<Rational> m_vector(const std::vector<Rational>& dense, std::size_t n,
                                      const std::vector<std::vector<Rational>>& slots) {
    std::vector<Rational> m(n, 0);
    const std::size_t arity = slots.size();
    std::size_t count = 1;
    for (std::size_t k = 0; k < arity; ++k) count *= n;
    std::vector<std::size_t> idx(arity);
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rem = flat;
        for (std::size_t k = arity; k-- > 0;) {
            idx[k] = rem % n;
            rem /= n;
        }
        Rational w = 1;
        for (std::size_t k = 0; k < arity && sgn(w) != 0; ++k) w *= slots[k][idx[k]];
        if (sgn(w) == 0) continue;
        for (std::size_t i = 0; i < n; ++i) m[i] += w * dense[flat * n + i];
    }
    return m;
}

inline Rational sup(const std::vector<Rational>& v) {
    Rational out = 0;
    for (const auto& x : v) out = std::max<Rational>(out, abs(x));
    return out;
}

/// Visits every integer vector in [-B, B]^n.
inline void for_each_box_point(std::size_t n, long B, const std::function<void(const std::vector<long>&)>& fn) {
    std::vector<long> x(n, -B);
    while (true) {
        fn(x);
        std::size_t i = n;
        while (i > 0 && x[i - 1] == B) x[--i] = -B;
        if (i == 0) return;
        ++x[i - 1];
    }
}

/// N^aux_f(B) for integer B by enumerating every tuple.
inline Integer aux_count(const Form& f, long B) {
    const std::size_t n = f.n();
    const unsigned d = f.degree();
    const auto dense = dense_partials(f);
    Rational maxabs = 0;
    for (const auto& v : dense) maxabs = std::max<Rational>(maxabs, abs(v));
    Integer dfact = 1;
    for (unsigned i = 2; i <= d; ++i) dfact *= i;
    Rational bound = maxabs / Rational(dfact);
    for (unsigned i = 2; i < d; ++i) bound *= B;
    Integer count = 0;
    std::vector<std::vector<Rational>> slots(d - 1, std::vector<Rational>(n));
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k + 1 == d) {
            if (sup(m_vector(dense, n, slots)) < bound) ++count;
            return;
        }
        for_each_box_point(n, B, [&](const std::vector<long>& x) {
            for (std::size_t i = 0; i < n; ++i) slots[k][i] = x[i];
            rec(k + 1);
        });
    };
    rec(0);
    return count;
}

/// Zero count over every lattice point of the dilated box.
inline Integer grid_zero_count(const FormSystem& system, const formcount::Box& box, long P) {
    const std::size_t n = system.n();
    std::vector<long> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational a = box[i].lo * P, b = box[i].hi * P;
        Integer c, f;
        mpz_cdiv_q(c.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
        mpz_fdiv_q(f.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
        lo[i] = c.get_si();
        hi[i] = f.get_si();
        if (lo[i] > hi[i]) return 0;
    }
    Integer count = 0;
    std::vector<long> x = lo;
    while (true) {
        bool zero = true;
        for (const auto& f : system.forms())
            if (sgn(eval_int(f, x)) != 0) {
                zero = false;
                break;
            }
        if (zero) ++count;
        std::size_t i = n;
        while (i > 0 && x[i - 1] == hi[i - 1]) {
            --i;
            x[i] = lo[i];
        }
        if (i == 0) return count;
        ++x[i - 1];
    }
}

/// #{x mod q : F(x) = 0 mod q} by enumerating residues.
inline Integer residue_count(const FormSystem& system, long q) {
    const std::size_t n = system.n();
    Integer count = 0;
    std::vector<long> x(n, 0);
    while (true) {
        bool zero = true;
        for (const auto& f : system.forms()) {
            Integer v = eval_int(f, x);
            if (mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(q)) != 0) {
                zero = false;
                break;
            }
        }
        if (zero) ++count;
        std::size_t i = n;
        while (i > 0 && x[i - 1] == q - 1) x[--i] = 0;
        if (i == 0) return count;
        ++x[i - 1];
    }
}

/// For a single form: every x mod p with F(x) = 0 and gradient nonzero mod p
/// has exactly p^(n-1) lifts mod p^2 that solve F = 0 mod p^2.
inline bool hensel_lifting_holds(const Form& f, long p, std::size_t* smooth_points = nullptr) {
    const std::size_t n = f.n();
    std::vector<Form> grads;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<formcount::Monomial> terms;
        for (const auto& t : f.terms()) {
            if (t.exps[j] == 0) continue;
            auto e = t.exps;
            --e[j];
            terms.push_back({e, t.coeff * t.exps[j]});
        }
        grads.emplace_back(n, f.degree() - 1, std::move(terms));
    }
    auto mod = [](const Integer& v, long m) { return mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(m)); };
    long expected = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) expected *= p;
    std::size_t smooth = 0;
    bool ok = true;
    std::vector<long> x(n, 0);
    while (ok) {
        if (mod(eval_int(f, x), p) == 0) {
            bool nonzero_grad = false;
            for (const auto& g : grads) nonzero_grad |= mod(eval_int(g, x), p) != 0;
            if (nonzero_grad) {
                ++smooth;
                long lifts = 0;
                std::vector<long> y(n, 0);
                while (true) {
                    std::vector<long> z(n);
                    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + p * y[i];
                    if (mod(eval_int(f, z), p * p) == 0) ++lifts;
                    std::size_t i = n;
                    while (i > 0 && y[i - 1] == p - 1) y[--i] = 0;
                    if (i == 0) break;
                    ++y[i - 1];
                }
                if (lifts != expected) ok = false;
            }
        }
        std::size_t i = n;
        while (i > 0 && x[i - 1] == p - 1) x[--i] = 0;
        if (i == 0) break;
        ++x[i - 1];
    }
    if (smooth_points) *smooth_points = smooth;
    return ok;
}

inline Rational det(std::vector<std::vector<Rational>> a) {
    const std::size_t m = a.size();
    Rational out = 1;
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        while (piv < m && sgn(a[piv][c]) == 0) ++piv;
        if (piv == m) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            out = -out;
        }
        out *= a[c][c];
        for (std::size_t r = c + 1; r < m; ++r) {
            const Rational f = a[r][c] / a[c][c];
            for (std::size_t j = c; j < m; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return out;
}

/// Largest k with a nonzero k x k minor.
inline std::size_t minor_rank(const std::vector<std::vector<Rational>>& a) {
    if (a.empty()) return 0;
    const std::size_t rows = a.size(), cols = a.front().size();
    for (std::size_t k = std::min(rows, cols); k > 0; --k) {
        std::vector<std::size_t> rs(k), cs(k);
        std::function<bool(std::size_t, std::size_t)> pick_cols;
        std::function<bool(std::size_t, std::size_t)> pick_rows = [&](std::size_t i, std::size_t start) -> bool {
            if (i == k) return pick_cols(0, 0);
            for (std::size_t r = start; r < rows; ++r) {
                rs[i] = r;
                if (pick_rows(i + 1, r + 1)) return true;
            }
            return false;
        };
        pick_cols = [&](std::size_t i, std::size_t start) -> bool {
            if (i == k) {
                std::vector<std::vector<Rational>> sub(k, std::vector<Rational>(k));
                for (std::size_t r = 0; r < k; ++r)
                    for (std::size_t c = 0; c < k; ++c) sub[r][c] = a[rs[r]][cs[c]];
                return sgn(det(sub)) != 0;
            }
            for (std::size_t c = start; c < cols; ++c) {
                cs[i] = c;
                if (pick_cols(i + 1, c + 1)) return true;
            }
            return false;
        };
        if (pick_rows(0, 0)) return k;
    }
    return 0;
}

/// Exhaustive exponent vectors of total degree d in n variables.
inline std::size_t exponent_vector_count(std::size_t n, unsigned d) {
    std::size_t count = 0;
    std::vector<unsigned> e(n, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
        if (i + 1 == n) {
            ++count;
            return;
        }
        for (unsigned v = 0; v <= left; ++v) rec(i + 1, left - v);
    };
    rec(0, d);
    return count;
}

/// Random integral form with coefficients in [-h, h] on a random subset of
/// monomials.
inline Form random_form(std::mt19937_64& rng, std::size_t n, unsigned d, long h, double density = 0.6) {
    std::uniform_int_distribution<long> coeff(-h, h);
    std::bernoulli_distribution keep(density);
    std::vector<formcount::Monomial> terms;
    std::vector<unsigned> e(n, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
        if (i + 1 == n) {
            e[i] = left;
            if (keep(rng)) terms.push_back({e, Rational(coeff(rng))});
            return;
        }
        for (unsigned v = 0; v <= left; ++v) {
            e[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, d);
    Form f(n, d, terms);
    if (f.is_zero()) {
        std::vector<unsigned> first(n, 0);
        first[0] = d;
        f = Form(n, d, {{first, 1}});
    }
    return f;
}

inline std::vector<Rational> random_rationals(std::mt19937_64& rng, std::size_t n, long num = 9, long den = 5) {
    std::uniform_int_distribution<long> a(-num, num), b(1, den);
    std::vector<Rational> v(n);
    for (auto& x : v) {
        x = Rational(a(rng), b(rng));
        x.canonicalize();
    }
    return v;
}

}  // namespace oracle
