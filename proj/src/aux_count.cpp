#include "formcount/aux_count.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>

#include "detail/int_tensor.hpp"
#include "formcount/errors.hpp"

namespace formcount {

std::string to_string(AuxMethod m) { return m == AuxMethod::Naive ? "NAIVE" : "SLAB"; }

namespace {

using detail::i128;
using detail::u128;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Int>
Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

template <typename Int>
Int ceil_div(Int a, Int b) {
    return -floor_div<Int>(-a, b);
}

template <typename Int>
Int iabs(Int a) {
    return a < 0 ? -a : a;
}

/// Sup-norm shell for one argument slot: vectors in [-hi, hi]^n with
/// lo <= ||x||_inf <= hi.
struct Shell {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

/// Integer threshold problem shared by every count: the tensor scaled to
/// integers, the largest admissible |m_i| and the shells for each slot.
struct CountProblem {
    DerivativeTensor tensor;
    Integer scale;
    Integer mmax;
    std::vector<Shell> shells;
};

// Calls f(x) for every x in [-s.hi, s.hi]^n with sup-norm >= s.lo, in
// lexicographic order; if `first` is set, x_0 is pinned to it.
template <typename Int, typename F>
void for_each_in_shell(std::size_t n, const Shell& s, std::optional<std::int64_t> first, F&& f) {
    std::vector<Int> x(n, Int(-s.hi));
    std::size_t start = 0;
    if (first) {
        x[0] = Int(*first);
        start = 1;
        if (n == 1) {
            if (std::abs(*first) >= s.lo) f(std::span<const Int>(x));
            return;
        }
    }
    while (true) {
        Int sup = 0;
        for (auto v : x) sup = std::max(sup, iabs(v));
        if (sup >= Int(s.lo)) f(std::span<const Int>(x));
        std::size_t i = n;
        bool advanced = false;
        while (i > start && !advanced) {
            --i;
            if (x[i] < Int(s.hi)) {
                ++x[i];
                for (std::size_t j = i + 1; j < n; ++j) x[j] = Int(-s.hi);
                advanced = true;
            }
        }
        if (!advanced) return;
    }
}

// Enumerates every tuple; m for the last slot is L^T y with L the tensor
// contracted against the earlier slots.
template <typename Int>
u128 naive_kernel(const detail::DenseTensor<Int>& T, const std::vector<Shell>& shells, Int mmax,
                  std::int64_t first_value) {
    const std::size_t n = T.n;
    const std::size_t slots = shells.size();
    std::vector<std::vector<Int>> level(slots);
    level[0] = T.data;
    u128 count = 0;
    std::vector<Int> m(n);

    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        const std::optional<std::int64_t> pin = k == 0 ? std::optional<std::int64_t>(first_value) : std::nullopt;
        if (k + 1 == slots) {
            const auto& L = level[k];
            for_each_in_shell<Int>(n, shells[k], pin, [&](std::span<const Int> y) {
                std::fill(m.begin(), m.end(), Int(0));
                for (std::size_t j = 0; j < n; ++j) {
                    if (y[j] == 0) continue;
                    const Int* row = L.data() + j * n;
                    for (std::size_t i = 0; i < n; ++i) m[i] += y[j] * row[i];
                }
                for (std::size_t i = 0; i < n; ++i)
                    if (iabs(m[i]) > mmax) return;
                ++count;
            });
            return;
        }
        std::size_t block = 1;
        for (std::size_t r = k + 1; r < T.order; ++r) block *= n;
        for_each_in_shell<Int>(n, shells[k], pin, [&](std::span<const Int> x) {
            detail::contract_first<Int>(level[k], n, block, x, level[k + 1]);
            rec(k + 1);
        });
    };
    rec(0);
    return count;
}

// Counts y in [-b, b]^n with |sum_j a_ij y_j| <= mmax for all i, where
// a_ij = L[j * n + i], by fixing coordinates in turn and intersecting the
// feasible interval for each with every row's remaining slack.
template <typename Int>
struct SlabCounter {
    std::size_t n;
    Int b;
    Int mmax;
    std::vector<Int> a;       // a[i * n + j]
    std::vector<Int> suffix;  // suffix[i * (n + 1) + l] = b * sum_{j >= l} |a_ij|

    SlabCounter(std::size_t n_, Int b_, Int mmax_) : n(n_), b(b_), mmax(mmax_), a(n_ * n_), suffix(n_ * (n_ + 1)) {}

    u128 count(const std::vector<Int>& L) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] = L[j * n + i];
        for (std::size_t i = 0; i < n; ++i) {
            suffix[i * (n + 1) + n] = 0;
            for (std::size_t l = n; l-- > 0;) suffix[i * (n + 1) + l] = suffix[i * (n + 1) + l + 1] + b * iabs(a[i * n + l]);
        }
        std::vector<Int> s(n, Int(0));
        return rec(0, s);
    }

    u128 rec(std::size_t l, std::vector<Int>& s) {
        Int lo = -b, hi = b;
        for (std::size_t i = 0; i < n; ++i) {
            const Int slack = mmax + suffix[i * (n + 1) + l + 1];
            const Int c = a[i * n + l];
            if (c == 0) {
                if (iabs(s[i]) > slack) return 0;
                continue;
            }
            Int u = floor_div<Int>(slack - s[i], c), v = ceil_div<Int>(-slack - s[i], c);
            if (c < 0) {
                u = floor_div<Int>(-slack - s[i], c);
                v = ceil_div<Int>(slack - s[i], c);
            }
            lo = std::max(lo, v);
            hi = std::min(hi, u);
            if (lo > hi) return 0;
        }
        if (l + 1 == n) return static_cast<u128>(hi - lo + 1);
        u128 total = 0;
        std::vector<Int> next(n);
        for (Int y = lo; y <= hi; ++y) {
            for (std::size_t i = 0; i < n; ++i) next[i] = s[i] + a[i * n + l] * y;
            total += rec(l + 1, next);
        }
        return total;
    }
};

template <typename Int>
u128 slab_kernel(const detail::DenseTensor<Int>& T, std::int64_t b, Int mmax, std::int64_t first_value) {
    const std::size_t n = T.n;
    const std::size_t outer = T.order - 2;
    SlabCounter<Int> counter(n, Int(b), mmax);
    if (outer == 0) return counter.count(T.data);

    const Shell box{0, b};
    std::vector<std::vector<Int>> level(outer + 1);
    level[0] = T.data;
    u128 total = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == outer) {
            total += counter.count(level[k]);
            return;
        }
        std::size_t block = 1;
        for (std::size_t r = k + 1; r < T.order; ++r) block *= n;
        const std::optional<std::int64_t> pin = k == 0 ? std::optional<std::int64_t>(first_value) : std::nullopt;
        for_each_in_shell<Int>(n, box, pin, [&](std::span<const Int> x) {
            detail::contract_first<Int>(level[k], n, block, x, level[k + 1]);
            rec(k + 1);
        });
    };
    rec(0);
    return total;
}

Integer lcm_of_denominators(const DerivativeTensor& t) {
    Integer l = 1;
    for (const auto& [key, value] : t.entries()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), value.get_den_mpz_t());
    return l;
}

Integer floor_of(const Rational& q) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Rational rpow(const Rational& base, unsigned e) {
    Rational out = 1;
    for (unsigned i = 0; i < e; ++i) out *= base;
    return out;
}

// Largest admissible |m| for the strict auxiliary inequality on the scaled
// tensor: the largest integer strictly below scale * ||f^[d]|| * B^(d-2).
CountProblem aux_problem(const Form& f, const Rational& B) {
    if (f.is_zero()) throw InputError("auxiliary count is undefined for the zero form");
    if (f.degree() < 2) throw InputError("auxiliary count needs degree >= 2");
    if (B < 1) throw InputError("B must be at least 1");
    CountProblem p{derivative_tensor(f), 0, 0, {}};
    p.scale = lcm_of_denominators(p.tensor);
    const Rational K = Rational(p.scale) * sup_norm_fd(f) * rpow(B, f.degree() - 2);
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), K.get_num_mpz_t(), K.get_den_mpz_t());
    p.mmax = c - 1;
    const Integer b = floor_of(B);
    p.shells.assign(f.degree() - 1, Shell{0, b.get_si()});
    return p;
}

double shell_size(std::size_t n, const Shell& s) {
    const double outer = std::pow(2.0 * static_cast<double>(s.hi) + 1.0, static_cast<double>(n));
    const double inner = s.lo > 0 ? std::pow(2.0 * static_cast<double>(s.lo) - 1.0, static_cast<double>(n)) : 0.0;
    return outer - inner;
}

enum class Kernel { Naive, Slab };

template <typename Int>
Integer run_kernel(const CountProblem& p, Kernel kind, const ExecPolicy& policy) {
    const auto T = detail::dense_tensor<Int>(p.tensor, p.scale);
    const Int mmax = detail::from_integer<Int>(p.mmax);
    const Shell& first = p.shells.front();
    // One task per value of the very first coordinate.
    const std::size_t tasks = static_cast<std::size_t>(2 * first.hi + 1);
    if (kind == Kernel::Slab && p.shells.size() == 1) {
        return detail::to_integer(slab_kernel<Int>(T, first.hi, mmax, 0));
    }
    auto parts = parallel_map<u128>(tasks, policy.workers, [&](std::size_t t) -> u128 {
        const std::int64_t v = static_cast<std::int64_t>(t) - first.hi;
        return kind == Kernel::Naive ? naive_kernel<Int>(T, p.shells, mmax, v) : slab_kernel<Int>(T, first.hi, mmax, v);
    });
    Integer total = 0;
    for (auto c : parts) total += detail::to_integer(c);
    return total;
}

Integer count(const CountProblem& p, Kernel kind, const ExecPolicy& policy) {
    for (const auto& s : p.shells)
        if (s.lo > s.hi) return 0;
    // |m_i|, partial sums and slacks are all bounded by this.
    Integer bmax = 0;
    for (const auto& s : p.shells) bmax = std::max<Integer>(bmax, Integer(static_cast<long>(s.hi)));
    Integer bound = detail::dense_abs_sum(p.tensor, p.scale) * (bmax + 1);
    for (std::size_t k = 1; k < p.shells.size(); ++k) bound *= (bmax + 1);
    bound = 2 * bound + 2 * abs(p.mmax) + 2;

    double total_tuples = 1;
    for (const auto& s : p.shells) total_tuples *= shell_size(p.tensor.n(), s);
    if (!(total_tuples < std::ldexp(1.0, 126)))
        throw GuardExceeded("tuple count exceeds 128-bit accumulators", total_tuples, std::ldexp(1.0, 126));

    if (detail::fits_bits(bound, 62)) return run_kernel<std::int64_t>(p, kind, policy);
    if (detail::fits_bits(bound, 125)) return run_kernel<i128>(p, kind, policy);
    throw InputError("coefficients too large for exact machine-integer enumeration");
}

}  // namespace

AuxCountResult aux_count_naive(const Form& f, const Rational& B, const ExecPolicy& policy) {
    const auto t0 = Clock::now();
    const auto p = aux_problem(f, B);
    double cost = 1;
    for (const auto& s : p.shells) cost *= shell_size(f.n(), s);
    check_guard(cost, kAuxEnumerationGuard, policy, "aux_count_naive");
    AuxCountResult r{B, count(p, Kernel::Naive, policy), AuxMethod::Naive, 0};
    r.elapsed = seconds_since(t0);
    return r;
}

AuxCountResult aux_count_slab(const Form& f, const Rational& B, const ExecPolicy& policy) {
    const auto t0 = Clock::now();
    const auto p = aux_problem(f, B);
    double cost = 1;
    for (std::size_t k = 0; k + 1 < p.shells.size(); ++k) cost *= shell_size(f.n(), p.shells[k]);
    check_guard(cost, kAuxEnumerationGuard, policy, "aux_count_slab");
    AuxCountResult r{B, count(p, Kernel::Slab, policy), AuxMethod::Slab, 0};
    r.elapsed = seconds_since(t0);
    return r;
}

namespace {

// Z-bound problem: ||m(g)|| <= ||beta|| B^(d-2), non-strict.
CountProblem z_problem(const Form& g, const Rational& beta_norm, const Rational& B) {
    if (g.degree() < 2) throw InputError("dyadic count needs degree >= 2");
    if (B < 1) throw InputError("B must be at least 1");
    CountProblem p{derivative_tensor(g), 0, 0, {}};
    p.scale = lcm_of_denominators(p.tensor);
    p.mmax = floor_of(Rational(p.scale) * beta_norm * rpow(B, g.degree() - 2));
    return p;
}

}  // namespace

DyadicCell dyadic_count(const FormSystem& system, std::span<const Rational> beta, std::span<const std::int64_t> T,
                        const Rational& B, const ExecPolicy& policy) {
    const Form g = beta_dot(system, beta);
    const Rational bnorm = sup_norm(beta);
    if (sgn(bnorm) == 0) throw InputError("dyadic_count needs beta != 0");
    if (T.size() + 1 != system.degree()) throw InputError("T must have d-1 entries");
    for (auto t : T)
        if (t < 1) throw InputError("dyadic parameters must satisfy T_i >= 1");

    auto p = z_problem(g, bnorm, B);
    const std::int64_t b = floor_of(B).get_si();
    double cost = 1;
    for (auto t : T) {
        p.shells.push_back(Shell{t, std::min<std::int64_t>(2 * t, b)});
        cost *= p.shells.back().lo > p.shells.back().hi ? 0.0 : shell_size(system.n(), p.shells.back());
    }
    check_guard(cost, kAuxEnumerationGuard, policy, "dyadic_count");
    return DyadicCell{std::vector<std::int64_t>(T.begin(), T.end()), count(p, Kernel::Naive, policy)};
}

CoveringCheck covering_check(const Form& f, const Rational& B, const ExecPolicy& policy) {
    if (f.is_zero()) throw InputError("covering check needs a nonzero form");
    const FormSystem sys({f});
    const std::vector<Rational> beta{1};
    CoveringCheck out;
    out.B = B;

    auto p = z_problem(f, 1, B);
    const std::int64_t b = floor_of(B).get_si();
    double cost = std::pow(std::pow(2.0 * static_cast<double>(b) + 1.0, static_cast<double>(f.n())), f.degree() - 1.0);
    check_guard(cost, kAuxEnumerationGuard, policy, "covering_check");
    p.shells.assign(f.degree() - 1, Shell{0, b});
    out.lhs_all = count(p, Kernel::Naive, policy);
    p.shells.assign(f.degree() - 1, Shell{1, b});
    out.lhs_nonzero = count(p, Kernel::Naive, policy);

    // Exponents t with 2^t < B.
    std::vector<std::int64_t> powers;
    for (std::int64_t t = 1; Rational(static_cast<long>(t)) < B; t *= 2) powers.push_back(t);
    out.rhs = 1;
    const std::size_t slots = f.degree() - 1;
    std::vector<std::size_t> idx(slots, 0);
    if (powers.empty()) return out;
    while (true) {
        std::vector<std::int64_t> T(slots);
        for (std::size_t k = 0; k < slots; ++k) T[k] = powers[idx[k]];
        auto cell = dyadic_count(sys, beta, T, B, policy);
        out.rhs += cell.count;
        out.cells.push_back(std::move(cell));
        std::size_t k = slots;
        while (k > 0 && idx[k - 1] + 1 == powers.size()) idx[--k] = 0;
        if (k == 0) break;
        ++idx[k - 1];
    }
    return out;
}

GrowthTable growth_table(const Form& f, std::span<const std::int64_t> Bs, std::span<const int> s_candidates,
                         const ExecPolicy& policy) {
    GrowthTable table;
    table.s_candidates.assign(s_candidates.begin(), s_candidates.end());
    const double d = f.degree();
    const double n = static_cast<double>(f.n());
    for (auto B : Bs) {
        GrowthRow row;
        row.B = B;
        row.count = aux_count_slab(f, Rational(static_cast<long>(B)), policy).count;
        const double logterm = std::pow(std::log(2.0 * static_cast<double>(B)), d - 1);
        for (int s : s_candidates) {
            const double denom = std::pow(static_cast<double>(B), (d - 2) * n + s) * logterm;
            row.ratios.push_back(row.count.get_d() / denom);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace formcount
