#include "formcount/zero_count.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "detail/int_tensor.hpp"
#include "formcount/errors.hpp"

namespace formcount {

std::string to_string(CountMethod m) { return m == CountMethod::Enum ? "ENUM" : "DIAGONAL"; }

namespace {

using detail::i128;
using detail::u128;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename Int>
struct Interval {
    Int lo;
    Int hi;
};

template <typename Int>
Interval<Int> mul(const Interval<Int>& a, const Interval<Int>& b) {
    const Int p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

template <typename Int>
Int ipow(Int x, unsigned e) {
    Int out = 1;
    for (unsigned i = 0; i < e; ++i) out *= x;
    return out;
}

// Exact range of x^e for integer x in [lo, hi].
template <typename Int>
Interval<Int> power_range(std::int64_t lo, std::int64_t hi, unsigned e) {
    if (e == 0) return {1, 1};
    const Int a = ipow<Int>(Int(lo), e), b = ipow<Int>(Int(hi), e);
    Interval<Int> out{std::min(a, b), std::max(a, b)};
    if (e % 2 == 0 && lo < 0 && hi > 0) out.lo = 0;
    return out;
}

template <typename Int>
class PrunedEnumerator {
public:
    PrunedEnumerator(const FormSystem& system, std::vector<CoordinateRange> ranges, std::vector<std::size_t> order)
        : n_(system.n()), ranges_(std::move(ranges)), order_(std::move(order)) {
        for (const auto& f : system.forms()) {
            FormData fd;
            for (const auto& t : f.terms()) {
                Mono m;
                m.coeff = detail::from_integer<Int>(t.coeff.get_num());
                for (std::size_t l = 0; l < n_; ++l) m.exps.push_back(t.exps[order_[l]]);
                // suffix[l] = prod over depths >= l of the power ranges
                m.suffix.assign(n_ + 1, Interval<Int>{1, 1});
                for (std::size_t l = n_; l-- > 0;) {
                    const auto& r = ranges_[order_[l]];
                    m.suffix[l] = mul(m.suffix[l + 1], power_range<Int>(r.lo, r.hi, m.exps[l]));
                }
                fd.monos.push_back(std::move(m));
            }
            forms_.push_back(std::move(fd));
        }
    }

    /// Count with the first variable (in pruning order) pinned to `value`.
    u128 count_with_first(std::int64_t value) {
        std::vector<std::vector<Int>> partial(forms_.size());
        for (std::size_t r = 0; r < forms_.size(); ++r)
            for (const auto& m : forms_[r].monos) partial[r].push_back(m.coeff);
        if (!feasible(0, partial)) return 0;
        if (n_ == 1) return last_level_count(partial, value, value);
        assign(0, Int(value), partial);
        return rec(1, partial);
    }

    bool feasible_at_root() {
        std::vector<std::vector<Int>> partial(forms_.size());
        for (std::size_t r = 0; r < forms_.size(); ++r)
            for (const auto& m : forms_[r].monos) partial[r].push_back(m.coeff);
        return feasible(0, partial);
    }

private:
    struct Mono {
        Int coeff;
        std::vector<unsigned> exps;  // by depth
        std::vector<Interval<Int>> suffix;
    };
    struct FormData {
        std::vector<Mono> monos;
    };

    // 0 lies in the exact range of every form over the remaining sub-box.
    bool feasible(std::size_t depth, const std::vector<std::vector<Int>>& partial) const {
        for (std::size_t r = 0; r < forms_.size(); ++r) {
            Int lo = 0, hi = 0;
            const auto& monos = forms_[r].monos;
            for (std::size_t k = 0; k < monos.size(); ++k) {
                const Int c = partial[r][k];
                if (c == 0) continue;
                const auto& s = monos[k].suffix[depth];
                if (c > 0) {
                    lo += c * s.lo;
                    hi += c * s.hi;
                } else {
                    lo += c * s.hi;
                    hi += c * s.lo;
                }
            }
            if (lo > 0 || hi < 0) return false;
        }
        return true;
    }

    void assign(std::size_t depth, Int x, std::vector<std::vector<Int>>& partial) const {
        for (std::size_t r = 0; r < forms_.size(); ++r) {
            const auto& monos = forms_[r].monos;
            for (std::size_t k = 0; k < monos.size(); ++k)
                if (partial[r][k] != 0) partial[r][k] *= ipow<Int>(x, monos[k].exps[depth]);
        }
    }

    // Last variable: each form is a univariate polynomial in it.
    u128 last_level_count(const std::vector<std::vector<Int>>& partial, std::int64_t lo, std::int64_t hi) const {
        const std::size_t depth = n_ - 1;
        std::vector<std::vector<Int>> poly(forms_.size());
        for (std::size_t r = 0; r < forms_.size(); ++r) {
            const auto& monos = forms_[r].monos;
            for (std::size_t k = 0; k < monos.size(); ++k) {
                const unsigned e = monos[k].exps[depth];
                if (poly[r].size() <= e) poly[r].resize(e + 1, Int(0));
                poly[r][e] += partial[r][k];
            }
        }
        u128 count = 0;
        for (std::int64_t v = lo; v <= hi; ++v) {
            bool zero = true;
            for (std::size_t r = 0; r < poly.size() && zero; ++r) {
                Int acc = 0;
                for (std::size_t e = poly[r].size(); e-- > 0;) acc = acc * Int(v) + poly[r][e];
                zero = acc == 0;
            }
            if (zero) ++count;
        }
        return count;
    }

    u128 rec(std::size_t depth, const std::vector<std::vector<Int>>& partial) const {
        if (!feasible(depth, partial)) return 0;
        const auto& r = ranges_[order_[depth]];
        if (depth + 1 == n_) return last_level_count(partial, r.lo, r.hi);
        u128 total = 0;
        std::vector<std::vector<Int>> next = partial;
        for (std::int64_t v = r.lo; v <= r.hi; ++v) {
            next = partial;
            assign(depth, Int(v), next);
            total += rec(depth + 1, next);
        }
        return total;
    }

    std::size_t n_;
    std::vector<CoordinateRange> ranges_;
    std::vector<std::size_t> order_;
    std::vector<FormData> forms_;
};

// Prune on the most constraining variables first.
std::vector<std::size_t> pruning_order(const FormSystem& system) {
    const std::size_t n = system.n();
    std::vector<Rational> weight(n, 0);
    for (const auto& f : system.forms())
        for (const auto& t : f.terms())
            for (std::size_t i = 0; i < n; ++i) weight[i] += abs(t.coeff) * t.exps[i];
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    return order;
}

double grid_size(const std::vector<CoordinateRange>& ranges) {
    double size = 1;
    for (const auto& r : ranges) size *= r.hi >= r.lo ? static_cast<double>(r.hi - r.lo + 1) : 0.0;
    return size;
}

template <typename Int>
Integer run_enum(const FormSystem& system, const std::vector<CoordinateRange>& ranges, const ExecPolicy& policy) {
    PrunedEnumerator<Int> e(system, ranges, pruning_order(system));
    if (!e.feasible_at_root()) return 0;
    const auto& first = ranges[pruning_order(system).front()];
    const auto tasks = static_cast<std::size_t>(first.hi - first.lo + 1);
    auto parts = parallel_map<u128>(tasks, policy.workers, [&](std::size_t t) {
        PrunedEnumerator<Int> local = e;
        return local.count_with_first(first.lo + static_cast<std::int64_t>(t));
    });
    Integer total = 0;
    for (auto c : parts) total += detail::to_integer(c);
    return total;
}

Integer ceil_of(const Rational& q) {
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Integer floor_of(const Rational& q) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

void require_P(std::int64_t P) {
    if (P < 1) throw InputError("P must be at least 1");
}

}  // namespace

std::vector<CoordinateRange> dilated_ranges(const Box& box, std::int64_t P) {
    std::vector<CoordinateRange> out;
    const Rational p(static_cast<long>(P));
    for (const auto& iv : box.intervals())
        out.push_back({ceil_of(iv.lo * p).get_si(), floor_of(iv.hi * p).get_si()});
    return out;
}

CountResult zero_count_enum(const FormSystem& system, const Box& box, std::int64_t P, const ExecPolicy& policy) {
    const auto t0 = Clock::now();
    require_P(P);
    system.require_nonzero_integral("zero_count_enum");
    if (box.n() != system.n()) throw InputError("box dimension does not match the system");
    const auto ranges = dilated_ranges(box, P);
    const double size = grid_size(ranges);
    check_guard(size, kZeroCountGuard, policy, "zero_count_enum");

    CountResult out{P, 0, CountMethod::Enum, 0};
    if (size > 0) {
        std::int64_t M = 0;
        for (const auto& r : ranges) M = std::max({M, std::abs(r.lo), std::abs(r.hi)});
        Integer bound = 0;
        for (const auto& f : system.forms()) {
            Integer s = 0;
            for (const auto& t : f.terms()) s += abs(t.coeff.get_num());
            Integer mp;
            mpz_pow_ui(mp.get_mpz_t(), Integer(static_cast<long>(M)).get_mpz_t(), system.degree());
            bound = std::max<Integer>(bound, s * mp);
        }
        // interval sums add at most a factor 2 over this
        bound = 4 * bound + 4;
        if (detail::fits_bits(bound, 62)) out.count = run_enum<std::int64_t>(system, ranges, policy);
        else if (detail::fits_bits(bound, 125)) out.count = run_enum<i128>(system, ranges, policy);
        else throw InputError("coefficients too large for exact machine-integer enumeration");
    }
    out.elapsed = seconds_since(t0);
    return out;
}

bool diagonal_eligible(const FormSystem& system, const Box& box) {
    return system.is_integral() && system.is_diagonal() && system.size() <= 2 && box.n() == system.n() &&
           box.is_symmetric_cube();
}

namespace {

// Histogram convolution for R = 1 over a dense offset array.
template <typename Count>
Count diagonal_dense(const std::vector<std::vector<std::pair<std::int64_t, std::uint64_t>>>& hists) {
    std::int64_t lo = 0, hi = 0;
    std::vector<Count> cur{Count(1)};
    for (const auto& h : hists) {
        std::int64_t hlo = h.front().first, hhi = h.front().first;
        for (const auto& [v, c] : h) {
            hlo = std::min(hlo, v);
            hhi = std::max(hhi, v);
        }
        std::vector<Count> next(static_cast<std::size_t>(hi + hhi - lo - hlo + 1), Count(0));
        for (const auto& [v, c] : h) {
            const std::size_t shift = static_cast<std::size_t>(v - hlo);
            const Count mult(c);
            for (std::size_t i = 0; i < cur.size(); ++i)
                if (cur[i] != 0) next[i + shift] += cur[i] * mult;
        }
        cur = std::move(next);
        lo += hlo;
        hi += hhi;
    }
    if (lo > 0 || hi < 0) return Count(0);
    return cur[static_cast<std::size_t>(-lo)];
}

// Joint histogram over value pairs for R = 2.
Integer diagonal_pairs(const std::vector<std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, std::uint64_t>>>& hists) {
    std::map<std::pair<std::int64_t, std::int64_t>, Integer> cur{{{0, 0}, 1}};
    for (const auto& h : hists) {
        std::map<std::pair<std::int64_t, std::int64_t>, Integer> next;
        for (const auto& [key, count] : cur)
            for (const auto& [v, c] : h)
                next[{key.first + v.first, key.second + v.second}] += count * static_cast<unsigned long>(c);
        cur = std::move(next);
    }
    auto it = cur.find({0, 0});
    return it == cur.end() ? Integer(0) : it->second;
}

}  // namespace

CountResult zero_count_diagonal(const FormSystem& system, const Box& box, std::int64_t P, const ExecPolicy& policy) {
    const auto t0 = Clock::now();
    require_P(P);
    system.require_nonzero_integral("zero_count_diagonal");
    if (!system.is_diagonal()) throw InputError("zero_count_diagonal needs diagonal forms");
    if (system.size() > 2) throw InputError("zero_count_diagonal supports R <= 2");
    if (box.n() != system.n() || !box.is_symmetric_cube())
        throw InputError("zero_count_diagonal needs a cube symmetric about 0");

    const std::size_t n = system.n();
    const unsigned d = system.degree();
    const std::int64_t M = floor_of(box[0].hi * Rational(static_cast<long>(P))).get_si();

    // a[r][i]: coefficient of x_i^d in F_r
    std::vector<std::vector<Integer>> a(system.size(), std::vector<Integer>(n, 0));
    Integer span = 0;
    for (std::size_t r = 0; r < system.size(); ++r) {
        Integer s = 0;
        for (const auto& t : system[r].terms()) {
            const auto i = static_cast<std::size_t>(std::find(t.exps.begin(), t.exps.end(), d) - t.exps.begin());
            a[r][i] = t.coeff.get_num();
            s += abs(a[r][i]);
        }
        span = std::max<Integer>(span, s);
    }
    Integer md;
    mpz_pow_ui(md.get_mpz_t(), Integer(static_cast<long>(M)).get_mpz_t(), d);
    span *= md;
    if (!detail::fits_bits(span, 62)) throw InputError("value range too large for the diagonal fast path");

    CountResult out{P, 0, CountMethod::Diagonal, 0};
    const double points = std::pow(2.0 * static_cast<double>(M) + 1.0, static_cast<double>(n));
    // a partial histogram never has more entries than points or attainable values
    const double values = std::pow(2.0 * span.get_d() + 1.0, static_cast<double>(system.size()));
    check_guard(static_cast<double>(n) * std::min(points, values), kZeroCountGuard, policy, "zero_count_diagonal");
    // Dense offset arrays when the value range is modest, value maps otherwise.
    if (system.size() == 1 && span <= 50'000'000) {
        std::vector<std::vector<std::pair<std::int64_t, std::uint64_t>>> hists;
        for (std::size_t i = 0; i < n; ++i) {
            std::map<std::int64_t, std::uint64_t> h;
            const std::int64_t ai = a[0][i].get_si();
            for (std::int64_t x = -M; x <= M; ++x) ++h[ai * ipow<std::int64_t>(x, d)];
            hists.emplace_back(h.begin(), h.end());
        }
        if (points < std::ldexp(1.0, 126)) out.count = detail::to_integer(diagonal_dense<u128>(hists));
        else out.count = diagonal_dense<Integer>(hists);
    } else {
        std::vector<std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, std::uint64_t>>> hists;
        for (std::size_t i = 0; i < n; ++i) {
            std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> h;
            const std::int64_t a0 = a[0][i].get_si(), a1 = system.size() > 1 ? a[1][i].get_si() : 0;
            for (std::int64_t x = -M; x <= M; ++x) {
                const std::int64_t p = ipow<std::int64_t>(x, d);
                ++h[{a0 * p, a1 * p}];
            }
            hists.emplace_back(h.begin(), h.end());
        }
        out.count = diagonal_pairs(hists);
    }
    out.elapsed = seconds_since(t0);
    return out;
}

std::vector<CountResult> count_series(const FormSystem& system, const Box& box, std::span<const std::int64_t> Ps,
                                      const ExecPolicy& policy) {
    std::vector<CountResult> out;
    const bool diagonal = diagonal_eligible(system, box);
    for (auto P : Ps)
        out.push_back(diagonal ? zero_count_diagonal(system, box, P, policy) : zero_count_enum(system, box, P, policy));
    return out;
}

}  // namespace formcount
