#include "formcount/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "detail/modp.hpp"
#include "formcount/errors.hpp"
#include "formcount/sigma_star.hpp"

namespace formcount {

using detail::mulmod;
using detail::powmod;

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    if (bound < 2) return out;
    std::vector<char> composite(bound + 1, 0);
    for (std::uint64_t p = 2; p <= bound; ++p) {
        if (composite[p]) continue;
        out.push_back(p);
        for (std::uint64_t m = p * p; m <= bound; m += p) composite[m] = 1;
    }
    return out;
}

namespace {

std::uint64_t modulus(std::uint64_t p, unsigned k) {
    if (!detail::is_prime(p)) throw InputError("modulus base " + std::to_string(p) + " is not prime");
    if (k == 0) throw InputError("level k must be at least 1");
    if (std::pow(static_cast<double>(p), k) > 9e18) throw InputError("p^k does not fit in 64 bits");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) q *= p;
    return q;
}

Rational normalize(const Integer& raw, std::uint64_t p, unsigned k, std::size_t n, std::size_t R) {
    Integer pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
    Rational out = raw;
    const long e = static_cast<long>(n) - static_cast<long>(R);
    Integer scale;
    mpz_pow_ui(scale.get_mpz_t(), pk.get_mpz_t(), static_cast<unsigned long>(std::labs(e)));
    if (e >= 0)
        out /= scale;
    else
        out *= scale;
    out.canonicalize();
    return out;
}

// Counts residues x mod q with F(x) = 0 by assigning coordinates in order and
// carrying each monomial's partial product; the last coordinate is handled as
// a univariate polynomial.
class ResidueCounter {
public:
    ResidueCounter(const FormSystem& system, std::uint64_t q) : n_(system.n()), d_(system.degree()), q_(q) {
        for (const auto& f : system.forms()) {
            const auto terms = detail::reduce_form(f, q);
            FormTerms ft;
            for (const auto& t : terms) {
                ft.exps.push_back(t.exps);
                ft.coeff.push_back(t.coeff);
            }
            forms_.push_back(std::move(ft));
        }
    }

    std::uint64_t count_all() const {
        std::vector<std::vector<std::uint64_t>> partial;
        for (const auto& f : forms_) partial.push_back(f.coeff);
        return recurse(0, partial);
    }

    std::uint64_t count_with_first(std::uint64_t v0) const {
        std::vector<std::vector<std::uint64_t>> partial;
        for (const auto& f : forms_) {
            std::vector<std::uint64_t> p(f.coeff.size());
            for (std::size_t t = 0; t < p.size(); ++t) p[t] = mulmod(f.coeff[t], powmod(v0, f.exps[t][0], q_), q_);
            partial.push_back(std::move(p));
        }
        return recurse(1, partial);
    }

private:
    struct FormTerms {
        std::vector<Exponents> exps;
        std::vector<std::uint64_t> coeff;
    };

    std::uint64_t recurse(std::size_t i, const std::vector<std::vector<std::uint64_t>>& partial) const {
        if (i + 1 == n_) return count_last(partial);
        std::uint64_t total = 0;
        std::vector<std::uint64_t> pw(d_ + 1);
        std::vector<std::vector<std::uint64_t>> next = partial;
        for (std::uint64_t v = 0; v < q_; ++v) {
            pw[0] = 1 % q_;
            for (unsigned e = 1; e <= d_; ++e) pw[e] = mulmod(pw[e - 1], v, q_);
            for (std::size_t f = 0; f < forms_.size(); ++f)
                for (std::size_t t = 0; t < partial[f].size(); ++t)
                    next[f][t] = mulmod(partial[f][t], pw[forms_[f].exps[t][i]], q_);
            total += recurse(i + 1, next);
        }
        return total;
    }

    std::uint64_t count_last(const std::vector<std::vector<std::uint64_t>>& partial) const {
        const std::size_t last = n_ - 1;
        std::vector<std::vector<std::uint64_t>> poly(forms_.size(), std::vector<std::uint64_t>(d_ + 1, 0));
        for (std::size_t f = 0; f < forms_.size(); ++f)
            for (std::size_t t = 0; t < partial[f].size(); ++t) {
                auto& c = poly[f][forms_[f].exps[t][last]];
                c = (c + partial[f][t]) % q_;
            }
        std::uint64_t count = 0;
        for (std::uint64_t v = 0; v < q_; ++v) {
            bool zero = true;
            for (std::size_t f = 0; f < poly.size() && zero; ++f) {
                std::uint64_t acc = 0;
                for (unsigned e = d_ + 1; e-- > 0;) acc = (mulmod(acc, v, q_) + poly[f][e]) % q_;
                zero = acc == 0;
            }
            count += zero;
        }
        return count;
    }

    std::size_t n_;
    unsigned d_;
    std::uint64_t q_;
    std::vector<FormTerms> forms_;
};

// #{x mod q : sum a_i x_i^d = 0}. Every histogram involved is invariant under
// multiplication by G = {u^d : u a unit}, so values are tracked per G-orbit.
Integer diagonal_residue_count(const Form& f, std::uint64_t p, std::uint64_t q) {
    const std::size_t n = f.n();
    const unsigned d = f.degree();
    std::vector<std::uint64_t> a(n, 0);
    for (const auto& t : f.terms())
        for (std::size_t i = 0; i < n; ++i)
            if (t.exps[i] == d) a[i] = detail::residue(t.coeff, q);

    std::vector<std::uint64_t> dth(q);
    for (std::uint64_t x = 0; x < q; ++x) dth[x] = powmod(x, d, q);

    std::vector<char> in_group(q, 0);
    std::vector<std::uint64_t> group;
    for (std::uint64_t u = 1; u < q; ++u)
        if (u % p != 0 && !in_group[dth[u]]) {
            in_group[dth[u]] = 1;
            group.push_back(dth[u]);
        }

    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> label(q, kUnset);
    std::vector<std::uint64_t> reps;
    for (std::uint64_t v = 0; v < q; ++v) {
        if (label[v] != kUnset) continue;
        const auto id = static_cast<std::uint32_t>(reps.size());
        reps.push_back(v);
        for (auto g : group) label[mulmod(g, v, q)] = id;
    }

    std::vector<Integer> cur(reps.size(), 0);
    cur[label[0]] = 1;
    std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, std::uint64_t>>> hist_cache;
    for (std::size_t i = 0; i < n; ++i) {
        auto& hist = hist_cache[a[i]];
        if (hist.empty()) {
            std::vector<std::uint64_t> h(q, 0);
            for (std::uint64_t x = 0; x < q; ++x) ++h[mulmod(a[i], dth[x], q)];
            for (std::uint64_t w = 0; w < q; ++w)
                if (h[w]) hist.emplace_back(w, h[w]);
        }
        std::vector<Integer> next(reps.size(), 0);
        for (std::size_t id = 0; id < reps.size(); ++id) {
            const auto r = reps[id];
            Integer acc = 0;
            for (const auto& [w, c] : hist) {
                const auto& prev = cur[label[(r + q - w) % q]];
                if (sgn(prev) != 0) acc += prev * c;
            }
            next[id] = acc;
        }
        cur = std::move(next);
    }
    return cur[label[0]];
}

bool diagonal_local_path(const FormSystem& system) { return system.size() == 1 && system.is_diagonal(); }

}  // namespace

LocalDensity local_count_enumerate(const FormSystem& system, std::uint64_t p, unsigned k, const ExecPolicy& policy) {
    system.require_nonzero_integral("local_count");
    const auto q = modulus(p, k);
    const std::size_t n = system.n();
    check_guard(std::pow(static_cast<double>(q), static_cast<double>(n)), kLocalCountGuard, policy,
                "residue enumeration p^(kn)");
    ResidueCounter counter(system, q);
    Integer raw;
    if (n == 1) {
        raw = static_cast<unsigned long>(counter.count_all());
    } else {
        const auto parts = parallel_map<std::uint64_t>(q, policy.workers,
                                                       [&](std::size_t v) { return counter.count_with_first(v); });
        Integer total = 0;
        for (auto c : parts) total += static_cast<unsigned long>(c);
        raw = total;
    }
    return {p, k, raw, normalize(raw, p, k, n, system.size())};
}

LocalDensity local_count(const FormSystem& system, std::uint64_t p, unsigned k, const ExecPolicy& policy) {
    system.require_nonzero_integral("local_count");
    if (!diagonal_local_path(system)) return local_count_enumerate(system, p, k, policy);
    const auto q = modulus(p, k);
    check_guard(static_cast<double>(q), 1e8, policy, "diagonal residue table p^k");
    const Integer raw = diagonal_residue_count(system[0], p, q);
    return {p, k, raw, normalize(raw, p, k, system.n(), system.size())};
}

SingularSeriesEstimate singular_series(const FormSystem& system, std::uint64_t prime_bound, unsigned k_max,
                                       const ExecPolicy& policy) {
    system.require_nonzero_integral("singular_series");
    if (k_max == 0) throw InputError("k_max must be at least 1");
    const bool diagonal = diagonal_local_path(system);
    SingularSeriesEstimate out;
    out.product = 1;
    for (auto p : primes_up_to(prime_bound)) {
        PrimeFactor pf;
        pf.p = p;
        for (unsigned k = 1; k <= k_max; ++k) {
            const double q = std::pow(static_cast<double>(p), k);
            const double cost = diagonal ? q : std::pow(q, static_cast<double>(system.n()));
            const double limit = diagonal ? 1e8 : kLocalCountGuard;
            if (k > 1 && cost > limit && !policy.unsafe_guard) break;
            pf.levels.push_back(local_count(system, p, k, policy).normalized);
            pf.k_reached = k;
        }
        pf.factor = pf.levels.back();
        if (pf.levels.size() >= 2) {
            const Rational& last = pf.levels.back();
            const Rational& prev = pf.levels[pf.levels.size() - 2];
            const Rational diff = abs(last - prev);
            pf.stabilized = sgn(last) == 0 ? sgn(prev) == 0 : diff <= Rational(1, 1000) * abs(last);
        }
        out.product *= pf.factor;
        out.primes.push_back(std::move(pf));
    }
    return out;
}

namespace {

struct DoubleTerm {
    double coeff;
    Exponents exps;
};

using DoubleForm = std::vector<DoubleTerm>;

DoubleForm to_double(const Form& f) {
    DoubleForm out;
    for (const auto& t : f.terms()) out.push_back({t.coeff.get_d(), t.exps});
    return out;
}

double eval(const DoubleForm& f, const double* x, std::size_t n) {
    double acc = 0;
    for (const auto& t : f) {
        double v = t.coeff;
        for (std::size_t i = 0; i < n; ++i)
            for (unsigned e = 0; e < t.exps[i]; ++e) v *= x[i];
        acc += v;
    }
    return acc;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct BoxSampler {
    std::vector<double> lo, width;
    explicit BoxSampler(const Box& box) {
        for (const auto& iv : box.intervals()) {
            lo.push_back(iv.lo.get_d());
            width.push_back(Rational(iv.hi - iv.lo).get_d());
        }
    }
    void draw(std::mt19937_64& rng, std::vector<double>& x) const {
        for (std::size_t i = 0; i < lo.size(); ++i) x[i] = lo[i] + width[i] * unit_uniform(rng);
    }
};

void require_box(const FormSystem& system, const Box& box) {
    if (box.n() != system.n()) throw InputError("box dimension does not match the number of variables");
}

}  // namespace

double sampled_scale(const FormSystem& system, const Box& box, std::uint64_t seed, std::size_t samples) {
    require_box(system, box);
    std::vector<DoubleForm> forms;
    for (const auto& f : system.forms()) forms.push_back(to_double(f));
    BoxSampler sampler(box);
    std::mt19937_64 rng(detail::derive_seed(seed, 0x5ca1e));
    std::vector<double> x(system.n());
    double scale = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        sampler.draw(rng, x);
        for (const auto& f : forms) scale = std::max(scale, std::abs(eval(f, x.data(), x.size())));
    }
    return scale;
}

std::vector<double> default_eps_ladder(const FormSystem& system, const Box& box, std::uint64_t seed) {
    const double scale = sampled_scale(system, box, seed);
    if (!(scale > 0)) throw InputError("forms vanish on the sampled box; no natural epsilon scale");
    return {0.2 * scale, 0.1 * scale, 0.05 * scale, 0.025 * scale};
}

SingularIntegralEstimate singular_integral(const FormSystem& system, const Box& box, std::span<const double> eps,
                                           std::size_t samples, std::uint64_t seed, const ExecPolicy& policy) {
    require_box(system, box);
    if (eps.size() < 3) throw InputError("epsilon ladder needs at least 3 rungs");
    for (std::size_t j = 0; j < eps.size(); ++j) {
        if (!(eps[j] > 0)) throw InputError("epsilon ladder entries must be positive");
        if (j > 0 && !(eps[j] < eps[j - 1])) throw InputError("epsilon ladder must be strictly decreasing");
    }
    if (samples < 10'000) throw InputError("singular integral needs at least 1e4 samples per rung");

    std::vector<DoubleForm> forms;
    for (const auto& f : system.forms()) forms.push_back(to_double(f));
    const BoxSampler sampler(box);
    const double volume = box.volume().get_d();
    const std::size_t n = system.n();
    const double R = static_cast<double>(system.size());

    constexpr std::size_t kBatch = 10'000;
    const std::size_t batches = (samples + kBatch - 1) / kBatch;
    const auto hits = parallel_map<std::uint64_t>(eps.size() * batches, policy.workers, [&](std::size_t task) {
        const std::size_t rung = task / batches, batch = task % batches;
        const std::size_t size = std::min(kBatch, samples - batch * kBatch);
        std::mt19937_64 rng(detail::derive_seed(seed, rung + 1, batch));
        std::vector<double> x(n);
        std::uint64_t h = 0;
        for (std::size_t s = 0; s < size; ++s) {
            sampler.draw(rng, x);
            bool inside = true;
            for (const auto& f : forms)
                if (!(std::abs(eval(f, x.data(), n)) < eps[rung])) {
                    inside = false;
                    break;
                }
            h += inside;
        }
        return h;
    });

    SingularIntegralEstimate out;
    out.seed = seed;
    out.samples = samples;
    out.eps.assign(eps.begin(), eps.end());
    for (std::size_t j = 0; j < eps.size(); ++j) {
        std::uint64_t h = 0;
        for (std::size_t b = 0; b < batches; ++b) h += hits[j * batches + b];
        const double phat = static_cast<double>(h) / static_cast<double>(samples);
        const double norm = volume / std::pow(2 * eps[j], R);
        out.estimate.push_back(norm * phat);
        out.stderr_.push_back(norm * std::sqrt(phat * (1 - phat) / static_cast<double>(samples)));
    }

    // Least-squares line through (eps_j, estimate_j); the intercept is a fixed
    // linear combination sum c_j estimate_j of independent rungs.
    const double m = static_cast<double>(eps.size());
    double mean = 0;
    for (double e : eps) mean += e / m;
    double sxx = 0;
    for (double e : eps) sxx += (e - mean) * (e - mean);
    double value = 0, var = 0;
    for (std::size_t j = 0; j < eps.size(); ++j) {
        const double c = 1 / m - mean * (eps[j] - mean) / sxx;
        value += c * out.estimate[j];
        var += c * c * out.stderr_[j] * out.stderr_[j];
    }
    out.extrapolated = value;
    out.extrapolated_stderr = std::sqrt(var);
    return out;
}

Prediction predict_main_term(const FormSystem& system, std::int64_t P, const SingularSeriesEstimate& series,
                             const SingularIntegralEstimate& integral) {
    if (P < 1) throw InputError("P must be positive");
    const double S = series.product.get_d();
    const double e = static_cast<double>(system.n()) - static_cast<double>(system.degree() * system.size());
    const double growth = std::pow(static_cast<double>(P), e);
    if (S == 0 || integral.extrapolated == 0) return {0, 0};
    return {integral.extrapolated * S * growth, integral.extrapolated_stderr * std::abs(S) * growth};
}

std::optional<std::vector<double>> find_smooth_real_point(const FormSystem& system, const Box& box,
                                                          std::uint64_t seed, std::size_t starts) {
    require_box(system, box);
    const std::size_t n = system.n(), R = system.size();
    double scale = 0;
    for (const auto& f : system.forms()) {
        double s = 0;
        for (const auto& t : f.terms()) s += std::abs(t.coeff.get_d());
        scale = std::max(scale, s);
    }
    if (scale == 0) return std::nullopt;

    std::vector<DoubleForm> forms;
    std::vector<std::vector<DoubleForm>> grads(R);
    for (std::size_t r = 0; r < R; ++r) {
        forms.push_back(to_double(system[r]));
        for (std::size_t j = 0; j < n; ++j) grads[r].push_back(to_double(partial_derivative(system[r], j)));
    }
    const BoxSampler sampler(box);
    std::vector<double> lo = sampler.lo, hi(n);
    for (std::size_t i = 0; i < n; ++i) hi[i] = lo[i] + sampler.width[i];

    std::mt19937_64 rng(detail::derive_seed(seed, 0x5700));
    std::vector<double> x(n);
    Eigen::VectorXd F(static_cast<Eigen::Index>(R));
    Eigen::MatrixXd J(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(n));
    auto evaluate_at = [&] {
        for (std::size_t r = 0; r < R; ++r) {
            F(static_cast<Eigen::Index>(r)) = eval(forms[r], x.data(), n);
            for (std::size_t j = 0; j < n; ++j)
                J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = eval(grads[r][j], x.data(), n);
        }
    };
    for (std::size_t start = 0; start < starts; ++start) {
        sampler.draw(rng, x);
        for (int iter = 0; iter < 100; ++iter) {
            evaluate_at();
            if (F.cwiseAbs().maxCoeff() <= 1e-14 * scale) break;
            const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(F);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = std::clamp(x[i] - step(static_cast<Eigen::Index>(i)), lo[i], hi[i]);
        }
        evaluate_at();
        if (!(F.cwiseAbs().maxCoeff() <= 1e-10 * scale)) continue;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        if (svd.singularValues().minCoeff() > 1e-6 * scale) return x;
    }
    return std::nullopt;
}

namespace {

unsigned valuation(const Integer& z, std::uint64_t p, unsigned cap) {
    if (sgn(z) == 0) return cap;
    unsigned v = 0;
    Integer t = z;
    while (v < cap && mpz_divisible_ui_p(t.get_mpz_t(), p)) {
        t /= static_cast<unsigned long>(p);
        ++v;
    }
    return v;
}

Integer det_exact(std::vector<std::vector<Integer>> a) {
    // Bareiss elimination on a square integer matrix.
    const std::size_t m = a.size();
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = k;
        while (piv < m && sgn(a[piv][k]) == 0) ++piv;
        if (piv == m) return 0;
        if (piv != k) {
            std::swap(a[piv], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < m; ++i) {
            for (std::size_t j = k + 1; j < m; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        }
        prev = a[k][k];
    }
    return sign * a[m - 1][m - 1];
}

// Smallest valuation over the R x R minors of the Jacobian at x, capped.
unsigned minor_valuation(const std::vector<std::vector<Form>>& grads, const std::vector<std::uint64_t>& x,
                         std::uint64_t p, unsigned cap) {
    const std::size_t R = grads.size(), n = x.size();
    std::vector<Rational> point(x.begin(), x.end());
    std::vector<std::vector<Integer>> J(R, std::vector<Integer>(n));
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t j = 0; j < n; ++j) J[r][j] = evaluate(grads[r][j], point).get_num();
    unsigned best = cap;
    std::vector<std::size_t> cols(R);
    for (std::size_t i = 0; i < R; ++i) cols[i] = i;
    while (best > 0) {
        std::vector<std::vector<Integer>> sub(R, std::vector<Integer>(R));
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < R; ++c) sub[r][c] = J[r][cols[c]];
        best = std::min(best, valuation(det_exact(sub), p, cap));
        std::size_t i = R;
        while (i > 0 && cols[i - 1] == n - R + i - 1) --i;
        if (i == 0) break;
        ++cols[i - 1];
        for (std::size_t j = i; j < R; ++j) cols[j] = cols[j - 1] + 1;
    }
    return best;
}

}  // namespace

std::optional<PadicPoint> find_smooth_padic_point(const FormSystem& system, std::uint64_t p, unsigned k_max,
                                                  std::uint64_t seed) {
    system.require_nonzero_integral("find_smooth_padic_point");
    if (!detail::is_prime(p)) throw InputError("p must be prime");
    const std::size_t n = system.n(), R = system.size();
    if (R > n) return std::nullopt;
    std::vector<std::vector<Form>> grads(R);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t j = 0; j < n; ++j) grads[r].push_back(partial_derivative(system[r], j));

    for (unsigned k = 1; k <= k_max; k += 2) {
        const auto q = modulus(p, k);
        const unsigned v_allowed = (k - 1) / 2;
        std::vector<std::vector<detail::ModTerm>> forms;
        for (const auto& f : system.forms()) forms.push_back(detail::reduce_form(f, q));

        auto accept = [&](const std::vector<std::uint64_t>& x) -> std::optional<PadicPoint> {
            if (std::all_of(x.begin(), x.end(), [&](std::uint64_t v) { return v % p == 0; })) return std::nullopt;
            for (const auto& f : forms)
                if (detail::eval_mod(f, x, q) != 0) return std::nullopt;
            const unsigned v = minor_valuation(grads, x, p, v_allowed + 1);
            if (v > v_allowed) return std::nullopt;
            return PadicPoint{x, k, v};
        };

        std::vector<std::uint64_t> x(n, 0);
        if (std::pow(static_cast<double>(q), static_cast<double>(n)) <= 1e7) {
            while (true) {
                if (auto hit = accept(x)) return hit;
                std::size_t i = n;
                while (i > 0 && x[i - 1] == q - 1) x[--i] = 0;
                if (i == 0) break;
                ++x[i - 1];
            }
        } else {
            std::mt19937_64 rng(detail::derive_seed(seed, p, k));
            std::uniform_int_distribution<std::uint64_t> dist(0, q - 1);
            for (int trial = 0; trial < 1'000'000; ++trial) {
                for (auto& v : x) v = dist(rng);
                if (auto hit = accept(x)) return hit;
            }
        }
    }
    return std::nullopt;
}

AsymptoticReport asymptotic_report(const FormSystem& system, const Box& box, std::span<const std::int64_t> Ps,
                                   const AsymptoticOptions& options, const ExecPolicy& policy) {
    system.require_nonzero_integral("asymptotic_report");
    require_box(system, box);
    AsymptoticReport out;
    out.short_sided_box = box.has_short_sides();
    out.series = singular_series(system, options.prime_bound, options.k_max, policy);
    const auto eps = options.eps.empty() ? default_eps_ladder(system, box, options.seed) : options.eps;
    out.integral = singular_integral(system, box, eps, options.samples, options.seed, policy);

    for (auto& count : count_series(system, box, Ps, policy)) {
        AsymptoticRow row;
        row.prediction = predict_main_term(system, count.P, out.series, out.integral);
        if (row.prediction.value > 0) {
            row.ratio = mpq_class(count.count).get_d() / row.prediction.value;
            row.distance = std::abs(row.ratio - 1);
        } else {
            row.ratio = std::numeric_limits<double>::quiet_NaN();
            row.distance = std::numeric_limits<double>::infinity();
        }
        row.count = std::move(count);
        out.rows.push_back(std::move(row));
    }
    out.distance_non_increasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (!(out.rows[i].distance <= out.rows[i - 1].distance)) out.distance_non_increasing = false;

    out.real_point = find_smooth_real_point(system, box, options.seed);
    out.real_positivity_ok = out.real_point.has_value();
    for (auto p : primes_up_to(options.prime_bound))
        if (!find_smooth_padic_point(system, p, options.k_max, options.seed))
            out.primes_without_smooth_point.push_back(p);
    out.padic_positivity_ok = out.primes_without_smooth_point.empty();

    if (system.n() >= system.size()) {
        const std::vector<std::uint64_t> primes{3, 5, 7};
        const auto u = u_membership(system, options.sigma_budget, primes, options.seed, policy);
        out.u_verdict = to_string(u.verdict);
        out.sigma_star_lower_bound = u.lower_bound;
    } else {
        out.u_verdict = "NOT_APPLICABLE";
    }
    return out;
}

}  // namespace formcount
