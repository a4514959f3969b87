#include "formcount/sigma_star.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "detail/int_tensor.hpp"
#include "detail/modp.hpp"
#include "formcount/errors.hpp"

namespace formcount {

std::string to_string(UVerdict v) {
    switch (v) {
        case UVerdict::CertifiedNotInU: return "CERTIFIED_NOT_IN_U";
        case UVerdict::HeuristicInU: return "HEURISTIC_IN_U";
        case UVerdict::VacuousInU: return "VACUOUS_IN_U";
    }
    return "?";
}

std::string to_string(ScanStatus s) {
    switch (s) {
        case ScanStatus::Empty: return "empty";
        case ScanStatus::Ok: return "ok";
        case ScanStatus::Skipped: return "skipped";
    }
    return "?";
}

std::string to_string(Alternative a) {
    switch (a) {
        case Alternative::Large: return "ALTERNATIVE_1";
        case Alternative::Subspaces: return "ALTERNATIVE_2";
        case Alternative::Fail: return "FAIL";
    }
    return "?";
}

namespace {

bool is_zero_vector(std::span<const Rational> v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

void validate_point(const FormSystem& system, std::span<const Rational> beta, const TuplePoint& tuple) {
    if (beta.size() != system.size()) throw InputError("beta length does not match the number of forms");
    if (is_zero_vector(beta)) throw InputError("beta must be nonzero");
    if (tuple.arity() + 1 != system.degree())
        throw InputError("tuple needs d - 1 = " + std::to_string(system.degree() - 1) + " vectors");
    for (const auto& slot : tuple.slots) {
        if (slot.size() != system.n()) throw InputError("tuple vector length does not match n");
        if (is_zero_vector(slot)) throw InputError("tuple vectors must be nonzero");
    }
}

std::optional<std::size_t> rank_if_zero(const DerivativeTensor& tensor, const TuplePoint& tuple) {
    const Vector m = eval_m(tensor, tuple);
    if (!is_zero_vector(m)) return std::nullopt;
    return rank_exact(jacobian(tensor, tuple));
}

Vector to_rational(const std::vector<long>& v) { return Vector(v.begin(), v.end()); }

// Candidate directions for the structured phases: e_i, then e_i + e_j and
// e_i - e_j for i < j.
std::vector<std::vector<long>> support_two_vectors(std::size_t n) {
    std::vector<std::vector<long>> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<long> v(n, 0);
        v[i] = 1;
        out.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (long s : {1L, -1L}) {
                std::vector<long> v(n, 0);
                v[i] = 1;
                v[j] = s;
                out.push_back(v);
            }
    return out;
}

// e_r first, then the remaining projective points of {-1, 0, 1}^R (first
// nonzero entry 1).
std::vector<Vector> structured_betas(std::size_t R) {
    std::vector<Vector> out;
    for (std::size_t r = 0; r < R; ++r) {
        Vector e(R, 0);
        e[r] = 1;
        out.push_back(e);
    }
    if (R > 8) return out;
    std::vector<int> digits(R, 0);
    while (true) {
        std::size_t i = R;
        while (i > 0 && digits[i - 1] == 2) digits[--i] = 0;
        if (i == 0) break;
        ++digits[i - 1];
        Vector b(R);
        int nonzero = 0, first = 0;
        for (std::size_t r = 0; r < R; ++r) {
            b[r] = digits[r] - 1;
            if (digits[r] != 1) {
                if (nonzero == 0) first = digits[r] - 1;
                ++nonzero;
            }
        }
        if (nonzero >= 2 && first == 1) out.push_back(b);
    }
    return out;
}

struct Candidate {
    std::size_t beta_index;
    std::vector<std::size_t> dirs;  // indices into the support-2 list
};

// Structured candidates in search order, at most `limit` of them.
std::vector<Candidate> structured_candidates(std::size_t n, unsigned d, std::size_t n_betas, std::size_t limit) {
    std::vector<Candidate> out;
    const std::size_t slots = d - 1;
    const std::size_t n_dirs = n + n * (n - 1);
    for (int phase = 0; phase < 2; ++phase) {
        const std::size_t pool = phase == 0 ? n : n_dirs;
        for (std::size_t b = 0; b < n_betas; ++b) {
            std::vector<std::size_t> idx(slots, 0);
            while (true) {
                const bool all_basis = std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return i < n; });
                if (phase == 0 || !all_basis) {
                    if (out.size() >= limit) return out;
                    out.push_back({b, idx});
                }
                // next nondecreasing index tuple
                std::size_t i = slots;
                while (i > 0 && idx[i - 1] == pool - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < slots; ++j) idx[j] = idx[i - 1];
            }
        }
    }
    return out;
}

std::vector<long> random_nonzero(std::mt19937_64& rng, std::size_t size, long bound) {
    std::uniform_int_distribution<long> dist(-bound, bound);
    std::vector<long> v(size);
    do {
        for (auto& x : v) x = dist(rng);
    } while (std::all_of(v.begin(), v.end(), [](long x) { return x == 0; }));
    return v;
}

void keep_better(std::optional<Witness>& best, Witness w) {
    if (!best || w.rank < best->rank) best = std::move(w);
}

// A random beta and outer slots; the last slot runs over a kernel basis of
// y -> m(x^(1), ..., x^(d-2), y) plus one random combination.
std::optional<Witness> random_candidate(const FormSystem& system, std::uint64_t seed) {
    const std::size_t n = system.n(), R = system.size();
    const unsigned d = system.degree();
    std::mt19937_64 rng(seed);
    const Vector beta = R == 1 ? Vector{1} : to_rational(random_nonzero(rng, R, 3));
    std::vector<Vector> slots;
    for (unsigned k = 0; k + 2 < d; ++k) slots.push_back(to_rational(random_nonzero(rng, n, 2)));

    const DerivativeTensor tensor = derivative_tensor(beta_dot(system, beta));
    std::vector<Vector> probe = slots;
    Vector e0(n, 0);
    e0[0] = 1;
    probe.push_back(e0);
    const RationalMatrix J = jacobian(tensor, TuplePoint(probe));
    RationalMatrix A(n, n);
    const std::size_t offset = (d - 2) * n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = J(i, offset + j);
    auto kernel = kernel_basis(A);
    if (kernel.empty()) return std::nullopt;
    if (kernel.size() >= 2) {
        Vector combo(n, 0);
        std::uniform_int_distribution<long> dist(-3, 3);
        for (const auto& v : kernel) {
            const long c = dist(rng);
            for (std::size_t i = 0; i < n; ++i) combo[i] += c * v[i];
        }
        if (!is_zero_vector(combo)) kernel.push_back(combo);
    }
    std::optional<Witness> best;
    for (const auto& v : kernel) {
        std::vector<Vector> full = slots;
        full.push_back(v);
        TuplePoint tuple(std::move(full));
        if (auto r = rank_if_zero(tensor, tuple)) keep_better(best, Witness{beta, std::move(tuple), *r});
    }
    return best;
}

// Visits every vector of F_p^dim whose first nonzero coordinate is 1.
void for_each_projective(std::size_t dim, std::uint64_t p, const std::function<void(const std::vector<std::uint64_t>&)>& fn) {
    std::vector<std::uint64_t> v(dim, 0);
    for (std::size_t lead = 0; lead < dim; ++lead) {
        std::fill(v.begin(), v.end(), 0);
        v[lead] = 1;
        while (true) {
            fn(v);
            std::size_t i = dim;
            while (i > lead + 1 && v[i - 1] == p - 1) v[--i] = 0;
            if (i == lead + 1) break;
            ++v[i - 1];
        }
    }
}

using DenseMod = std::vector<std::uint64_t>;

// Contracts the leading indices of an order-r tensor (n^r entries) with the
// given vectors, leaving an order r - vecs.size() tensor.
DenseMod contract_mod(const DenseMod& t, std::size_t n, const std::vector<const std::vector<std::uint64_t>*>& vecs,
                      std::uint64_t p) {
    DenseMod cur = t;
    for (const auto* x : vecs) {
        const std::size_t block = cur.size() / n;
        DenseMod next(block, 0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto xj = (*x)[j];
            if (xj == 0) continue;
            for (std::size_t b = 0; b < block; ++b) next[b] = (next[b] + xj * cur[j * block + b]) % p;
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

std::optional<std::size_t> witness_rank(const FormSystem& system, std::span<const Rational> beta,
                                        const TuplePoint& tuple) {
    validate_point(system, beta, tuple);
    return rank_if_zero(derivative_tensor(beta_dot(system, beta)), tuple);
}

bool verify_witness(const FormSystem& system, const Witness& w) {
    const auto r = witness_rank(system, w.beta, w.tuple);
    return r && *r == w.rank;
}

double fp_scan_cost(const FormSystem& system, std::uint64_t p) {
    return std::pow(static_cast<double>(p),
                    static_cast<double>(system.size() + (system.degree() - 1) * system.n()));
}

FpScan sigma_star_fp_scan(const FormSystem& system, std::uint64_t p, const ExecPolicy& policy) {
    system.require_nonzero_integral("sigma_star_fp_scan");
    if (!detail::is_prime(p)) throw InputError("p must be prime");
    if (p > (1u << 20)) throw InputError("p is too large for an exhaustive scan");
    FpScan out;
    out.p = p;
    out.cost = fp_scan_cost(system, p);
    check_guard(out.cost, kFpScanGuard, policy, "F_p scan p^(R+(d-1)n)");

    const std::size_t n = system.n(), R = system.size();
    const unsigned d = system.degree();
    std::vector<DenseMod> tensors;
    for (const auto& f : system.forms()) {
        const auto dense = detail::dense_tensor<std::int64_t>(derivative_tensor(f));
        DenseMod t(dense.data.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto v = dense.data[i] % static_cast<std::int64_t>(p);
            t[i] = static_cast<std::uint64_t>(v < 0 ? v + static_cast<std::int64_t>(p) : v);
        }
        tensors.push_back(std::move(t));
    }

    std::size_t best = std::numeric_limits<std::size_t>::max();
    bool found = false;
    for_each_projective(R, p, [&](const std::vector<std::uint64_t>& beta) {
        DenseMod T(tensors.front().size(), 0);
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t i = 0; i < T.size(); ++i) T[i] = (T[i] + beta[r] * tensors[r][i]) % p;

        std::vector<std::vector<std::uint64_t>> slots(d - 1, std::vector<std::uint64_t>(n, 0));
        std::function<void(std::size_t)> outer = [&](std::size_t k) {
            if (k + 2 < d) {
                for_each_projective(n, p, [&](const std::vector<std::uint64_t>& x) {
                    slots[k] = x;
                    outer(k + 1);
                });
                return;
            }
            std::vector<const std::vector<std::uint64_t>*> heads;
            for (std::size_t s = 0; s + 2 < d; ++s) heads.push_back(&slots[s]);
            const DenseMod A = contract_mod(T, n, heads, p);  // A[j * n + i]
            detail::ModMatrix rows(n, std::vector<std::uint64_t>(n));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) rows[i][j] = A[j * n + i];
            const auto kernel = detail::kernel_mod(rows, n, p);
            if (kernel.empty()) return;
            for_each_projective(kernel.size(), p, [&](const std::vector<std::uint64_t>& c) {
                auto& y = slots[d - 2];
                std::fill(y.begin(), y.end(), 0);
                for (std::size_t b = 0; b < kernel.size(); ++b)
                    for (std::size_t i = 0; i < n; ++i) y[i] = (y[i] + c[b] * kernel[b][i]) % p;
                detail::ModMatrix J(n, std::vector<std::uint64_t>((d - 1) * n));
                for (std::size_t k2 = 0; k2 + 1 < d; ++k2) {
                    std::vector<const std::vector<std::uint64_t>*> others;
                    for (std::size_t s = 0; s + 1 < d; ++s)
                        if (s != k2) others.push_back(&slots[s]);
                    const DenseMod G = contract_mod(T, n, others, p);
                    for (std::size_t j = 0; j < n; ++j)
                        for (std::size_t i = 0; i < n; ++i) J[i][k2 * n + j] = G[j * n + i];
                }
                found = true;
                best = std::min(best, detail::rank_mod(std::move(J), p));
            });
        };
        outer(0);
    });

    if (!found) {
        out.status = ScanStatus::Empty;
    } else {
        out.status = ScanStatus::Ok;
        out.min_rank = best;
        out.sigma = static_cast<long>(n) - static_cast<long>(best);
    }
    return out;
}

namespace {

SigmaStarReport search(const FormSystem& system, std::size_t budget, std::span<const std::uint64_t> primes,
                       std::uint64_t seed, const ExecPolicy& policy) {
    system.require_nonzero_integral("sigma_star");
    if (budget == 0) throw InputError("search budget must be positive");
    const std::size_t n = system.n(), R = system.size();
    const unsigned d = system.degree();

    SigmaStarReport out;
    out.n = n;
    out.R = R;
    out.budget = budget;
    out.seed = seed;

    const auto betas = structured_betas(R);
    std::vector<DerivativeTensor> tensors;
    for (const auto& b : betas) tensors.push_back(derivative_tensor(beta_dot(system, b)));
    const auto dirs = support_two_vectors(n);
    const auto structured = structured_candidates(n, d, betas.size(), budget);

    const auto results = parallel_map<std::optional<Witness>>(budget, policy.workers, [&](std::size_t i) {
        if (i >= structured.size())
            return random_candidate(system, detail::derive_seed(seed, 0x7a4d, i - structured.size()));
        const auto& c = structured[i];
        std::vector<Vector> slots;
        for (auto k : c.dirs) slots.push_back(to_rational(dirs[k]));
        TuplePoint tuple(std::move(slots));
        std::optional<Witness> w;
        if (auto r = rank_if_zero(tensors[c.beta_index], tuple)) w = Witness{betas[c.beta_index], std::move(tuple), *r};
        return w;
    });
    out.budget_used = budget;
    for (const auto& r : results)
        if (r) keep_better(out.witness, *r);
    if (out.witness) out.lower_bound = static_cast<long>(n) - static_cast<long>(out.witness->rank);

    bool all_empty = !primes.empty();
    bool any_scanned = false;
    for (auto p : primes) {
        const double cost = fp_scan_cost(system, p);
        if (cost > kFpScanGuard && !policy.unsafe_guard) {
            FpScan skipped;
            skipped.p = p;
            skipped.cost = cost;
            out.fp_scans.push_back(skipped);
            continue;
        }
        auto scan = sigma_star_fp_scan(system, p, policy);
        any_scanned = true;
        if (scan.status != ScanStatus::Empty) all_empty = false;
        out.fp_scans.push_back(std::move(scan));
    }

    if (out.witness && static_cast<long>(out.witness->rank) <= static_cast<long>(n) - static_cast<long>(R))
        out.verdict = UVerdict::CertifiedNotInU;
    else if (!out.witness && any_scanned && all_empty)
        out.verdict = UVerdict::VacuousInU;
    else
        out.verdict = UVerdict::HeuristicInU;
    return out;
}

const std::vector<std::uint64_t> kDefaultScanPrimes{3, 5, 7};

}  // namespace

SigmaStarReport sigma_star_lower_bound(const FormSystem& system, std::size_t budget, std::uint64_t seed,
                                       const ExecPolicy& policy) {
    return search(system, budget, kDefaultScanPrimes, seed, policy);
}

SigmaStarReport u_membership(const FormSystem& system, std::size_t budget, std::span<const std::uint64_t> primes,
                             std::uint64_t seed, const ExecPolicy& policy) {
    if (system.n() < system.size()) throw InputError("U-membership needs n >= R");
    return search(system, budget, primes, seed, policy);
}

namespace {

struct ScaledJacobian {
    Eigen::MatrixXd M;
    Rational m_norm;
    Rational scale;  // ||beta|| prod ||x^(i)||
};

ScaledJacobian scaled_jacobian(const FormSystem& system, std::span<const Rational> beta, const TuplePoint& tuple) {
    const DerivativeTensor tensor = derivative_tensor(beta_dot(system, beta));
    ScaledJacobian out;
    out.m_norm = sup_norm(eval_m(tensor, tuple));
    out.scale = sup_norm(beta);
    std::vector<Rational> norms;
    for (const auto& slot : tuple.slots) {
        norms.push_back(sup_norm(slot));
        out.scale *= norms.back();
    }
    const RationalMatrix J = jacobian(tensor, tuple);
    const std::size_t n = system.n();
    out.M.resize(static_cast<Eigen::Index>(J.rows()), static_cast<Eigen::Index>(J.cols()));
    for (std::size_t r = 0; r < J.rows(); ++r)
        for (std::size_t c = 0; c < J.cols(); ++c) {
            Rational v = J(r, c) * norms[c / n] / out.scale;
            out.M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v.get_d();
        }
    return out;
}

bool check_subspace(const Eigen::MatrixXd& M, const std::vector<std::size_t>& cols, double c2, std::uint64_t seed,
                    std::size_t samples) {
    const auto ncols = M.cols();
    auto passes = [&](const Eigen::VectorXd& w) {
        const double lhs = (M * w).cwiseAbs().maxCoeff();
        return lhs * kVerifySlack >= c2 * w.cwiseAbs().maxCoeff();
    };
    for (auto c : cols) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(ncols);
        w(static_cast<Eigen::Index>(c)) = 1;
        if (!passes(w)) return false;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (std::size_t s = 0; s < samples; ++s) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(ncols);
        for (auto c : cols) w(static_cast<Eigen::Index>(c)) = gauss(rng);
        if (w.cwiseAbs().maxCoeff() == 0) continue;
        if (!passes(w)) return false;
    }
    return true;
}

}  // namespace

DichotomyCheck dichotomy_check(const FormSystem& system, std::span<const Rational> beta, const TuplePoint& tuple,
                               const Rational& c1, const Rational& c2, long s, std::uint64_t seed) {
    validate_point(system, beta, tuple);
    if (sgn(c1) <= 0 || sgn(c2) <= 0) throw InputError("c1 and c2 must be positive");
    const long n = static_cast<long>(system.n());
    if (s < 0 || s > n) throw InputError("s must lie in [0, n]");

    DichotomyCheck out;
    out.c1 = c1;
    out.c2 = c2;
    out.s = s;
    const auto sj = scaled_jacobian(system, beta, tuple);
    out.m_norm = sj.m_norm;
    out.threshold = c1 * sj.scale;
    if (out.m_norm >= out.threshold) {
        out.alternative = Alternative::Large;
        out.verified = true;
        return out;
    }

    const auto target = static_cast<std::size_t>(n - s);
    out.subspaces.assign(system.degree() - 1, {});
    if (target == 0) {
        out.alternative = Alternative::Subspaces;
        out.bound = std::numeric_limits<double>::infinity();
        out.verified = true;
        return out;
    }
    const auto cols = best_column_subset(sj.M, target, out.heuristic);
    out.bound = min_singular_value(sj.M, cols) / std::sqrt(static_cast<double>(n));
    for (auto c : cols) out.subspaces[c / system.n()].push_back(c % system.n());
    if (out.bound >= c2.get_d() && check_subspace(sj.M, cols, c2.get_d(), seed, 100)) {
        out.alternative = Alternative::Subspaces;
        out.verified = true;
    } else {
        out.alternative = Alternative::Fail;
    }
    return out;
}

bool verify_dichotomy_check(const FormSystem& system, std::span<const Rational> beta, const TuplePoint& tuple,
                            const DichotomyCheck& check, std::uint64_t seed) {
    validate_point(system, beta, tuple);
    const auto sj = scaled_jacobian(system, beta, tuple);
    switch (check.alternative) {
        case Alternative::Large: return sj.m_norm >= check.c1 * sj.scale;
        case Alternative::Subspaces: {
            std::size_t total = 0;
            std::vector<std::size_t> cols;
            for (std::size_t k = 0; k < check.subspaces.size(); ++k)
                for (auto j : check.subspaces[k]) {
                    cols.push_back(k * system.n() + j);
                    ++total;
                }
            if (static_cast<long>(total) != static_cast<long>(system.n()) - check.s) return false;
            if (cols.empty()) return true;
            return check_subspace(sj.M, cols, check.c2.get_d(), seed, 100);
        }
        case Alternative::Fail: return false;
    }
    return false;
}

Rational calibrate_c1(const FormSystem& system, std::uint64_t seed, std::size_t samples) {
    const std::size_t n = system.n(), R = system.size();
    const unsigned d = system.degree();
    std::vector<std::vector<double>> tensors;
    for (const auto& f : system.forms()) {
        const auto t = derivative_tensor(f);
        std::vector<double> dense(detail::ipow(n, d), 0.0);
        for (const auto& [key, value] : t.entries()) {
            std::vector<unsigned> perm = key;
            do {
                std::size_t idx = 0;
                for (auto j : perm) idx = idx * n + j;
                dense[idx] = value.get_d();
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        tensors.push_back(std::move(dense));
    }
    std::mt19937_64 rng(detail::derive_seed(seed, 0xc1));
    std::uniform_real_distribution<double> unif(-1, 1);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> beta(R), T;
    for (std::size_t s = 0; s < samples; ++s) {
        double scale = 0;
        for (auto& b : beta) {
            b = unif(rng);
            scale = std::max(scale, std::abs(b));
        }
        T.assign(tensors.front().size(), 0.0);
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t i = 0; i < T.size(); ++i) T[i] += beta[r] * tensors[r][i];
        for (unsigned k = 0; k + 1 < d; ++k) {
            std::vector<double> x(n);
            double norm = 0;
            for (auto& v : x) {
                v = unif(rng);
                norm = std::max(norm, std::abs(v));
            }
            scale *= norm;
            const std::size_t block = T.size() / n;
            std::vector<double> next(block, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t b = 0; b < block; ++b) next[b] += x[j] * T[j * block + b];
            T = std::move(next);
        }
        double m = 0;
        for (double v : T) m = std::max(m, std::abs(v));
        if (scale > 0) best = std::min(best, m / scale);
    }
    if (!std::isfinite(best)) return 0;
    return Rational(best);
}

}  // namespace formcount
