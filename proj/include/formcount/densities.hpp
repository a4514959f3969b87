#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "formcount/exec.hpp"
#include "formcount/forms.hpp"
#include "formcount/zero_count.hpp"

namespace formcount {

/// Hard limit on p^(kn) for the generic residue enumeration.
inline constexpr double kLocalCountGuard = 1e9;

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound);

/// #{x mod p^k : F(x) = 0 mod p^k} and its normalization by p^(k(n-R)).
struct LocalDensity {
    std::uint64_t p = 0;
    unsigned k = 0;
    Integer raw;
    Rational normalized;
};

/// Exact residue count. Single diagonal forms use a histogram convolution
/// over the orbits of multiplication by d-th powers of units; everything
/// else enumerates residues (guarded).
LocalDensity local_count(const FormSystem& system, std::uint64_t p, unsigned k, const ExecPolicy& policy = {});

/// Same count, always by residue enumeration.
LocalDensity local_count_enumerate(const FormSystem& system, std::uint64_t p, unsigned k,
                                   const ExecPolicy& policy = {});

struct PrimeFactor {
    std::uint64_t p = 0;
    /// normalized densities for k = 1 .. k_reached
    std::vector<Rational> levels;
    unsigned k_reached = 0;
    Rational factor;
    /// relative change between the last two levels is at most 1e-3
    bool stabilized = false;
};

struct SingularSeriesEstimate {
    std::vector<PrimeFactor> primes;
    Rational product;
};

inline constexpr double kStabilizationTolerance = 1e-3;

/// Truncated product over p <= prime_bound of the density at the highest
/// level k <= k_max that fits the enumeration guard. Throws GuardExceeded
/// only if some prime cannot be evaluated even at k = 1.
SingularSeriesEstimate singular_series(const FormSystem& system, std::uint64_t prime_bound, unsigned k_max,
                                       const ExecPolicy& policy = {});

struct SingularIntegralEstimate {
    std::vector<double> eps;
    std::vector<double> estimate;
    std::vector<double> stderr_;
    double extrapolated = 0;
    double extrapolated_stderr = 0;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
};

/// max_i sup_B |F_i| estimated from `samples` uniform points.
double sampled_scale(const FormSystem& system, const Box& box, std::uint64_t seed, std::size_t samples = 10'000);

/// (0.2, 0.1, 0.05, 0.025) * sampled_scale.
std::vector<double> default_eps_ladder(const FormSystem& system, const Box& box, std::uint64_t seed);

/// Monte-Carlo estimates of vol{x in B : |F_i(x)| < eps for all i} / (2 eps)^R
/// for each rung, extrapolated to eps -> 0 by a least-squares line in eps.
SingularIntegralEstimate singular_integral(const FormSystem& system, const Box& box, std::span<const double> eps,
                                           std::size_t samples, std::uint64_t seed, const ExecPolicy& policy = {});

struct Prediction {
    double value = 0;
    double stderr_ = 0;
};

/// I * S * P^(n - dR) with the integral's standard error propagated.
Prediction predict_main_term(const FormSystem& system, std::int64_t P, const SingularSeriesEstimate& series,
                             const SingularIntegralEstimate& integral);

/// A point of the box where F vanishes to 1e-10 * scale and the Jacobian has
/// full rank R (smallest singular value above 1e-6 * scale), found by
/// multistart minimum-norm Newton iteration. `scale` is the largest
/// coefficient sum of the forms.
std::optional<std::vector<double>> find_smooth_real_point(const FormSystem& system, const Box& box,
                                                          std::uint64_t seed = 1, std::size_t starts = 64);

/// A primitive residue x mod p^k that lifts to a smooth p-adic zero: some
/// R x R minor of the Jacobian has valuation v with 2v + 1 = k and
/// F(x) = 0 mod p^k (Hensel). k = 1 is the usual criterion F(x) = 0 with
/// Jacobian of rank R mod p.
struct PadicPoint {
    std::vector<std::uint64_t> x;
    unsigned k = 1;
    unsigned minor_valuation = 0;
};

/// Tries k = 1, 3, 5, ... <= k_max. Each level is scanned exhaustively when
/// p^(kn) <= 1e7, otherwise with 1e6 seeded random residues.
std::optional<PadicPoint> find_smooth_padic_point(const FormSystem& system, std::uint64_t p, unsigned k_max = 3,
                                                  std::uint64_t seed = 1);

struct AsymptoticOptions {
    std::uint64_t prime_bound = 50;
    unsigned k_max = 3;
    std::size_t samples = 100'000;
    std::uint64_t seed = 1;
    /// empty: default ladder
    std::vector<double> eps;
    /// search budget for the U-membership summary
    std::size_t sigma_budget = 2000;
};

struct AsymptoticRow {
    CountResult count;
    Prediction prediction;
    double ratio = 0;
    double distance = 0;  // |ratio - 1|
};

struct AsymptoticReport {
    std::vector<AsymptoticRow> rows;
    SingularSeriesEstimate series;
    SingularIntegralEstimate integral;
    std::optional<std::vector<double>> real_point;
    /// primes <= prime_bound without a smooth residue point
    std::vector<std::uint64_t> primes_without_smooth_point;
    bool real_positivity_ok = false;
    bool padic_positivity_ok = false;
    /// |ratio - 1| never increases along the P list
    bool distance_non_increasing = false;
    /// U-membership verdict of the system (see sigma_star)
    std::string u_verdict;
    std::optional<long> sigma_star_lower_bound;
    bool short_sided_box = false;
};

AsymptoticReport asymptotic_report(const FormSystem& system, const Box& box, std::span<const std::int64_t> Ps,
                                   const AsymptoticOptions& options = {}, const ExecPolicy& policy = {});

}  // namespace formcount
