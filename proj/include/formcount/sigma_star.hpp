#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "formcount/dichotomy.hpp"
#include "formcount/exec.hpp"
#include "formcount/forms.hpp"
#include "formcount/multilinear.hpp"

namespace formcount {

enum class UVerdict { CertifiedNotInU, HeuristicInU, VacuousInU };
std::string to_string(UVerdict v);

/// A point (beta, x^(1..d-1)) with m(beta . H) = 0 and its Jacobian rank.
struct Witness {
    Vector beta;
    TuplePoint tuple;
    std::size_t rank = 0;
};

/// Rank of the Jacobian of m(beta . H) at the tuple when m vanishes there.
/// Throws InputError on zero beta, a zero slot, or mismatched sizes.
std::optional<std::size_t> witness_rank(const FormSystem& system, std::span<const Rational> beta,
                                        const TuplePoint& tuple);

/// Replays a stored witness exactly.
bool verify_witness(const FormSystem& system, const Witness& w);

enum class ScanStatus { Empty, Ok, Skipped };
std::string to_string(ScanStatus s);

/// Exhaustive scan over F_p of projective beta and projective slots.
struct FpScan {
    std::uint64_t p = 0;
    ScanStatus status = ScanStatus::Skipped;
    std::optional<std::size_t> min_rank;
    /// n - min_rank
    std::optional<long> sigma;
    /// p^(R + (d-1)n)
    double cost = 0;
};

inline constexpr double kFpScanGuard = 1e8;
inline constexpr std::size_t kDefaultSigmaBudget = 2000;

struct SigmaStarReport {
    std::size_t n = 0;
    std::size_t R = 0;
    /// n - min rank over found witnesses; absent when no witness was found
    std::optional<long> lower_bound;
    std::optional<Witness> witness;
    std::vector<FpScan> fp_scans;
    UVerdict verdict = UVerdict::HeuristicInU;
    std::size_t budget = 0;
    std::size_t budget_used = 0;
    std::uint64_t seed = 0;
};

/// Witness search in three phases: tuples of standard basis vectors, tuples
/// of support-2 {-1, 0, 1} vectors, then random tuples whose last slot is
/// completed exactly from the kernel of the remaining linear map. Each
/// candidate costs one unit of budget. Scans F_3, F_5, F_7 where the guard
/// allows.
SigmaStarReport sigma_star_lower_bound(const FormSystem& system, std::size_t budget, std::uint64_t seed,
                                       const ExecPolicy& policy = {});

double fp_scan_cost(const FormSystem& system, std::uint64_t p);

/// Minimum Jacobian rank over F_p points with m(beta . H) = 0. Guarded by
/// p^(R + (d-1)n) <= 1e8.
FpScan sigma_star_fp_scan(const FormSystem& system, std::uint64_t p, const ExecPolicy& policy = {});

/// Requires n >= R. Primes over the scan guard are marked skipped.
SigmaStarReport u_membership(const FormSystem& system, std::size_t budget, std::span<const std::uint64_t> primes,
                             std::uint64_t seed, const ExecPolicy& policy = {});

enum class Alternative { Large, Subspaces, Fail };
std::string to_string(Alternative a);

struct DichotomyCheck {
    Alternative alternative = Alternative::Fail;
    Rational c1;
    Rational c2;
    long s = 0;
    /// ||m(beta . f)|| and c1 ||beta|| prod ||x^(i)||
    Rational m_norm;
    Rational threshold;
    /// Coordinate subspaces: subspaces[i] lists the basis indices of U_(i+1).
    std::vector<std::vector<std::size_t>> subspaces;
    /// Lower bound on ||J u|| / (||beta|| prod ||x|| max_i ||u^(i)|| / ||x^(i)||) over U
    double bound = 0;
    bool heuristic = false;
    bool verified = false;
};

/// Either ||m(beta . f)|| >= c1 ||beta|| prod ||x^(i)|| holds, or coordinate
/// subspaces U_i with sum of dimensions n - s are found on which
/// ||J (u^(1), ..., u^(d-1))|| >= c2 ||beta|| prod ||x^(i)|| max_i ||u^(i)|| / ||x^(i)||,
/// re-verified on the basis and 100 random vectors; otherwise Fail.
DichotomyCheck dichotomy_check(const FormSystem& system, std::span<const Rational> beta, const TuplePoint& tuple,
                               const Rational& c1, const Rational& c2, long s, std::uint64_t seed = 1);

/// Re-evaluates a check result exactly (first alternative) or on fresh
/// random vectors (second alternative).
bool verify_dichotomy_check(const FormSystem& system, std::span<const Rational> beta, const TuplePoint& tuple,
                            const DichotomyCheck& check, std::uint64_t seed);

/// Smallest ||m(beta . f)|| / (||beta|| prod ||x^(i)||) over `samples`
/// random real points, rounded down to a rational.
Rational calibrate_c1(const FormSystem& system, std::uint64_t seed, std::size_t samples = 10'000);

inline const Rational kDefaultC2{1, 1000};

}  // namespace formcount
