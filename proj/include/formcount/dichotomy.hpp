#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace formcount {

/// Multiplicative slack used when re-checking floating point inequalities.
inline constexpr double kVerifySlack = 1.0 + 1e-9;

enum class DichotomyBranch { Small, Large };

std::string to_string(DichotomyBranch b);

/// Outcome of the small/large-subspace dichotomy for a real m x n matrix M.
///
/// Small: `basis` spans an (n-k+1)-dimensional X with ||M x|| <= C^-1 ||x||
/// on X. Large: `coordinates` are k column indices spanning V with
/// ||M v|| >= constant * C^-1 ||v|| on V. All norms are sup-norms.
struct DichotomyCertificate {
    DichotomyBranch branch = DichotomyBranch::Small;
    std::vector<Eigen::VectorXd> basis;
    std::vector<std::size_t> coordinates;
    double C = 1;
    std::size_t k = 0;
    /// c(m, n) used for the Large branch.
    double constant = 0;
    /// Rigorous bound behind the claim, from singular values: for Small an
    /// upper bound on ||Mx||/||x|| over X, for Large a lower bound on
    /// ||Mv||/||v|| over V.
    double bound = 0;
    /// Large branch chosen by greedy column selection instead of exhaustive
    /// subset search.
    bool heuristic = false;
};

/// c(m, n) = min(1 / (n * binom(n, k)), 1 / sqrt(m * n * binom(n, k))).
double dichotomy_constant(std::size_t m, std::size_t n, std::size_t k);

/// Constructs a certificate for one of the two branches. Requires
/// 1 <= k <= min(m, n) and C >= 1.
DichotomyCertificate dichotomy(const Eigen::MatrixXd& M, std::size_t k, double C);

/// Re-checks the certificate's inequality by direct multiplication on its
/// basis vectors and `samples` random vectors of the subspace.
bool verify_certificate(const Eigen::MatrixXd& M, const DichotomyCertificate& cert, std::uint64_t seed,
                        std::size_t samples = 100);

/// Smallest singular value of the columns `cols` of M (0 for an empty set).
double min_singular_value(const Eigen::MatrixXd& M, const std::vector<std::size_t>& cols);

/// Chooses `size` column indices of M maximizing the smallest singular value
/// of the selected columns. Exhaustive when binom(cols, size) <= 1e5,
/// otherwise greedy pivoted selection (`heuristic` set).
std::vector<std::size_t> best_column_subset(const Eigen::MatrixXd& M, std::size_t size, bool& heuristic);

}  // namespace formcount
