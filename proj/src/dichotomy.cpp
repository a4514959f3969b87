#include "formcount/dichotomy.hpp"

#include <cmath>
#include <random>

#include "formcount/errors.hpp"

namespace formcount {

std::string to_string(DichotomyBranch b) { return b == DichotomyBranch::Small ? "SMALL" : "LARGE"; }

namespace {

double binomial(std::size_t n, std::size_t k) {
    double out = 1;
    for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return out;
}

double sup(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

double dichotomy_constant(std::size_t m, std::size_t n, std::size_t k) {
    const double b = binomial(n, k);
    return std::min(1.0 / (static_cast<double>(n) * b),
                    1.0 / std::sqrt(static_cast<double>(m) * static_cast<double>(n) * b));
}

double min_singular_value(const Eigen::MatrixXd& M, const std::vector<std::size_t>& cols) {
    if (cols.empty()) return 0;
    if (cols.size() > static_cast<std::size_t>(M.rows())) return 0;
    Eigen::MatrixXd sub(M.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = M.col(static_cast<Eigen::Index>(cols[j]));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    return svd.singularValues().minCoeff();
}

std::vector<std::size_t> best_column_subset(const Eigen::MatrixXd& M, std::size_t size, bool& heuristic) {
    const auto n = static_cast<std::size_t>(M.cols());
    heuristic = false;
    if (size == 0) return {};
    if (size > n) throw InputError("column subset larger than the matrix");

    if (binomial(n, size) > 1e5) {
        heuristic = true;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
        const auto& perm = qr.colsPermutation().indices();
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < size; ++j) out.push_back(static_cast<std::size_t>(perm[static_cast<Eigen::Index>(j)]));
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::size_t> cur(size), best;
    for (std::size_t j = 0; j < size; ++j) cur[j] = j;
    double best_value = -1;
    while (true) {
        const double v = min_singular_value(M, cur);
        if (v > best_value) {
            best_value = v;
            best = cur;
        }
        // next combination in lexicographic order
        std::size_t i = size;
        while (i > 0 && cur[i - 1] == n - size + i - 1) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < size; ++j) cur[j] = cur[j - 1] + 1;
    }
    return best;
}

DichotomyCertificate dichotomy(const Eigen::MatrixXd& M, std::size_t k, double C) {
    const auto m = static_cast<std::size_t>(M.rows());
    const auto n = static_cast<std::size_t>(M.cols());
    if (k == 0 || k > std::min(m, n)) throw InputError("dichotomy needs 1 <= k <= min(m, n)");
    if (!(C >= 1)) throw InputError("dichotomy needs C >= 1");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double s_k = s[static_cast<Eigen::Index>(k - 1)];

    DichotomyCertificate cert;
    cert.C = C;
    cert.k = k;
    cert.constant = dichotomy_constant(m, n, k);

    // Right singular vectors k..n span a space where ||Mx||_2 <= s_k ||x||_2,
    // and the sup-norm loses at most sqrt(n) against the Euclidean one.
    const double small_bound = s_k * std::sqrt(static_cast<double>(n));
    if (small_bound * C <= 1.0) {
        cert.branch = DichotomyBranch::Small;
        cert.bound = small_bound;
        const Eigen::MatrixXd& V = svd.matrixV();
        for (std::size_t j = k - 1; j < n; ++j) cert.basis.push_back(V.col(static_cast<Eigen::Index>(j)));
        return cert;
    }

    cert.branch = DichotomyBranch::Large;
    cert.coordinates = best_column_subset(M, k, cert.heuristic);
    cert.bound = min_singular_value(M, cert.coordinates) / std::sqrt(static_cast<double>(m));
    for (auto j : cert.coordinates) cert.basis.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)));
    return cert;
}

bool verify_certificate(const Eigen::MatrixXd& M, const DichotomyCertificate& cert, std::uint64_t seed,
                        std::size_t samples) {
    if (cert.basis.empty()) return false;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;

    auto check = [&](const Eigen::VectorXd& x) {
        const double lhs = sup(M * x);
        const double norm = sup(x);
        if (cert.branch == DichotomyBranch::Small) return lhs <= norm / cert.C * kVerifySlack;
        return lhs * kVerifySlack >= cert.constant / cert.C * norm;
    };

    for (const auto& b : cert.basis)
        if (!check(b)) return false;
    for (std::size_t t = 0; t < samples; ++t) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(M.cols());
        for (const auto& b : cert.basis) x += gauss(rng) * b;
        if (!check(x)) return false;
    }
    return true;
}

}  // namespace formcount
