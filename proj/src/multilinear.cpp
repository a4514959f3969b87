#include "formcount/multilinear.hpp"

#include <algorithm>

#include "formcount/errors.hpp"

namespace formcount {

TuplePoint::TuplePoint(std::vector<Vector> s) : slots(std::move(s)) {
    if (slots.empty()) throw InputError("tuple needs at least one vector");
    for (const auto& v : slots)
        if (v.size() != slots.front().size()) throw InputError("tuple vectors must share a length");
}

bool TuplePoint::has_zero_slot() const {
    return std::any_of(slots.begin(), slots.end(), [](const Vector& v) {
        return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
    });
}

TuplePoint TuplePoint::from_ints(const std::vector<std::vector<long>>& slots) {
    std::vector<Vector> out;
    for (const auto& s : slots) out.emplace_back(s.begin(), s.end());
    return TuplePoint(std::move(out));
}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

Vector RationalMatrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

namespace {

void require_arity(const DerivativeTensor& tensor, const TuplePoint& tuple) {
    if (tensor.order() < 2) throw InputError("multilinear forms need degree >= 2");
    if (tuple.arity() + 1 != tensor.order())
        throw InputError("tuple has " + std::to_string(tuple.arity()) + " vectors, expected " +
                         std::to_string(tensor.order() - 1));
    if (tuple.n() != tensor.n())
        throw InputError("tuple vectors have length " + std::to_string(tuple.n()) + ", expected " +
                         std::to_string(tensor.n()));
}

// Visits every ordered index tuple with a nonzero tensor entry: the distinct
// permutations of each stored sorted tuple.
template <typename Visit>
void for_each_ordered_entry(const DerivativeTensor& tensor, Visit&& visit) {
    for (const auto& [key, value] : tensor.entries()) {
        std::vector<unsigned> perm = key;
        do {
            visit(std::span<const unsigned>(perm), value);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

}  // namespace

Vector eval_m(const DerivativeTensor& tensor, const TuplePoint& tuple) {
    require_arity(tensor, tuple);
    const std::size_t slots = tuple.arity();
    Vector m(tensor.n(), 0);
    for_each_ordered_entry(tensor, [&](std::span<const unsigned> idx, const Rational& t) {
        Rational term = t;
        for (std::size_t k = 0; k < slots && sgn(term) != 0; ++k) term *= tuple.slots[k][idx[k]];
        m[idx[slots]] += term;
    });
    return m;
}

RationalMatrix jacobian(const DerivativeTensor& tensor, const TuplePoint& tuple) {
    require_arity(tensor, tuple);
    const std::size_t n = tensor.n();
    const std::size_t slots = tuple.arity();
    RationalMatrix J(n, slots * n);
    for_each_ordered_entry(tensor, [&](std::span<const unsigned> idx, const Rational& t) {
        for (std::size_t k = 0; k < slots; ++k) {
            Rational term = t;
            for (std::size_t l = 0; l < slots && sgn(term) != 0; ++l)
                if (l != k) term *= tuple.slots[l][idx[l]];
            J(idx[slots], k * n + idx[k]) += term;
        }
    });
    return J;
}

namespace {

// Clears denominators row by row; rank and kernel are unchanged.
std::vector<std::vector<Integer>> integer_rows(const RationalMatrix& m) {
    std::vector<std::vector<Integer>> rows(m.rows(), std::vector<Integer>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Integer l = 1;
        for (std::size_t c = 0; c < m.cols(); ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c).get_num() * (l / m(r, c).get_den());
    }
    return rows;
}

// Bareiss elimination to row echelon form in place; returns pivot columns.
std::vector<std::size_t> bareiss_echelon(std::vector<std::vector<Integer>>& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    Integer prev = 1;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
        std::size_t p = row;
        while (p < a.size() && sgn(a[p][col]) == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        for (std::size_t r = row + 1; r < a.size(); ++r) {
            for (std::size_t c = col + 1; c < cols; ++c) {
                a[r][c] = a[row][col] * a[r][c] - a[r][col] * a[row][c];
                mpz_divexact(a[r][c].get_mpz_t(), a[r][c].get_mpz_t(), prev.get_mpz_t());
            }
            a[r][col] = 0;
        }
        prev = a[row][col];
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

std::size_t rank_exact(const RationalMatrix& m) {
    auto rows = integer_rows(m);
    return bareiss_echelon(rows, m.cols()).size();
}

std::vector<Vector> kernel_basis(const RationalMatrix& m) {
    auto rows = integer_rows(m);
    const auto pivots = bareiss_echelon(rows, m.cols());
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;

    std::vector<Vector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vector v(m.cols(), 0);
        v[free] = 1;
        // Back substitution over the echelon rows.
        for (std::size_t i = pivots.size(); i-- > 0;) {
            const std::size_t pc = pivots[i];
            Rational s = 0;
            for (std::size_t c = pc + 1; c < m.cols(); ++c)
                if (sgn(rows[i][c]) != 0 && sgn(v[c]) != 0) s += Rational(rows[i][c]) * v[c];
            v[pc] = -s / Rational(rows[i][pc]);
        }
        Integer l = 1, g = 0;
        for (auto& x : v) {
            x.canonicalize();
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
        }
        for (auto& x : v) {
            x *= l;
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_num_mpz_t());
        }
        if (g != 0)
            for (auto& x : v) x /= g;
        basis.push_back(std::move(v));
    }
    return basis;
}

bool aux_inequality_holds(const Form& f, const TuplePoint& tuple, const Rational& B) {
    if (B < 1) throw InputError("B must be at least 1");
    if (f.is_zero()) throw InputError("auxiliary inequality is undefined for the zero form");
    for (const auto& v : tuple.slots)
        if (sup_norm(v) > B) return false;
    const auto tensor = derivative_tensor(f);
    const Vector m = eval_m(tensor, tuple);
    Rational threshold = sup_norm_fd(f);
    for (unsigned e = 2; e < f.degree(); ++e) threshold *= B;
    return sup_norm(m) < threshold;
}

}  // namespace formcount
