#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "formcount/forms.hpp"

namespace formcount {

/// The argument (x^(1), ..., x^(d-1)) of the multilinear forms m^(f).
struct TuplePoint {
    std::vector<Vector> slots;

    TuplePoint() = default;
    explicit TuplePoint(std::vector<Vector> s);

    std::size_t arity() const noexcept { return slots.size(); }
    std::size_t n() const noexcept { return slots.empty() ? 0 : slots.front().size(); }
    bool has_zero_slot() const;

    /// Convenience for integer tuples.
    static TuplePoint from_ints(const std::vector<std::vector<long>>& slots);
};

/// Dense exact matrix, row-major.
class RationalMatrix {
public:
    RationalMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    Vector column(std::size_t c) const;

    bool operator==(const RationalMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Rational> data_;
};

/// m_i = sum_{j_1..j_{d-1}} x^(1)_{j_1} ... x^(d-1)_{j_{d-1}} T[j_1, ..., j_{d-1}, i].
Vector eval_m(const DerivativeTensor& tensor, const TuplePoint& tuple);

/// The n x (d-1)n Jacobian of m with respect to all argument coordinates.
/// Column k*n + j is the derivative with respect to x^(k)_j.
RationalMatrix jacobian(const DerivativeTensor& tensor, const TuplePoint& tuple);

/// Exact rank over Q by fraction-free (Bareiss) elimination.
std::size_t rank_exact(const RationalMatrix& m);

/// Basis of the right kernel over Q, each vector scaled to coprime integers.
std::vector<Vector> kernel_basis(const RationalMatrix& m);

/// True iff every slot has sup-norm <= B and ||m^(f)||_inf < ||f^[d]|| B^(d-2).
bool aux_inequality_holds(const Form& f, const TuplePoint& tuple, const Rational& B);

}  // namespace formcount
