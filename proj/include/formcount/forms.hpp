#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace formcount {

using Integer = mpz_class;
using Rational = mpq_class;
using Exponents = std::vector<unsigned>;
using Vector = std::vector<Rational>;

struct Monomial {
    Exponents exps;
    Rational coeff;

    bool operator==(const Monomial&) const = default;
};

/// A homogeneous polynomial of degree `degree()` in `n()` variables.
///
/// Terms are kept in strictly increasing lexicographic order of their
/// exponent vectors and zero coefficients are never stored, so two forms are
/// equal iff their term lists are equal. Coefficients are rational so that
/// linear combinations with rational weights stay inside the type; files and
/// counting routines work with integral forms.
class Form {
public:
    Form(std::size_t n, unsigned degree);
    /// Canonicalizes: sorts, merges repeated exponent vectors, drops zeros.
    /// Throws InputError on wrong arity or inhomogeneous terms.
    Form(std::size_t n, unsigned degree, std::vector<Monomial> terms);

    std::size_t n() const noexcept { return n_; }
    unsigned degree() const noexcept { return degree_; }
    const std::vector<Monomial>& terms() const noexcept { return terms_; }

    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_integral() const;
    /// Every term is a pure power a_i x_i^d.
    bool is_diagonal() const;
    /// Coefficient of x^exps (zero when absent).
    Rational coeff(std::span<const unsigned> exps) const;

    bool operator==(const Form&) const = default;

private:
    std::size_t n_;
    unsigned degree_;
    std::vector<Monomial> terms_;
};

/// R forms sharing the same variable count and degree.
class FormSystem {
public:
    explicit FormSystem(std::vector<Form> forms);

    std::size_t n() const noexcept { return forms_.front().n(); }
    unsigned degree() const noexcept { return forms_.front().degree(); }
    std::size_t size() const noexcept { return forms_.size(); }
    const Form& operator[](std::size_t i) const { return forms_[i]; }
    const std::vector<Form>& forms() const noexcept { return forms_; }

    bool is_integral() const;
    bool is_diagonal() const;

    /// Throws InputError if any member is the zero form or non-integral.
    void require_nonzero_integral(const char* context) const;

    bool operator==(const FormSystem&) const = default;

private:
    std::vector<Form> forms_;
};

/// The constant symmetric tensor of d-th partial derivatives of a degree-d
/// form, stored sparsely by sorted index tuple. The entry for a sorted tuple
/// with multiplicity vector b is b! * c_b.
class DerivativeTensor {
public:
    DerivativeTensor(std::size_t n, unsigned order, std::map<std::vector<unsigned>, Rational> entries);

    std::size_t n() const noexcept { return n_; }
    unsigned order() const noexcept { return order_; }
    const std::map<std::vector<unsigned>, Rational>& entries() const noexcept { return entries_; }

    /// Lookup by any (unsorted) index tuple.
    Rational at(std::span<const unsigned> index) const;
    Rational max_abs_entry() const;
    bool is_integral() const;

private:
    std::size_t n_;
    unsigned order_;
    std::map<std::vector<unsigned>, Rational> entries_;
};

/// Closed box prod [a_i, b_i] contained in [-1, 1]^n.
///
/// The asymptotic formula is stated for boxes with sides of length at most 1;
/// `has_short_sides()` reports that condition. Longer sides (in particular
/// the conventional counting region [-1, 1]^n) are accepted for counting.
class Box {
public:
    struct Interval {
        Rational lo;
        Rational hi;
        bool operator==(const Interval&) const = default;
    };

    explicit Box(std::vector<Interval> intervals);
    static Box full(std::size_t n);

    std::size_t n() const noexcept { return intervals_.size(); }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    const Interval& operator[](std::size_t i) const { return intervals_[i]; }
    bool is_symmetric_cube() const;
    bool has_short_sides() const;
    Rational volume() const;

    bool operator==(const Box&) const = default;

private:
    std::vector<Interval> intervals_;
};

Rational evaluate(const Form& form, std::span<const Rational> point);
double evaluate(const Form& form, std::span<const double> point);

/// Formal partial derivative with respect to variable `i` (0-based).
Form partial_derivative(const Form& form, std::size_t i);

DerivativeTensor derivative_tensor(const Form& form);

/// (1/d!) * max |d-th partial|.
Rational sup_norm_fd(const Form& form);

/// sum_i beta_i F_i.
Form beta_dot(const FormSystem& system, std::span<const Rational> beta);

/// binomial(n + d - 1, d): number of degree-d monomials in n variables.
Integer coefficient_count(unsigned d, std::size_t n);

/// All exponent vectors of total degree d in n variables, lexicographically
/// increasing.
std::vector<Exponents> exponent_vectors(std::size_t n, unsigned d);

/// R dense forms with independent uniform coefficients in [-height, height].
FormSystem random_system(unsigned d, std::size_t n, std::size_t R, std::uint64_t height,
                         std::uint64_t seed);

Integer factorial(unsigned k);
Rational sup_norm(std::span<const Rational> v);
std::string to_string(const Form& form);

}  // namespace formcount
