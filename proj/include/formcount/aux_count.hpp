#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "formcount/exec.hpp"
#include "formcount/forms.hpp"

namespace formcount {

/// Hard limit on the number of enumerated tuples (or outer-loop tuples for
/// the slab method).
inline constexpr double kAuxEnumerationGuard = 1e9;

enum class AuxMethod { Naive, Slab };
std::string to_string(AuxMethod m);

struct AuxCountResult {
    Rational B;
    Integer count;
    AuxMethod method = AuxMethod::Naive;
    double elapsed = 0;  // seconds
};

/// N^aux_f(B): integer (d-1)-tuples with all sup-norms <= B and
/// ||m^(f)||_inf < ||f^[d]|| B^(d-2), by enumerating every tuple.
AuxCountResult aux_count_naive(const Form& f, const Rational& B, const ExecPolicy& policy = {});

/// Same count; enumerates the first d-2 slots and counts the last slot
/// inside the polytope cut out by the linear constraints by interval
/// backtracking.
AuxCountResult aux_count_slab(const Form& f, const Rational& B, const ExecPolicy& policy = {});

struct DyadicCell {
    std::vector<std::int64_t> T;
    Integer count;
};

/// #Z(T): integer tuples with T_i <= ||x^(i)|| <= min(2 T_i, B) and
/// ||m^(beta.f)||_inf <= ||beta||_inf B^(d-2) (non-strict).
DyadicCell dyadic_count(const FormSystem& system, std::span<const Rational> beta, std::span<const std::int64_t> T,
                        const Rational& B, const ExecPolicy& policy = {});

/// Both sides of the dyadic covering inequality for R = 1, beta = 1.
struct CoveringCheck {
    Rational B;
    /// Tuples with all ||x^(i)|| <= B obeying the non-strict Z-bound.
    Integer lhs_all;
    /// The same, restricted to tuples without a zero slot; these are the
    /// tuples the shells can see.
    Integer lhs_nonzero;
    /// 1 + sum over t_i >= 0 with 2^t_i < B of #Z(2^t_1, ..., 2^t_{d-1}).
    Integer rhs;
    std::vector<DyadicCell> cells;
    bool holds() const { return lhs_nonzero + 1 <= rhs; }
};

CoveringCheck covering_check(const Form& f, const Rational& B, const ExecPolicy& policy = {});

struct GrowthRow {
    std::int64_t B = 0;
    Integer count;
    /// count / (B^((d-2)n + s) (log 2B)^(d-1)), one per candidate s.
    std::vector<double> ratios;
};

struct GrowthTable {
    std::vector<int> s_candidates;
    std::vector<GrowthRow> rows;
};

GrowthTable growth_table(const Form& f, std::span<const std::int64_t> Bs, std::span<const int> s_candidates,
                         const ExecPolicy& policy = {});

}  // namespace formcount
