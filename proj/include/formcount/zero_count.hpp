#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "formcount/exec.hpp"
#include "formcount/forms.hpp"

namespace formcount {

/// Hard limit on the number of lattice points in the dilated box (and on the
/// histogram work of the diagonal path).
inline constexpr double kZeroCountGuard = 1e9;

enum class CountMethod { Enum, Diagonal };
std::string to_string(CountMethod m);

struct CountResult {
    std::int64_t P = 0;
    Integer count;
    CountMethod method = CountMethod::Enum;
    double elapsed = 0;  // seconds
};

/// Integer coordinate range ceil(P a_i) .. floor(P b_i) of the dilated box.
struct CoordinateRange {
    std::int64_t lo;
    std::int64_t hi;
};
std::vector<CoordinateRange> dilated_ranges(const Box& box, std::int64_t P);

/// #{x in Z^n : x/P in box, F(x) = 0} by recursive coordinate assignment.
/// A partial assignment is discarded as soon as exact interval bounds over
/// the remaining sub-box exclude 0 for some F_i.
CountResult zero_count_enum(const FormSystem& system, const Box& box, std::int64_t P, const ExecPolicy& policy = {});

/// True when the diagonal fast path applies: every form is diagonal, R <= 2,
/// and the box is a cube symmetric about 0.
bool diagonal_eligible(const FormSystem& system, const Box& box);

/// Same count for diagonal systems by convolving value histograms of
/// a_i x_i^d over the coordinate range. Guarded by
/// n * min(points, (2 * value span + 1)^R).
CountResult zero_count_diagonal(const FormSystem& system, const Box& box, std::int64_t P,
                                const ExecPolicy& policy = {});

/// One count per P; uses the diagonal path whenever it is eligible.
std::vector<CountResult> count_series(const FormSystem& system, const Box& box, std::span<const std::int64_t> Ps,
                                      const ExecPolicy& policy = {});

}  // namespace formcount
