#pragma once

#include <utility>
#include <vector>

#include "formcount/forms.hpp"

namespace testing {

using formcount::Form;
using formcount::FormSystem;
using formcount::Rational;

inline Form form(std::size_t n, unsigned d, const std::vector<std::pair<std::vector<unsigned>, long>>& terms) {
    std::vector<formcount::Monomial> out;
    for (const auto& [e, c] : terms) out.push_back({e, Rational(c)});
    return Form(n, d, std::move(out));
}

/// sum_i a_i x_i^d
inline Form diagonal(const std::vector<long>& a, unsigned d) {
    std::vector<std::pair<std::vector<unsigned>, long>> terms;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<unsigned> e(a.size(), 0);
        e[i] = d;
        terms.emplace_back(e, a[i]);
    }
    return form(a.size(), d, terms);
}

inline FormSystem single(Form f) { return FormSystem({std::move(f)}); }

inline std::vector<Rational> vec(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

}  // namespace testing
