#pragma once

#include <string>
#include <string_view>

#include "formcount/forms.hpp"

namespace formcount {

/// Accepts "p", "p/q" and finite decimals such as "-1.25".
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

/// "num/den" (den = 1 included).
std::string rational_string(const Rational& q);

/// Form file: {"n", "d", "R", "forms": [{"monomials": [{"exps", "coeff"}]}]}
/// with decimal-string coefficients. Throws InputError on malformed content.
FormSystem parse_form_file(std::string_view text);
std::string write_form_file(const FormSystem& system);
FormSystem load_form_file(const std::string& path);
std::string read_file(const std::string& path);

/// "full" for [-1, 1]^n, otherwise comma-separated "a:b" intervals.
Box parse_box(std::string_view text, std::size_t n);

std::string sha256_hex(std::string_view data);

}  // namespace formcount
