#include "formcount/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "formcount/errors.hpp"

namespace formcount {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Integer parse_integer(std::string_view text) {
    std::string_view s = trim(text);
    std::string_view body = s;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
    if (!all_digits(body)) throw InputError("not an integer: '" + std::string(text) + "'");
    Integer out(std::string(body), 10);
    return !s.empty() && s.front() == '-' ? Integer(-out) : out;
}

Rational parse_rational(std::string_view text) {
    std::string_view s = trim(text);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const Integer num = parse_integer(s.substr(0, slash));
        const Integer den = parse_integer(s.substr(slash + 1));
        if (sgn(den) == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view frac = s.substr(dot + 1);
        if (!all_digits(frac)) throw InputError("not a number: '" + std::string(text) + "'");
        std::string_view whole = s.substr(0, dot);
        const bool neg = !whole.empty() && whole.front() == '-';
        if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
        if (!whole.empty() && !all_digits(whole)) throw InputError("not a number: '" + std::string(text) + "'");
        Integer num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        Rational q(neg ? Integer(-num) : num, den);
        q.canonicalize();
        return q;
    }
    return Rational(parse_integer(s));
}

std::string rational_string(const Rational& q) { return q.get_num().get_str() + "/" + q.get_den().get_str(); }

namespace {

std::string coeff_string(const Rational& q) { return q.get_den() == 1 ? q.get_num().get_str() : q.get_str(); }

std::size_t get_size(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1)
        throw InputError(std::string("form file: '") + key + "' must be a positive integer");
    return j[key].get<std::size_t>();
}

}  // namespace

FormSystem parse_form_file(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("form file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("form file must be a JSON object");
    const std::size_t n = get_size(j, "n");
    const std::size_t d = get_size(j, "d");
    const std::size_t R = get_size(j, "R");
    if (!j.contains("forms") || !j["forms"].is_array()) throw InputError("form file: 'forms' must be an array");
    if (j["forms"].size() != R) throw InputError("form file: R does not match the number of forms");
    std::vector<Form> forms;
    for (const auto& jf : j["forms"]) {
        if (!jf.is_object() || !jf.contains("monomials") || !jf["monomials"].is_array())
            throw InputError("form file: each form needs a 'monomials' array");
        std::vector<Monomial> terms;
        for (const auto& jm : jf["monomials"]) {
            if (!jm.is_object() || !jm.contains("exps") || !jm["exps"].is_array() || !jm.contains("coeff"))
                throw InputError("form file: monomials need 'exps' and 'coeff'");
            Exponents exps;
            for (const auto& e : jm["exps"]) {
                if (!e.is_number_integer() || e.get<long long>() < 0)
                    throw InputError("form file: exponents must be non-negative integers");
                exps.push_back(e.get<unsigned>());
            }
            const auto& c = jm["coeff"];
            Rational coeff;
            if (c.is_string())
                coeff = parse_rational(c.get<std::string>());
            else if (c.is_number_integer())
                coeff = Rational(Integer(std::to_string(c.get<long long>())));
            else
                throw InputError("form file: coefficients must be decimal strings");
            terms.push_back({std::move(exps), std::move(coeff)});
        }
        forms.emplace_back(n, static_cast<unsigned>(d), std::move(terms));
    }
    return FormSystem(std::move(forms));
}

std::string write_form_file(const FormSystem& system) {
    json j;
    j["n"] = system.n();
    j["d"] = system.degree();
    j["R"] = system.size();
    j["forms"] = json::array();
    for (const auto& f : system.forms()) {
        json jf;
        jf["monomials"] = json::array();
        for (const auto& t : f.terms()) jf["monomials"].push_back({{"exps", t.exps}, {"coeff", coeff_string(t.coeff)}});
        j["forms"].push_back(std::move(jf));
    }
    return j.dump() + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FormSystem load_form_file(const std::string& path) { return parse_form_file(read_file(path)); }

Box parse_box(std::string_view text, std::size_t n) {
    const std::string_view s = trim(text);
    if (s == "full") return Box::full(n);
    std::vector<Box::Interval> intervals;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(',', start), s.size());
        const std::string_view item = s.substr(start, end - start);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) throw InputError("box intervals must look like a:b");
        intervals.push_back({parse_rational(item.substr(0, colon)), parse_rational(item.substr(colon + 1))});
        start = end + 1;
    }
    if (intervals.size() != n)
        throw InputError("box has " + std::to_string(intervals.size()) + " intervals, expected " + std::to_string(n));
    return Box(std::move(intervals));
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

}  // namespace formcount
