#include "formcount/forms.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "formcount/errors.hpp"

namespace formcount {

Form::Form(std::size_t n, unsigned degree) : n_(n), degree_(degree) {
    if (n == 0) throw InputError("form needs at least one variable");
}

Form::Form(std::size_t n, unsigned degree, std::vector<Monomial> terms) : Form(n, degree) {
    for (const auto& t : terms) {
        if (t.exps.size() != n)
            throw InputError("monomial has " + std::to_string(t.exps.size()) + " exponents, expected " +
                             std::to_string(n));
        const unsigned total = std::accumulate(t.exps.begin(), t.exps.end(), 0u);
        if (total != degree)
            throw InputError("monomial of degree " + std::to_string(total) + " in a form of degree " +
                             std::to_string(degree));
    }
    std::sort(terms.begin(), terms.end(), [](const Monomial& a, const Monomial& b) { return a.exps < b.exps; });
    for (auto& t : terms) {
        if (!terms_.empty() && terms_.back().exps == t.exps) {
            terms_.back().coeff += t.coeff;
        } else {
            terms_.push_back(std::move(t));
        }
    }
    std::erase_if(terms_, [](const Monomial& m) { return sgn(m.coeff) == 0; });
    for (auto& t : terms_) t.coeff.canonicalize();
}

bool Form::is_integral() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Monomial& m) { return m.coeff.get_den() == 1; });
}

bool Form::is_diagonal() const {
    return std::all_of(terms_.begin(), terms_.end(), [this](const Monomial& m) {
        return std::count(m.exps.begin(), m.exps.end(), degree_) == 1 || degree_ == 0;
    });
}

Rational Form::coeff(std::span<const unsigned> exps) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exps, [](const Monomial& m, std::span<const unsigned> e) {
        return std::lexicographical_compare(m.exps.begin(), m.exps.end(), e.begin(), e.end());
    });
    if (it != terms_.end() && std::equal(it->exps.begin(), it->exps.end(), exps.begin(), exps.end()))
        return it->coeff;
    return 0;
}

FormSystem::FormSystem(std::vector<Form> forms) : forms_(std::move(forms)) {
    if (forms_.empty()) throw InputError("a system needs at least one form");
    for (const auto& f : forms_) {
        if (f.n() != forms_.front().n() || f.degree() != forms_.front().degree())
            throw InputError("all forms in a system must share n and d");
    }
}

bool FormSystem::is_integral() const {
    return std::all_of(forms_.begin(), forms_.end(), [](const Form& f) { return f.is_integral(); });
}

bool FormSystem::is_diagonal() const {
    return std::all_of(forms_.begin(), forms_.end(), [](const Form& f) { return f.is_diagonal(); });
}

void FormSystem::require_nonzero_integral(const char* context) const {
    for (std::size_t i = 0; i < forms_.size(); ++i) {
        if (forms_[i].is_zero())
            throw InputError(std::string(context) + ": form " + std::to_string(i + 1) + " is zero");
        if (!forms_[i].is_integral())
            throw InputError(std::string(context) + ": form " + std::to_string(i + 1) +
                             " has non-integral coefficients");
    }
}

DerivativeTensor::DerivativeTensor(std::size_t n, unsigned order, std::map<std::vector<unsigned>, Rational> entries)
    : n_(n), order_(order), entries_(std::move(entries)) {
    std::erase_if(entries_, [](const auto& kv) { return sgn(kv.second) == 0; });
}

Rational DerivativeTensor::at(std::span<const unsigned> index) const {
    if (index.size() != order_) throw InputError("tensor index has wrong length");
    std::vector<unsigned> key(index.begin(), index.end());
    std::sort(key.begin(), key.end());
    auto it = entries_.find(key);
    return it == entries_.end() ? Rational(0) : it->second;
}

Rational DerivativeTensor::max_abs_entry() const {
    Rational best = 0;
    for (const auto& [key, value] : entries_) best = std::max<Rational>(best, abs(value));
    return best;
}

bool DerivativeTensor::is_integral() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& kv) { return kv.second.get_den() == 1; });
}

Box::Box(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw InputError("box needs at least one interval");
    for (const auto& iv : intervals_) {
        if (!(Rational(-1) <= iv.lo && iv.lo <= iv.hi && iv.hi <= Rational(1)))
            throw InputError("box interval [" + iv.lo.get_str() + ", " + iv.hi.get_str() +
                             "] is not inside [-1, 1]");
    }
}

Box Box::full(std::size_t n) { return Box(std::vector<Interval>(n, Interval{-1, 1})); }

bool Box::is_symmetric_cube() const {
    return std::all_of(intervals_.begin(), intervals_.end(), [&](const Interval& iv) {
        return iv.lo == -iv.hi && iv == intervals_.front();
    });
}

bool Box::has_short_sides() const {
    return std::all_of(intervals_.begin(), intervals_.end(),
                       [](const Interval& iv) { return iv.hi - iv.lo <= 1; });
}

Rational Box::volume() const {
    Rational v = 1;
    for (const auto& iv : intervals_) v *= iv.hi - iv.lo;
    return v;
}

namespace {

void require_point(const Form& form, std::size_t size) {
    if (size != form.n())
        throw InputError("point has " + std::to_string(size) + " coordinates, form has " +
                         std::to_string(form.n()) + " variables");
}

}  // namespace

Rational evaluate(const Form& form, std::span<const Rational> point) {
    require_point(form, point.size());
    Rational total = 0;
    Integer power;
    for (const auto& term : form.terms()) {
        Rational value = term.coeff;
        for (std::size_t i = 0; i < point.size(); ++i) {
            if (term.exps[i] == 0) continue;
            mpz_pow_ui(power.get_mpz_t(), point[i].get_num_mpz_t(), term.exps[i]);
            Integer den;
            mpz_pow_ui(den.get_mpz_t(), point[i].get_den_mpz_t(), term.exps[i]);
            value *= Rational(power, den);
        }
        total += value;
    }
    total.canonicalize();
    return total;
}

double evaluate(const Form& form, std::span<const double> point) {
    require_point(form, point.size());
    double total = 0;
    for (const auto& term : form.terms()) {
        double value = term.coeff.get_d();
        for (std::size_t i = 0; i < point.size(); ++i)
            for (unsigned e = 0; e < term.exps[i]; ++e) value *= point[i];
        total += value;
    }
    return total;
}

Form partial_derivative(const Form& form, std::size_t i) {
    if (i >= form.n())
        throw InputError("partial derivative index " + std::to_string(i) + " out of range for n = " +
                         std::to_string(form.n()));
    const unsigned new_degree = form.degree() == 0 ? 0 : form.degree() - 1;
    std::vector<Monomial> out;
    for (const auto& term : form.terms()) {
        if (term.exps[i] == 0) continue;
        Monomial m = term;
        m.coeff *= term.exps[i];
        m.exps[i] -= 1;
        out.push_back(std::move(m));
    }
    return Form(form.n(), new_degree, std::move(out));
}

Integer factorial(unsigned k) {
    Integer out;
    mpz_fac_ui(out.get_mpz_t(), k);
    return out;
}

DerivativeTensor derivative_tensor(const Form& form) {
    std::map<std::vector<unsigned>, Rational> entries;
    for (const auto& term : form.terms()) {
        std::vector<unsigned> key;
        key.reserve(form.degree());
        Integer weight = 1;
        for (unsigned j = 0; j < term.exps.size(); ++j) {
            weight *= factorial(term.exps[j]);
            key.insert(key.end(), term.exps[j], j);
        }
        entries.emplace(std::move(key), Rational(term.coeff * weight));
    }
    return DerivativeTensor(form.n(), form.degree(), std::move(entries));
}

Rational sup_norm_fd(const Form& form) {
    Rational out = derivative_tensor(form).max_abs_entry() / Rational(factorial(form.degree()));
    out.canonicalize();
    return out;
}

Form beta_dot(const FormSystem& system, std::span<const Rational> beta) {
    if (beta.size() != system.size())
        throw InputError("beta has " + std::to_string(beta.size()) + " entries, system has " +
                         std::to_string(system.size()) + " forms");
    std::vector<Monomial> terms;
    for (std::size_t r = 0; r < system.size(); ++r) {
        if (sgn(beta[r]) == 0) continue;
        for (const auto& t : system[r].terms()) terms.push_back({t.exps, t.coeff * beta[r]});
    }
    return Form(system.n(), system.degree(), std::move(terms));
}

Integer coefficient_count(unsigned d, std::size_t n) {
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), n + d - 1, d);
    return out;
}

std::vector<Exponents> exponent_vectors(std::size_t n, unsigned d) {
    std::vector<Exponents> out;
    Exponents cur(n, 0);
    // Lexicographic order: first coordinate ascending, recursively.
    auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
        if (pos + 1 == n) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (unsigned e = 0; e <= remaining; ++e) {
            cur[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    rec(rec, 0, d);
    return out;
}

FormSystem random_system(unsigned d, std::size_t n, std::size_t R, std::uint64_t height, std::uint64_t seed) {
    if (n == 0 || R == 0) throw InputError("random_system needs n >= 1 and R >= 1");
    std::mt19937_64 rng(seed);
    const auto h = static_cast<std::int64_t>(height);
    std::uniform_int_distribution<std::int64_t> coeff(-h, h);
    const auto basis = exponent_vectors(n, d);
    std::vector<Form> forms;
    forms.reserve(R);
    for (std::size_t r = 0; r < R; ++r) {
        std::vector<Monomial> terms;
        for (const auto& e : basis) {
            const std::int64_t c = coeff(rng);
            if (c != 0) terms.push_back({e, Rational(static_cast<long>(c))});
        }
        forms.emplace_back(n, d, std::move(terms));
    }
    return FormSystem(std::move(forms));
}

Rational sup_norm(std::span<const Rational> v) {
    Rational best = 0;
    for (const auto& x : v) best = std::max<Rational>(best, abs(x));
    return best;
}

std::string to_string(const Form& form) {
    if (form.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : form.terms()) {
        const bool negative = sgn(t.coeff) < 0;
        if (!first) os << (negative ? " - " : " + ");
        else if (negative) os << "-";
        first = false;
        const Rational mag = abs(t.coeff);
        bool has_var = false;
        std::ostringstream vars;
        for (std::size_t i = 0; i < t.exps.size(); ++i) {
            if (t.exps[i] == 0) continue;
            if (has_var) vars << "*";
            vars << "x" << (i + 1);
            if (t.exps[i] > 1) vars << "^" << t.exps[i];
            has_var = true;
        }
        if (mag != 1 || !has_var) {
            os << mag.get_str();
            if (has_var) os << "*";
        }
        os << vars.str();
    }
    return os.str();
}

}  // namespace formcount
