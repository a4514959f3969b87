// Runs each acceptance criterion once and prints one PASS/FAIL line per
// criterion. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "formcount/aux_count.hpp"
#include "formcount/densities.hpp"
#include "formcount/dichotomy.hpp"
#include "formcount/multilinear.hpp"
#include "formcount/sigma_star.hpp"
#include "formcount/zero_count.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace formcount;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

FormSystem diagonal_system(const std::vector<long>& a, unsigned d) { return testing::single(testing::diagonal(a, d)); }

Outcome oracle_equivalence() {
    std::mt19937_64 rng(1001);
    std::size_t mismatches = 0;
    for (int i = 0; i < 25; ++i) {
        const std::size_t n = 1 + rng() % 3;
        const long B = 1 + static_cast<long>(rng() % 8);
        const auto f = oracle::random_form(rng, n, 3, 9);
        mismatches += aux_count_slab(f, B).count != aux_count_naive(f, B).count;
    }
    const auto cube = testing::form(1, 3, {{{3}, 1}});
    for (long B = 1; B <= 20; ++B) mismatches += aux_count_slab(cube, B).count != aux_count_naive(cube, B).count;

    std::size_t grid_points = 0;
    for (int i = 0; i < 25; ++i) {
        const std::size_t n = 2 + rng() % 3;
        const unsigned d = 2 + static_cast<unsigned>(rng() % 2);
        const std::size_t R = 1 + rng() % 2;
        std::vector<Form> forms;
        for (std::size_t r = 0; r < R; ++r) forms.push_back(oracle::random_form(rng, n, d, 4, 0.4));
        const FormSystem system(forms);
        // largest P with (2P + 1)^n <= 1e6
        const auto P_max = static_cast<std::int64_t>((std::pow(1e6, 1.0 / static_cast<double>(n)) - 1) / 2);
        const std::int64_t P = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(P_max));
        grid_points += static_cast<std::size_t>(std::pow(2.0 * static_cast<double>(P) + 1, static_cast<double>(n)));
        mismatches += zero_count_enum(system, Box::full(n), P).count != oracle::grid_zero_count(system, Box::full(n), P);
    }
    std::ostringstream os;
    os << "70 comparisons, " << mismatches << " mismatches, " << grid_points << " grid points scanned";
    return {mismatches == 0, os.str()};
}

Outcome algebraic_identities() {
    std::mt19937_64 rng(1002);
    std::size_t failures = 0;
    auto random_case = [&] {
        const std::size_t n = 1 + rng() % 4;
        const unsigned d = 2 + static_cast<unsigned>(rng() % 3);
        return oracle::random_form(rng, n, d, 9);
    };
    auto random_tuple = [&](std::size_t n, std::size_t arity) {
        std::vector<Vector> slots;
        for (std::size_t k = 0; k < arity; ++k) slots.push_back(oracle::random_rationals(rng, n));
        return TuplePoint(std::move(slots));
    };
    for (int i = 0; i < 100; ++i) {
        const auto f = random_case();
        const auto x = oracle::random_rationals(rng, f.n());
        const auto m = eval_m(derivative_tensor(f), TuplePoint(std::vector<Vector>(f.degree() - 1, x)));
        for (std::size_t j = 0; j < f.n(); ++j)
            failures += m[j] != Rational(factorial(f.degree() - 1)) * evaluate(partial_derivative(f, j), x);
    }
    for (int i = 0; i < 100; ++i) {
        const auto f = random_case();
        const auto t = derivative_tensor(f);
        const auto tuple = random_tuple(f.n(), f.degree() - 1);
        const auto J = jacobian(t, tuple);
        for (std::size_t k = 0; k < tuple.arity(); ++k)
            for (std::size_t j = 0; j < f.n(); ++j) {
                auto e = tuple;
                e.slots[k].assign(f.n(), 0);
                e.slots[k][j] = 1;
                failures += J.column(k * f.n() + j) != eval_m(t, e);
            }
    }
    for (int i = 0; i < 100; ++i) {
        const auto f = random_case();
        const auto t = derivative_tensor(f);
        std::vector<unsigned> idx(f.degree());
        for (auto& v : idx) v = static_cast<unsigned>(rng() % f.n());
        const Rational ref = oracle::dth_partial(f, idx);
        std::sort(idx.begin(), idx.end());
        do failures += t.at(idx) != ref;
        while (std::next_permutation(idx.begin(), idx.end()));
    }
    for (int i = 0; i < 100; ++i) {
        const auto f = random_case();
        const auto t = derivative_tensor(f);
        const auto tuple = random_tuple(f.n(), f.degree() - 1);
        const auto u = oracle::random_rationals(rng, f.n()), v = oracle::random_rationals(rng, f.n());
        const auto ab = oracle::random_rationals(rng, 2);
        const std::size_t k = rng() % tuple.arity();
        auto tu = tuple, tv = tuple, tw = tuple;
        tu.slots[k] = u;
        tv.slots[k] = v;
        for (std::size_t j = 0; j < f.n(); ++j) tw.slots[k][j] = ab[0] * u[j] + ab[1] * v[j];
        const auto mu = eval_m(t, tu), mv = eval_m(t, tv), mw = eval_m(t, tw);
        for (std::size_t j = 0; j < f.n(); ++j) failures += mw[j] != ab[0] * mu[j] + ab[1] * mv[j];
        // the library contraction against the dense oracle
        failures += eval_m(t, tuple) != oracle::m_vector(oracle::dense_partials(f), f.n(), tuple.slots);
    }
    return {failures == 0, "4 x 100 instances, " + std::to_string(failures) + " failures"};
}

Outcome sigma_star_witnesses() {
    const std::vector<std::uint64_t> primes{3, 5, 7};
    std::ostringstream os;
    bool ok = true;
    for (std::size_t n : {3, 4, 5}) {
        const auto system = diagonal_system(std::vector<long>(n, 1), 3);
        const auto r = u_membership(system, kDefaultSigmaBudget, primes, 1);
        const bool good = r.verdict == UVerdict::CertifiedNotInU && r.lower_bound == static_cast<long>(n) - 2 &&
                          r.witness && verify_witness(system, *r.witness);
        ok &= good;
        os << "cubic n=" << n << " " << to_string(r.verdict) << " bound "
           << (r.lower_bound ? std::to_string(*r.lower_bound) : "-") << "; ";
    }
    const auto q = u_membership(diagonal_system({1, 2, -1, -2}, 2), kDefaultSigmaBudget, primes, 1);
    ok &= q.verdict == UVerdict::VacuousInU;
    os << "quadratic " << to_string(q.verdict) << "; ";
    const auto scan = sigma_star_fp_scan(diagonal_system({1, 1}, 3), 5);
    ok &= scan.sigma == std::optional<long>(0);
    os << "F_5 sigma " << (scan.sigma ? std::to_string(*scan.sigma) : "-");
    return {ok, os.str()};
}

Outcome genericity() {
    const std::vector<std::uint64_t> primes{3, 5, 7};
    std::size_t certified = 0, vacuous = 0, heuristic = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto r = u_membership(random_system(3, 4, 1, 10, seed), kDefaultSigmaBudget, primes, seed);
        if (r.verdict == UVerdict::CertifiedNotInU) {
            ++certified;
            std::printf("  counterexample: seed %llu\n", static_cast<unsigned long long>(seed));
        }
        vacuous += r.verdict == UVerdict::VacuousInU;
        heuristic += r.verdict == UVerdict::HeuristicInU;
    }
    std::ostringstream os;
    os << heuristic << " heuristic, " << vacuous << " vacuous, " << certified << " certified";
    return {certified == 0, os.str()};
}

Outcome growth_evidence() {
    const std::vector<std::int64_t> Bs{2, 4, 8, 16};
    const std::vector<int> s{0, 1};
    std::ostringstream os;
    os.precision(4);

    const auto two = growth_table(testing::form(2, 3, {{{3, 0}, 1}, {{0, 3}, 1}}), Bs, s);
    double first = two.rows.front().ratios[0], worst = 0;
    for (const auto& row : two.rows) worst = std::max(worst, row.ratios[0]);
    const bool a = worst <= 10 * first;
    os << "x1^3+x2^3 s=0 max/first " << worst / first << "; ";

    const auto three = growth_table(testing::diagonal({1, 1, 1}, 3), Bs, s);
    const double s0_first = three.rows.front().ratios[0], s0_last = three.rows.back().ratios[0];
    const bool b = s0_last >= 2 * s0_first;
    double s1_max = 0;
    for (const auto& row : three.rows) s1_max = std::max(s1_max, row.ratios[1]);
    const bool c = s1_max <= 10 * three.rows.front().ratios[1];
    os << "cubic n=3 s=0 ratios";
    for (const auto& row : three.rows) os << " " << row.ratios[0];
    os << " (last/first " << s0_last / s0_first << ", needs >= 2); s=1 max/first "
       << s1_max / three.rows.front().ratios[1];
    return {a && b && c, os.str()};
}

Outcome local_counts() {
    using testing::form;
    bool ok = true;
    std::ostringstream os;
    const auto cone = testing::single(form(3, 2, {{{2, 0, 0}, 1}, {{0, 2, 0}, 1}, {{0, 0, 2}, -1}}));
    const auto hyper = testing::single(form(2, 2, {{{1, 1}, 1}}));
    const auto c = local_count(cone, 3, 1).raw, h1 = local_count(hyper, 3, 1).raw, h2 = local_count(hyper, 3, 2).raw;
    ok &= c == 9 && h1 == 5 && h2 == 21;
    ok &= c == oracle::residue_count(cone, 3) && h2 == oracle::residue_count(hyper, 9);
    os << "counts " << c << ", " << h1 << ", " << h2 << "; ";

    std::vector<Form> forms{cone[0], hyper[0], testing::diagonal({1, 1, 1}, 3), testing::diagonal({1, 2, -3}, 2),
                            form(2, 3, {{{3, 0}, 1}, {{1, 2}, -2}, {{0, 3}, 5}})};
    std::mt19937_64 rng(1006);
    for (int i = 0; i < 4; ++i) forms.push_back(oracle::random_form(rng, 2 + i % 3, 2 + i % 2, 6));
    std::size_t pairs = 0, smooth_total = 0;
    for (const auto& f : forms)
        for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
            if (std::pow(static_cast<double>(p), 2.0 * static_cast<double>(f.n())) > 1e7) continue;
            std::size_t smooth = 0;
            const bool holds = oracle::hensel_lifting_holds(f, p, &smooth);
            if (smooth == 0) continue;
            ok &= holds;
            ++pairs;
            smooth_total += smooth;
        }
    os << "lifting identity checked on " << pairs << " (F, p) pairs, " << smooth_total << " smooth residues";
    return {ok && pairs > 0, os.str()};
}

Outcome asymptotics() {
    const auto system = diagonal_system({1, 1, 1, 1, 1, -1, -1, -1, -1, -1}, 2);
    const std::vector<std::int64_t> Ps{10, 20, 40, 80};
    const auto r = asymptotic_report(system, Box::full(10), Ps);
    std::ostringstream os;
    os.precision(4);
    os << "ratios";
    for (const auto& row : r.rows) os << " " << row.ratio;
    const double last = r.rows.back().ratio;
    const bool in_range = last >= 0.85 && last <= 1.15;
    bool non_increasing = true;
    for (std::size_t i = 2; i < r.rows.size(); ++i) non_increasing &= r.rows[i].distance <= r.rows[i - 1].distance;
    os << "; S = " << r.series.product.get_d() << ", I = " << r.integral.extrapolated << " +- "
       << r.integral.extrapolated_stderr << "; U verdict " << r.u_verdict;
    return {in_range && non_increasing && r.real_positivity_ok && r.padic_positivity_ok, os.str()};
}

Outcome dichotomy_certificates() {
    std::mt19937_64 rng(1008);
    std::normal_distribution<double> g;
    std::size_t failures = 0, large = 0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t m = 1 + rng() % 6, n = 1 + rng() % 6;
        const std::size_t k = 1 + rng() % std::min(m, n);
        Eigen::MatrixXd M(m, n);
        const double scale = std::pow(10.0, -static_cast<double>(rng() % 4));
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c) M(r, c) = scale * g(rng);
        const auto cert = dichotomy(M, k, 1 + static_cast<double>(rng() % 20));
        large += cert.branch == DichotomyBranch::Large;
        failures += !verify_certificate(M, cert, static_cast<std::uint64_t>(i));
    }
    const auto fermat = diagonal_system({1, 1, 1}, 3);
    const Vector one{1};
    const auto w = TuplePoint::from_ints({{1, 0, 0}, {0, 1, 0}});
    const auto check = dichotomy_check(fermat, one, w, Rational(1, 10), kDefaultC2, 1);
    const bool fermat_ok = check.alternative == Alternative::Subspaces && check.verified &&
                           verify_dichotomy_check(fermat, one, w, check, 7);
    // random far points of a generic cubic
    const auto generic = random_system(3, 4, 1, 10, 1);
    const auto c1 = calibrate_c1(generic, 1);
    for (int i = 0; i < 10; ++i) {
        const TuplePoint tuple({oracle::random_rationals(rng, 4), oracle::random_rationals(rng, 4)});
        if (tuple.has_zero_slot()) continue;
        const auto r = dichotomy_check(generic, one, tuple, c1, kDefaultC2, 0);
        if (r.alternative != Alternative::Fail) failures += !(r.verified && verify_dichotomy_check(generic, one, tuple, r, 11));
    }
    std::ostringstream os;
    os << "50 matrices (" << large << " large), " << failures << " failed re-verifications; Fermat witness "
       << to_string(check.alternative) << (fermat_ok ? " verified" : " not verified");
    return {failures == 0 && fermat_ok, os.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", 120, oracle_equivalence},
        {2, "algebraic identities", 60, algebraic_identities},
        {3, "sigma-star witnesses", 120, sigma_star_witnesses},
        {4, "genericity of U", 300, genericity},
        {5, "aux growth evidence", 300, growth_evidence},
        {6, "local counts", 120, local_counts},
        {7, "asymptotic validation", 600, asymptotics},
        {8, "dichotomy certificates", 60, dichotomy_certificates},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && elapsed < c.limit_s;
        failed += !pass;
        std::printf("criterion %d %-24s %s  %.1fs  %s\n", c.id, c.name, pass ? "PASS" : "FAIL", elapsed, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
