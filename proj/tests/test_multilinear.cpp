#include <doctest.h>

#include <algorithm>
#include <random>

#include "formcount/errors.hpp"
#include "formcount/multilinear.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace formcount;
using testing::form;
using testing::vec;

namespace {

TuplePoint random_tuple(std::mt19937_64& rng, std::size_t n, std::size_t arity) {
    std::vector<Vector> slots;
    for (std::size_t k = 0; k < arity; ++k) slots.push_back(oracle::random_rationals(rng, n));
    return TuplePoint(std::move(slots));
}

Form random_case(std::mt19937_64& rng) {
    const std::size_t n = 1 + rng() % 4;
    const unsigned d = 2 + static_cast<unsigned>(rng() % 3);
    return oracle::random_form(rng, n, d, 9);
}

}  // namespace

TEST_SUITE("multilinear") {
    TEST_CASE("eval_m examples") {
        const auto t = derivative_tensor(form(2, 3, {{{3, 0}, 1}, {{0, 3}, 1}}));
        CHECK(eval_m(t, TuplePoint::from_ints({{1, 2}, {3, 4}})) == vec({18, 48}));
        const auto u = derivative_tensor(form(2, 3, {{{2, 1}, 1}}));
        CHECK(eval_m(u, TuplePoint::from_ints({{1, 2}, {3, 4}})) == vec({20, 6}));
        CHECK(eval_m(u, TuplePoint::from_ints({{0, 0}, {3, 4}})) == vec({0, 0}));
        CHECK_THROWS_AS(eval_m(u, TuplePoint::from_ints({{1, 2}})), InputError);
        CHECK_THROWS_AS(eval_m(u, TuplePoint::from_ints({{1, 2, 3}, {1, 2, 3}})), InputError);
    }

    TEST_CASE("eval_m agrees with the dense contraction") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_case(rng);
            const auto tuple = random_tuple(rng, f.n(), f.degree() - 1);
            const auto dense = oracle::dense_partials(f);
            REQUIRE(eval_m(derivative_tensor(f), tuple) == oracle::m_vector(dense, f.n(), tuple.slots));
        }
    }

    TEST_CASE("jacobian examples") {
        const auto fermat = derivative_tensor(testing::diagonal({1, 1, 1}, 3));
        const auto j = jacobian(fermat, TuplePoint::from_ints({{1, 0, 0}, {0, 1, 0}}));
        CHECK(j.rows() == 3);
        CHECK(j.cols() == 6);
        CHECK(rank_exact(j) == 2);
        std::size_t nonzero_columns = 0;
        for (std::size_t c = 0; c < j.cols(); ++c) {
            const auto col = j.column(c);
            nonzero_columns += std::any_of(col.begin(), col.end(), [](const Rational& v) { return sgn(v) != 0; });
        }
        CHECK(nonzero_columns == 2);

        const auto q = derivative_tensor(form(2, 2, {{{2, 0}, 1}, {{1, 1}, 3}, {{0, 2}, -2}}));
        const auto a = jacobian(q, TuplePoint::from_ints({{1, 1}}));
        const auto b = jacobian(q, TuplePoint::from_ints({{-4, 7}}));
        CHECK(a == b);
        CHECK(a(0, 0) == 2);
        CHECK(a(0, 1) == 3);
        CHECK(a(1, 1) == -4);
    }

    TEST_CASE("jacobian column identity") {
        std::mt19937_64 rng(22);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_case(rng);
            const auto t = derivative_tensor(f);
            const std::size_t n = f.n();
            const auto tuple = random_tuple(rng, n, f.degree() - 1);
            const auto j = jacobian(t, tuple);
            REQUIRE(j.rows() == n);
            REQUIRE(j.cols() == tuple.arity() * n);
            for (std::size_t k = 0; k < tuple.arity(); ++k)
                for (std::size_t c = 0; c < n; ++c) {
                    auto replaced = tuple;
                    replaced.slots[k].assign(n, 0);
                    replaced.slots[k][c] = 1;
                    REQUIRE(j.column(k * n + c) == eval_m(t, replaced));
                }
        }
    }

    TEST_CASE("multilinearity") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_case(rng);
            const auto t = derivative_tensor(f);
            const std::size_t n = f.n();
            const auto tuple = random_tuple(rng, n, f.degree() - 1);
            const auto u = oracle::random_rationals(rng, n);
            const auto v = oracle::random_rationals(rng, n);
            const auto ab = oracle::random_rationals(rng, 2);
            const std::size_t k = rng() % tuple.arity();
            auto tu = tuple, tv = tuple, tw = tuple;
            tu.slots[k] = u;
            tv.slots[k] = v;
            for (std::size_t i = 0; i < n; ++i) tw.slots[k][i] = ab[0] * u[i] + ab[1] * v[i];
            const auto mu = eval_m(t, tu), mv = eval_m(t, tv), mw = eval_m(t, tw);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(mw[i] == ab[0] * mu[i] + ab[1] * mv[i]);
        }
    }

    TEST_CASE("symmetry in the slots") {
        std::mt19937_64 rng(24);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_case(rng);
            const auto t = derivative_tensor(f);
            auto tuple = random_tuple(rng, f.n(), f.degree() - 1);
            const auto ref = eval_m(t, tuple);
            std::shuffle(tuple.slots.begin(), tuple.slots.end(), rng);
            REQUIRE(eval_m(t, tuple) == ref);
        }
    }

    TEST_CASE("Euler contraction") {
        std::mt19937_64 rng(25);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_case(rng);
            const auto x = oracle::random_rationals(rng, f.n());
            const auto m = eval_m(derivative_tensor(f), TuplePoint(std::vector<Vector>(f.degree() - 1, x)));
            const Rational scale(factorial(f.degree() - 1));
            for (std::size_t i = 0; i < f.n(); ++i) {
                REQUIRE(m[i] == scale * evaluate(partial_derivative(f, i), x));
                // floating evaluation of the same identity
                std::vector<double> xd;
                for (const auto& v : x) xd.push_back(v.get_d());
                const double lhs = m[i].get_d();
                const double rhs = scale.get_d() * evaluate(partial_derivative(f, i), std::span<const double>(xd));
                REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("rank") {
        RationalMatrix id(4, 4);
        for (std::size_t i = 0; i < 4; ++i) id(i, i) = 1;
        CHECK(rank_exact(id) == 4);
        CHECK(rank_exact(RationalMatrix(3, 5)) == 0);
        std::mt19937_64 rng(26);
        std::uniform_int_distribution<long> entry(-3, 3);
        for (int trial = 0; trial < 30; ++trial) {
            RationalMatrix m(5, 7);
            std::vector<std::vector<Rational>> rows(5, std::vector<Rational>(7));
            // low-rank cases: every other trial builds rows from two generators
            for (std::size_t r = 0; r < 5; ++r)
                for (std::size_t c = 0; c < 7; ++c) {
                    rows[r][c] = trial % 2 ? Rational(entry(rng)) : Rational(0);
                }
            if (trial % 2 == 0)
                for (std::size_t r = 0; r < 5; ++r) {
                    const long a = entry(rng), b = entry(rng);
                    for (std::size_t c = 0; c < 7; ++c) rows[r][c] = a * long(c + 1) + b * long(c * c % 5);
                }
            for (std::size_t r = 0; r < 5; ++r)
                for (std::size_t c = 0; c < 7; ++c) m(r, c) = rows[r][c];
            REQUIRE(rank_exact(m) == oracle::minor_rank(rows));
        }
    }

    TEST_CASE("kernel basis") {
        std::mt19937_64 rng(27);
        std::uniform_int_distribution<long> entry(-4, 4);
        for (int trial = 0; trial < 30; ++trial) {
            RationalMatrix m(3, 5);
            for (std::size_t r = 0; r < 3; ++r)
                for (std::size_t c = 0; c < 5; ++c) m(r, c) = entry(rng);
            const auto ker = kernel_basis(m);
            REQUIRE(ker.size() == 5 - rank_exact(m));
            for (const auto& v : ker)
                for (std::size_t r = 0; r < 3; ++r) {
                    Rational acc = 0;
                    for (std::size_t c = 0; c < 5; ++c) acc += m(r, c) * v[c];
                    REQUIRE(sgn(acc) == 0);
                }
        }
    }

    TEST_CASE("aux inequality") {
        const auto q = form(2, 2, {{{2, 0}, 1}, {{0, 2}, 1}});
        CHECK(aux_inequality_holds(q, TuplePoint::from_ints({{0, 0}}), 3));
        CHECK_FALSE(aux_inequality_holds(q, TuplePoint::from_ints({{1, 0}}), 5));
        const auto cube = form(1, 3, {{{3}, 1}});
        CHECK_FALSE(aux_inequality_holds(cube, TuplePoint::from_ints({{1}, {1}}), 6));
        CHECK(aux_inequality_holds(cube, TuplePoint::from_ints({{1}, {1}}), 7));
        CHECK_FALSE(aux_inequality_holds(cube, TuplePoint::from_ints({{8}, {0}}), 7));
        CHECK_THROWS_AS(aux_inequality_holds(Form(2, 2), TuplePoint::from_ints({{0, 0}}), 3), InputError);
    }
}
