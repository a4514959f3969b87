#include <doctest.h>

#include <cmath>
#include <random>

#include "formcount/aux_count.hpp"
#include "formcount/errors.hpp"
#include "formcount/multilinear.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace formcount;
using testing::form;

namespace {

/// Counts tuples whose first slot is negated before the inequality is tested.
Integer sign_flipped_count(const Form& f, long B) {
    const std::size_t n = f.n();
    const std::size_t arity = f.degree() - 1;
    std::vector<Vector> slots(arity, Vector(n));
    Integer count = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == arity) {
            if (aux_inequality_holds(f, TuplePoint(slots), B)) ++count;
            return;
        }
        oracle::for_each_box_point(n, B, [&](const std::vector<long>& x) {
            for (std::size_t i = 0; i < n; ++i) slots[k][i] = k == 0 ? -x[i] : x[i];
            rec(k + 1);
        });
    };
    rec(0);
    return count;
}

}  // namespace

TEST_SUITE("aux_count") {
    TEST_CASE("examples") {
        const auto q = form(2, 2, {{{2, 0}, 1}, {{0, 2}, 1}});
        for (long B : {1, 3, 7}) CHECK(aux_count_naive(q, B).count == 1);
        CHECK(aux_count_naive(form(1, 3, {{{3}, 1}}), 6).count == 25);
        CHECK(aux_count_naive(form(2, 2, {{{1, 1}, 1}}), 10).count == 1);
    }

    TEST_CASE("slab equals naive on the cube") {
        const auto cube = form(1, 3, {{{3}, 1}});
        for (long B = 1; B <= 20; ++B) {
            const auto slab = aux_count_slab(cube, B);
            REQUIRE(slab.count == aux_count_naive(cube, B).count);
            CHECK(slab.method == AuxMethod::Slab);
        }
    }

    TEST_CASE("slab equals naive and the oracle on random cubics") {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t n = 1 + rng() % 3;
            const long B = n == 3 ? 1 + static_cast<long>(rng() % 3) : 1 + static_cast<long>(rng() % 8);
            const auto f = oracle::random_form(rng, n, 3, 6);
            const auto naive = aux_count_naive(f, B).count;
            REQUIRE(aux_count_slab(f, B).count == naive);
            if (n < 3) REQUIRE(naive == oracle::aux_count(f, B));
        }
    }

    TEST_CASE("quartics") {
        std::mt19937_64 rng(42);
        for (int trial = 0; trial < 6; ++trial) {
            const auto f = oracle::random_form(rng, 2, 4, 4);
            REQUIRE(aux_count_slab(f, 2).count == aux_count_naive(f, 2).count);
            REQUIRE(aux_count_naive(f, 1).count == oracle::aux_count(f, 1));
        }
    }

    TEST_CASE("degree two has no outer loop") {
        const auto q = form(2, 2, {{{2, 0}, 1}, {{0, 2}, 1}});
        CHECK(aux_count_slab(q, 50).count == aux_count_naive(q, 50).count);
        const auto h = form(2, 2, {{{2, 0}, 1}, {{1, 1}, 3}});
        for (long B : {1, 5, 12}) CHECK(aux_count_slab(h, B).count == oracle::aux_count(h, B));
    }

    TEST_CASE("rational B") {
        const auto cube = form(1, 3, {{{3}, 1}});
        CHECK(aux_count_naive(cube, Rational(13, 2)).count == aux_count_slab(cube, Rational(13, 2)).count);
        // 6|uv| < 13/2 allows |uv| <= 1
        CHECK(aux_count_naive(cube, Rational(13, 2)).count == 29);
    }

    TEST_CASE("sign symmetry") {
        std::mt19937_64 rng(43);
        for (int trial = 0; trial < 5; ++trial) {
            const auto f = oracle::random_form(rng, 2, 3, 5);
            CHECK(sign_flipped_count(f, 3) == aux_count_naive(f, 3).count);
        }
    }

    TEST_CASE("monotone in B") {
        std::mt19937_64 rng(44);
        for (int trial = 0; trial < 5; ++trial) {
            const auto f = oracle::random_form(rng, 2, 3, 5);
            Integer prev = 0;
            for (long B = 1; B <= 10; ++B) {
                const auto c = aux_count_slab(f, B).count;
                REQUIRE(c >= prev);
                prev = c;
            }
        }
    }

    TEST_CASE("workers do not change counts") {
        std::mt19937_64 rng(45);
        const auto f = oracle::random_form(rng, 3, 3, 5);
        const auto one = aux_count_slab(f, 4, ExecPolicy{1, false}).count;
        CHECK(aux_count_slab(f, 4, ExecPolicy{3, false}).count == one);
        CHECK(aux_count_naive(f, 2, ExecPolicy{4, false}).count == aux_count_naive(f, 2).count);
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(aux_count_naive(Form(2, 3), 3), InputError);
        CHECK_THROWS_AS(aux_count_slab(Form(2, 3), 3), InputError);
        CHECK_THROWS_AS(aux_count_naive(form(4, 3, {{{3, 0, 0, 0}, 1}}), 100), GuardExceeded);
        CHECK_THROWS_AS(aux_count_slab(form(4, 3, {{{3, 0, 0, 0}, 1}}), 1000), GuardExceeded);
        CHECK_THROWS_AS(aux_count_naive(form(1, 3, {{{3}, 1}}), Rational(1, 2)), InputError);
    }

    TEST_CASE("dyadic cells") {
        const auto cube = testing::single(form(1, 3, {{{3}, 1}}));
        const std::vector<Rational> one{1}, two{2};
        const std::vector<std::int64_t> big{16, 1};
        CHECK(dyadic_count(cube, one, big, 8).count == 0);
        for (std::int64_t t1 : {1, 2, 4, 8})
            for (std::int64_t t2 : {1, 2, 4}) {
                const std::vector<std::int64_t> T{t1, t2};
                CHECK(dyadic_count(cube, one, T, 8).count == dyadic_count(cube, two, T, 8).count);
            }
        const std::vector<Rational> zero{0};
        const std::vector<std::int64_t> T{1, 1};
        CHECK_THROWS_AS(dyadic_count(cube, zero, T, 8), InputError);
        // |6uv| <= 8 with 1 <= |u|, |v| <= 2: u, v = +-1 only
        CHECK(dyadic_count(cube, one, T, 8).count == 4);
    }

    TEST_CASE("covering inequality") {
        const auto cube = form(1, 3, {{{3}, 1}});
        const auto c = covering_check(cube, 8);
        CHECK(c.holds());
        CHECK(c.lhs_all >= c.lhs_nonzero);
        std::mt19937_64 rng(46);
        for (int trial = 0; trial < 4; ++trial) CHECK(covering_check(oracle::random_form(rng, 2, 3, 4), 4).holds());
    }

    TEST_CASE("growth table") {
        const auto f = form(2, 3, {{{3, 0}, 1}, {{0, 3}, 1}});
        const std::vector<std::int64_t> Bs{2, 4, 8, 16};
        const std::vector<int> s{0, 2};
        const auto table = growth_table(f, Bs, s);
        REQUIRE(table.rows.size() == 4);
        for (const auto& row : table.rows) {
            REQUIRE(row.ratios.size() == 2);
            const double base = std::pow(static_cast<double>(row.B), 2.0) * std::pow(std::log(2.0 * row.B), 2.0);
            CHECK(row.ratios[0] == doctest::Approx(row.count.get_d() / base));
            CHECK(row.count == aux_count_slab(f, row.B).count);
        }
        // s = n: the trivial bound (2B + 1)^(2n) / B^(n + n) eventually beats the log factor
        CHECK(table.rows.back().ratios[1] < 1);
    }
}
