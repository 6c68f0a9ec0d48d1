#include <catch_amalgamated.hpp>

#include "refdet/polynomial.hpp"
#include "refdet/radical.hpp"
#include "refdet/rational.hpp"
#include "refdet/weights.hpp"

using namespace refdet;

namespace {

Polynomial w(std::vector<int> idx) { return Polynomial::variable("w", std::move(idx)); }

Polynomial random_poly(DeterministicRng& rng, int vars, int terms) {
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        Polynomial mono(rng.rational(5));
        int degree = static_cast<int>(rng.next(3));
        for (int d = 0; d < degree; ++d)
            mono *= Polynomial::variable("w", {static_cast<int>(rng.next(vars)) + 1});
        p += mono;
    }
    return p;
}

}  // namespace

TEST_CASE("rational rendering and parsing") {
    CHECK(render(Rational(3, 4)) == "3/4");
    CHECK(render(Rational(-6, 8)) == "-3/4");
    CHECK(render(Rational(5)) == "5");
    CHECK(parse_rational("-3/9") == Rational(-1, 3));
    CHECK(parse_rational("7") == Rational(7));
    CHECK_THROWS_AS(parse_rational("1/0"), FileFormatError);
}

TEST_CASE("polynomial products") {
    CHECK(((w({1}) + w({2})) * Polynomial(0)).is_zero());
    CHECK(w({1}) * w({2}) == poly_product(w({1}), w({2})));
    CHECK(render(w({1}) * w({2})) == "w[1]*w[2]");
    // expand and cancel by hand: (a-b)(a+b) = a^2 - b^2
    Polynomial expanded = (w({1}) - w({2})) * (w({1}) + w({2}));
    CHECK(expanded == w({1}) * w({1}) - w({2}) * w({2}));
    CHECK(render(expanded) == "w[1]^2 - w[2]^2");
}

TEST_CASE("polynomial ring laws on random elements") {
    DeterministicRng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial a = random_poly(rng, 3, 3);
        Polynomial b = random_poly(rng, 3, 3);
        Polynomial c = random_poly(rng, 3, 3);
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
    }
}

TEST_CASE("canonical equality matches evaluation") {
    DeterministicRng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Polynomial a = random_poly(rng, 3, 4);
        Polynomial b = random_poly(rng, 3, 4);
        Polynomial lhs = (a + b) * (a - b);
        Polynomial rhs = a * a - b * b;
        CHECK(lhs == rhs);
        auto sub = random_substitution(lhs + rhs + a + b, 50 + trial);
        CHECK(lhs.substitute(sub) == rhs.substitute(sub));
        if (a != b) {
            bool differ_somewhere = false;
            for (int s = 0; s < 5 && !differ_somewhere; ++s) {
                auto point = random_substitution(a + b, 90 + s);
                differ_somewhere = a.substitute(point) != b.substitute(point);
            }
            CHECK(differ_somewhere);
        }
    }
}

TEST_CASE("radical multiply") {
    Radical<Rational> a(Rational(2), 3), b(Rational(5), 3);
    Radical<Rational> prod = radical_multiply(a, b);
    CHECK(prod.coefficient == Rational(30));
    CHECK(prod.radicand == 1);

    Radical<Rational> c(Rational(1), 2), d(Rational(1), 6);
    Radical<Rational> cd = radical_multiply(c, d);
    CHECK(cd.coefficient == Rational(2));
    CHECK(cd.radicand == 3);
}

TEST_CASE("radical add requires matching radicands") {
    Radical<Rational> a(Rational(1), 5), b(Rational(1), 3);
    CHECK_THROWS_AS(radical_add(a, b), MixedRadicandError);
    Radical<Rational> z(Rational(0), 1);
    CHECK(radical_add(z, a) == a);
    CHECK(radical_add(a, Radical<Rational>(Rational(2), 5)).coefficient == Rational(3));
}

TEST_CASE("radical normalize") {
    Radical<Rational> r = radical_normalize(Rational(1), Rational(3, 4));
    CHECK(r.coefficient == Rational(1, 2));
    CHECK(r.radicand == 3);

    Radical<Rational> square = radical_normalize(Rational(1), Rational(4));
    CHECK(square.coefficient == Rational(2));
    CHECK(square.radicand == 1);

    // (n+1)/2^n at n = 3: sqrt(4/8) = sqrt(1/2) = (1/2) sqrt(2)
    Radical<Rational> half = radical_normalize(Rational(1), Rational(4, 8));
    CHECK(half.coefficient == Rational(1, 2));
    CHECK(half.radicand == 2);

    CHECK_THROWS_AS(radical_normalize(Rational(1), Rational(-1)), NegativeRadicandError);
}

TEST_CASE("radical normalize is idempotent") {
    DeterministicRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Radical<Rational> r = radical_normalize(rng.rational(9), rational_abs(rng.rational(30)));
        Radical<Rational> again = radical_normalize(r.coefficient, Rational(r.radicand));
        CHECK(again == r);
    }
}

TEST_CASE("radical square identity") {
    DeterministicRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Radical<Rational> r = radical_normalize(rng.rational(9), rational_abs(rng.rational(30)));
        Radical<Rational> sq = radical_multiply(r, r);
        CHECK(sq.radicand == 1);
        CHECK(sq.coefficient == r.coefficient * r.coefficient * Rational(r.radicand));
    }
}

TEST_CASE("radical rendering") {
    CHECK(Radical<Rational>(Rational(1, 2), 3).render() == "1/2*sqrt(3)");
    CHECK(Radical<Rational>(Rational(5), 1).render() == "5");
    Radical<Polynomial> p(Polynomial::variable("w", {1}) + Polynomial::variable("w", {2}), 2);
    CHECK(p.render() == "(w[1] + w[2])*sqrt(2)");
}
