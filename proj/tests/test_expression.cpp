#include "ma_radial/error.hpp"
#include "ma_radial/expression.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ma_radial;

TEST_CASE("expression evaluates with standard precedence") {
    CHECK(Expression::parse("x^2")(2.0) == 4.0);
    CHECK(Expression::parse("x^2/(1+x^2)")(1.0) == 0.5);
    CHECK(Expression::parse("2^3^2")(0.0) == 512.0);   // right-associative
    CHECK(Expression::parse("-x^2")(3.0) == -9.0);     // ^ binds tighter than unary minus
    CHECK(Expression::parse("1+2*3")(0.0) == 7.0);
    CHECK(Expression::parse("exp(0)+log(1)")(0.0) == 1.0);
    CHECK(Expression::parse("2*pi")(0.0) == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("syntax errors report the offset") {
    try {
        (void)Expression::parse("x^^2");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS((void)Expression::parse("y+1"), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse("(x"), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse(""), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse("x 2"), SyntaxError);
}

TEST_CASE("printed form re-parses to the same function") {
    const char* sources[] = {"x^2/(1+x^2)", "exp(x)-1", "x*(2+sin(log(x)))", "-x^2+3*x-1/(x+1)",
                             "2^x^0.5", "sqrt(abs(x-2))*cos(pi*x)", "expm1(x)/x", "1e-3*x^3"};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.01, 10.0);
    for (const char* src : sources) {
        const Expression a = Expression::parse(src);
        const Expression b = Expression::parse(a.to_string());
        CHECK(b.to_string() == a.to_string());
        for (int i = 0; i < 100; ++i) {
            const double x = U(rng);
            const double ya = a(x), yb = b(x);
            CHECK(std::fabs(ya - yb) <= 1e-12 * std::max(1.0, std::fabs(ya)));
        }
    }
}
