#include <doctest.h>

#include <cmath>

#include "ssopt/numerics.hpp"

using namespace ssopt;

TEST_CASE("adaptive quadrature") {
    auto cubic = [](double x) { return x * x * x - 2.0 * x + 1.0; };
    CHECK(integrate(cubic, -1.0, 3.0, 1e-12) == doctest::Approx(16.0).epsilon(1e-12));

    auto decay = [](double x) { return std::exp(-x); };
    CHECK(integrate(decay, 0.0, 30.0, 1e-12) ==
          doctest::Approx(1.0 - std::exp(-30.0)).epsilon(1e-11));

    CHECK(integrate(decay, 5.0, 5.0, 1e-12) == 0.0);
    CHECK(integrate(decay, 2.0, 0.0, 1e-12) ==
          doctest::Approx(-(1.0 - std::exp(-2.0))).epsilon(1e-11));
}

TEST_CASE("bisection and bracket expansion") {
    auto f = [](double x) { return x * x - 2.0; };
    RootOptions opt;
    CHECK(bisect(f, 0.0, 2.0, opt) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    double lo = 0.9, hi = 1.1;
    expand_right(f, 0.0, &hi, opt);
    CHECK(f(hi) > 0.0);
    auto g = [](double x) { return x + 3.0; };
    lo = -1.0;
    expand_left(g, &lo, 0.0, opt);
    CHECK(g(lo) < 0.0);

    CHECK_THROWS_AS(bisect(f, 2.0, 3.0, opt), NumericsError);
}

TEST_CASE("golden section") {
    // argmin resolution on a quadratic is limited to about sqrt(eps)
    auto f = [](double x) { return (x - 0.7) * (x - 0.7) + 3.0; };
    CHECK(golden_min(f, -4.0, 5.0, 1e-12) == doctest::Approx(0.7).epsilon(1e-6));
}
