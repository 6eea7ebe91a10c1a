#include <doctest.h>

#include <cmath>
#include <numbers>

#include "morsegpe/error.hpp"
#include "morsegpe/special.hpp"

using namespace morsegpe;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// Stirling series with Bernoulli corrections, accurate to ~1e-15 for x >= 20.
double stirling_log_gamma(double x) {
  const double x2 = x * x;
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2 * std::numbers::pi) +
         1.0 / (12 * x) - 1.0 / (360 * x * x2) + 1.0 / (1260 * x2 * x2 * x);
}

double asymptotic_digamma(double x) {
  const double x2 = x * x;
  return std::log(x) - 1.0 / (2 * x) - 1.0 / (12 * x2) + 1.0 / (120 * x2 * x2) -
         1.0 / (252 * x2 * x2 * x2);
}

}  // namespace

TEST_SUITE("special") {

TEST_CASE("log_gamma exact values") {
  double fact = 1.0;
  for (int n = 1; n <= 20; ++n) {
    CHECK(special::log_gamma(n) == doctest::Approx(std::log(fact)).epsilon(1e-14));
    fact *= n;
  }
  CHECK(special::log_gamma(0.5) ==
        doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
  CHECK(special::log_gamma(2.5) ==
        doctest::Approx(std::log(0.75 * std::sqrt(std::numbers::pi))).epsilon(1e-14));
}

TEST_CASE("digamma and trigamma exact values") {
  CHECK(special::digamma(1.0) == doctest::Approx(-kEulerGamma).epsilon(1e-14));
  CHECK(special::digamma(0.5) ==
        doctest::Approx(-kEulerGamma - 2 * std::log(2.0)).epsilon(1e-14));
  double harmonic = 0.0;
  for (int n = 1; n <= 10; ++n) {
    harmonic += 1.0 / n;
    CHECK(special::digamma(n + 1) ==
          doctest::Approx(harmonic - kEulerGamma).epsilon(1e-14));
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(special::trigamma(1.0) == doctest::Approx(pi2 / 6).epsilon(1e-14));
  CHECK(special::trigamma(0.5) == doctest::Approx(pi2 / 2).epsilon(1e-14));
  CHECK(special::trigamma(2.0) == doctest::Approx(pi2 / 6 - 1).epsilon(1e-14));
}

TEST_CASE("large-argument asymptotics") {
  for (double x : {20.0, 57.3, 200.0, 1e4}) {
    CHECK(special::log_gamma(x) == doctest::Approx(stirling_log_gamma(x)).epsilon(1e-13));
    CHECK(special::digamma(x) == doctest::Approx(asymptotic_digamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("derivative consistency") {
  const double h = 1e-5;
  for (double x : {0.3, 1.7, 8.0, 40.0}) {
    const double d1 = (special::log_gamma(x + h) - special::log_gamma(x - h)) / (2 * h);
    CHECK(special::digamma(x) == doctest::Approx(d1).epsilon(1e-8));
    const double d2 = (special::digamma(x + h) - special::digamma(x - h)) / (2 * h);
    CHECK(special::trigamma(x) == doctest::Approx(d2).epsilon(1e-7));
  }
}

TEST_CASE("domain") {
  CHECK_THROWS_AS(special::log_gamma(0.0), Error);
  CHECK_THROWS_AS(special::digamma(-1.5), Error);
  CHECK_THROWS_AS(special::trigamma(std::nan("")), Error);
}

}  // TEST_SUITE
