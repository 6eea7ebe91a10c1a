#include <doctest.h>

#include <cmath>
#include <numbers>

#include "morsegpe/core_model.hpp"
#include "morsegpe/error.hpp"
#include "quadrature.hpp"

using namespace morsegpe;

namespace {

double gaussian_density(double x, double x0, double delta) {
  const double d = x - x0;
  return std::exp(-d * d / (delta * delta)) / (std::sqrt(std::numbers::pi) * delta);
}

}  // namespace

TEST_SUITE("core_model") {

TEST_CASE("potential minimum and force") {
  CHECK(morse_potential(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(morse_force(0.0) == doctest::Approx(0.0));
  CHECK(morse_potential(-std::log(2.0)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(morse_potential(40.0) < 0.0);
  CHECK(morse_potential(40.0) > -1e-16);
  const double h = 1e-5;
  for (double x : {-1.5, -0.3, 0.2, 1.0, 4.0}) {
    const double fd = (morse_potential(x + h) - morse_potential(x - h)) / (2 * h);
    CHECK(morse_force(x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("left wall saturates") {
  CHECK(std::isfinite(morse_potential(-800.0)));
  CHECK(morse_potential(-800.0) == doctest::Approx(kSaturated));
  CHECK(saturating_exp(1000.0) == kSaturated);
  CHECK(saturating_exp(1.0) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("Gaussian moments against quadrature") {
  for (double x0 : {-0.5, 0.0, 0.7, 3.0}) {
    for (double delta : {0.2, 0.4, 1.1}) {
      for (int k : {1, 2}) {
        const double ref = testing::simpson(
            [&](double x) { return std::exp(-k * x) * gaussian_density(x, x0, delta); },
            x0 - 12 * delta, x0 + 12 * delta);
        CHECK(gaussian_exp_moment(x0, delta, k) == doctest::Approx(ref).epsilon(1e-10));
      }
      const double q = testing::simpson(
          [&](double x) { return std::pow(gaussian_density(x, x0, delta), 2); },
          x0 - 12 * delta, x0 + 12 * delta);
      CHECK(quartic_norm(delta) == doctest::Approx(q).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(gaussian_exp_moment(0.0, 0.4, 3), Error);
}

TEST_CASE("coupling conversions") {
  CHECK(gamma_to_lambda(1.0, 2.0) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * std::numbers::pi)));
  for (double K : {0.7, 2.0, 35.0}) {
    for (double g : {-1.2, 0.0, 0.5, 3.0}) {
      CHECK(lambda_to_gamma(gamma_to_lambda(g, K), K) == doctest::Approx(g));
    }
  }
  const ScaledParams a = ScaledParams::from_gamma(3.0, 0.5);
  const ScaledParams b = ScaledParams::from_lambda(3.0, a.lambda());
  CHECK(b.gamma() == doctest::Approx(0.5));
  CHECK(a.delta0() == kDefaultWidth);
  CHECK(a.with_p0(0.3).p0() == 0.3);
  CHECK(a.with_p0(0.3).lambda() == a.lambda());
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ScaledParams::from_gamma(0.0, 0.5), Error);
  CHECK_THROWS_AS(ScaledParams::from_gamma(2.0, 0.5, -0.1), Error);
  CHECK_THROWS_AS(ScaledParams::from_gamma(2.0, 0.5, 0.4, -1.0), Error);
  CHECK_THROWS_AS(ScaledParams::from_gamma(2.0, std::nan("")), Error);
  MorseParams p;
  p.mass = 0.0;
  CHECK_THROWS_AS(p.depth_parameter(), Error);
  try {
    ScaledParams::from_gamma(-1.0, 0.5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("physical units") {
  MorseParams p{4.0, 2.0, 0.5, 1.0};
  CHECK(p.depth_parameter() == doctest::Approx(1.0));
  MorseParams q{2.0, 1.0, 1.0, 1.0};
  CHECK(q.depth_parameter() == doctest::Approx(2.0));
  // g = sqrt(2 pi) D / a maps to gamma = 1; widths scale with a, momenta with sqrt(m D).
  const ScaledParams sp =
      scale_params(q, std::sqrt(2.0 * std::numbers::pi) * 2.0, 0.4, std::sqrt(2.0));
  CHECK(sp.K() == doctest::Approx(2.0));
  CHECK(sp.gamma() == doctest::Approx(1.0));
  CHECK(sp.delta0() == doctest::Approx(0.4));
  CHECK(sp.p0() == doctest::Approx(1.0));
}

TEST_CASE("initial packet energy") {
  const double d = 0.4;
  const double expected = 1.0 / (2 * 4.0 * d) + 0.45 * 0.45 / 2 + std::exp(d * d) -
                          2 * std::exp(d * d / 4) + 0.5 / d;
  CHECK(initial_energy(ScaledParams::from_gamma(2.0, 0.5, d, 0.45)) ==
        doctest::Approx(expected).epsilon(1e-14));
  // Reference threshold energy at p0 = 0.45 for K = 2, gamma = 0.5.
  CHECK(initial_energy(ScaledParams::from_gamma(2.0, 0.5, d, 0.45)) ==
        doctest::Approx(0.756).epsilon(0.002));
  // Free packet at rest far below the well: kinetic spread only.
  CHECK(initial_energy(ScaledParams::from_gamma(2.0, 0.0, d, 0.0)) <
        initial_energy(ScaledParams::from_gamma(2.0, 0.0, d, 0.1)));
}

}  // TEST_SUITE
