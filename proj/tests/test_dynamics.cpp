#include <doctest.h>

#include <cmath>
#include <limits>

#include "morsegpe/dynamics.hpp"
#include "morsegpe/error.hpp"

using namespace morsegpe;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntegratorSettings rk4(double dt, double sample = 0.1) {
  IntegratorSettings s;
  s.dt = dt;
  s.sample_interval = sample;
  s.x_stop = kInf;
  return s;
}

double state_distance(const PacketState& a, const PacketState& b) {
  return std::max({std::abs(a.x0 - b.x0), std::abs(a.v - b.v), std::abs(a.s - b.s),
                   std::abs(a.w - b.w)});
}

Trajectory synthetic(double (*width)(double), std::size_t n = 200) {
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    const double time = 0.1 * static_cast<double>(i);
    const double d = width(time);
    t.times.push_back(time);
    t.states.push_back({0.0, 0.0, d * d, 0.0});
  }
  t.t_max = t.times.back();
  return t;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("right-hand side at release") {
  const PacketState y = PacketState::released(0.3);
  const PacketState d = rhs(y, 2.0, 0.5);
  CHECK(d.x0 == 0.3);
  CHECK(d.s == 0.0);
  CHECK(d.v == doctest::Approx(2 * (std::exp(0.16) - std::exp(0.04))).epsilon(1e-14));
  const double w = 2 / (4 * 0.16) + 0.5 / 0.4 + 4 * 0.16 * (0.5 * std::exp(0.04) - std::exp(0.16));
  CHECK(d.w == doctest::Approx(w).epsilon(1e-14));
  CHECK_THROWS_AS(rhs({0, 0, 0.0, 0}, 2.0, 0.5), Error);
}

TEST_CASE("time reversal") {
  for (double gamma : {0.0, 0.5, -0.5}) {
    const PacketState init = PacketState::released(0.3);
    PacketState back = integrate_and_reverse(init, 2.0, gamma, 10.0, rk4(1e-3));
    back.v = -back.v;
    back.w = -back.w;
    CHECK(state_distance(back, init) < 1e-6);
  }
}

TEST_CASE("fixed step is fourth order") {
  const PacketState init = PacketState::released(0.3);
  const PacketState ref = integrate(init, 2.0, 0.5, 5.0, rk4(1e-4)).states.back();
  const double e1 = state_distance(integrate(init, 2.0, 0.5, 5.0, rk4(0.02)).states.back(), ref);
  const double e2 = state_distance(integrate(init, 2.0, 0.5, 5.0, rk4(0.01)).states.back(), ref);
  const double e3 = state_distance(integrate(init, 2.0, 0.5, 5.0, rk4(0.005)).states.back(), ref);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
  CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("adaptive and fixed modes agree") {
  IntegratorSettings a = rk4(1e-2);
  a.mode = StepMode::AdaptiveDormandPrince;
  const PacketState init = PacketState::released(0.6);
  const Trajectory ta = integrate(init, 3.0, -0.5, 20.0, a);
  const Trajectory tf = integrate(init, 3.0, -0.5, 20.0, rk4(5e-4));
  REQUIRE(ta.times.size() == tf.times.size());
  CHECK(ta.times.back() == doctest::Approx(20.0));
  CHECK(state_distance(ta.states.back(), tf.states.back()) < 1e-6);
  CHECK(ta.steps < tf.steps);
}

TEST_CASE("samples and early stop") {
  IntegratorSettings s;
  s.sample_interval = 0.5;
  const Trajectory t = integrate(PacketState::released(2.0), 2.0, 0.0, 100.0, s);
  CHECK(t.ok());
  CHECK(t.stopped_on_escape);
  CHECK(t.times.back() < 100.0);
  CHECK(t.states.back().x0 > 15.0);
  for (std::size_t i = 1; i < t.times.size() - 1; ++i) {
    CHECK(t.times[i] == doctest::Approx(0.5 * static_cast<double>(i)));
  }
  CHECK(is_escaped(classify(t)));
}

TEST_CASE("width collapse is recorded, not thrown") {
  IntegratorSettings s = rk4(0.05);
  const Trajectory t = integrate({0.0, 0.0, 1e-3, -1.0}, 2.0, -3.0, 10.0, s);
  REQUIRE_FALSE(t.ok());
  CHECK(t.failure->kind == ErrorKind::WidthCollapse);
  CHECK(t.failure->time < 10.0);
  CHECK(std::holds_alternative<Indeterminate>(classify(t, 15.0, 10.0)));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(integrate(PacketState::released(0.1), 0.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(integrate(PacketState::released(0.1), 2.0, 0.0, -1.0), Error);
  IntegratorSettings s;
  s.dt = 0.0;
  CHECK_THROWS_AS(integrate(PacketState::released(0.1), 2.0, 0.0, 1.0, s), Error);
}

TEST_CASE("classification is stable under a larger box and horizon") {
  ThresholdOptions base;
  ThresholdOptions big = base;
  big.x_esc = 2 * base.x_esc;
  big.t_max = 2 * base.t_max;
  for (double p0 : {0.1, 0.2, 1.0}) {
    CHECK(is_escaped(probe(2.0, 0.5, 0.4, p0, base)) ==
          is_escaped(probe(2.0, 0.5, 0.4, p0, big)));
  }
  CHECK(is_escaped(probe(2.0, 1.2, 0.4, 0.1, big)));
}

TEST_CASE("reflections ignore jitter inside the hysteresis window") {
  Trajectory t;
  const double v[] = {1, -1, 1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 1};
  for (int i = 0; i < 15; ++i) {
    t.times.push_back(i);
    t.states.push_back({0.0, v[i], 0.16, 0.0});
  }
  t.t_max = 14;
  const Verdict verdict = classify(t, 15.0, 14.0, 5);
  REQUIRE(is_trapped(verdict));
  CHECK(std::get<Trapped>(verdict).reflections == 2);
  const Verdict raw = classify(t, 15.0, 14.0, 1);
  CHECK(std::get<Trapped>(raw).reflections == 4);
}

TEST_CASE("short runs are indeterminate") {
  Trajectory t;
  t.times = {0.0, 1.0};
  t.states = {PacketState{}, PacketState{}};
  CHECK(std::holds_alternative<Indeterminate>(classify(t, 15.0, 10.0)));
}

TEST_CASE("threshold bisection contract") {
  ThresholdOptions o;
  o.tol = 1e-3;
  const ThresholdResult r = threshold_momentum(2.0, 0.5, 0.4, o);
  CHECK(r.bracket_hi - r.bracket_lo <= o.tol);
  CHECK(r.bracket_lo <= r.p_th);
  CHECK(r.p_th <= r.bracket_hi);
  CHECK(is_trapped(probe(2.0, 0.5, 0.4, r.bracket_lo, o)));
  CHECK(is_escaped(probe(2.0, 0.5, 0.4, r.bracket_hi, o)));
  CHECK(r.E_th == doctest::Approx(initial_energy(ScaledParams::from_gamma(2.0, 0.5, 0.4, r.p_th))));
  CHECK(r.p_th < classical_threshold());
}

TEST_CASE("no threshold above the critical coupling") {
  try {
    threshold_momentum(2.0, 1.2);
    FAIL("expected NoThreshold");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoThreshold);
  }
  const auto rows = threshold_energy_table({2.0}, {1.2, 0.5});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].result.has_value());
  CHECK_FALSE(rows[0].note.empty());
  CHECK(rows[1].result.has_value());
}

TEST_CASE("table rows are K-major and deterministic") {
  const auto a = threshold_energy_table({2.0, 3.0}, {0.5, -0.5});
  const auto b = threshold_energy_table({2.0, 3.0}, {0.5, -0.5});
  REQUIRE(a.size() == 4);
  CHECK(a[1].K == 2.0);
  CHECK(a[1].gamma == -0.5);
  CHECK(a[2].K == 3.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].result->p_th == b[i].result->p_th);
  }
}

TEST_CASE("classical threshold") {
  CHECK(classical_threshold() == doctest::Approx(std::sqrt(2.0)));
  CHECK(classical_threshold(10.0) == doctest::Approx(std::sqrt(4 * std::exp(-10.0) - 2 * std::exp(-20.0))));
  CHECK(classical_threshold(-2.0) == 0.0);
}

TEST_CASE("free repulsive packet spreads convexly") {
  // Far outside the well only the dispersion and repulsion terms remain
  // (until the packet grows wide enough to reach the wall).
  IntegratorSettings s = rk4(1e-3, 0.5);
  const Trajectory t = integrate({40.0, 0.0, 0.16, 0.0}, 2.0, 0.5, 10.0, s);
  REQUIRE(t.ok());
  for (std::size_t i = 1; i + 1 < t.states.size(); ++i) {
    const double second = t.states[i + 1].s - 2 * t.states[i].s + t.states[i - 1].s;
    CHECK(second > 0.0);
    CHECK(t.states[i + 1].s > t.states[i].s);
  }
  CHECK(std::holds_alternative<Growing>(width_behavior(t)));
}

TEST_CASE("width behaviour classes") {
  const Trajectory flat = synthetic([](double t) { return 0.4 * (1 + 0.02 * std::sin(t)); });
  const WidthBehavior a = width_behavior(flat);
  REQUIRE(std::holds_alternative<ShapeInvariant>(a));
  CHECK(std::get<ShapeInvariant>(a).relative_variation == doctest::Approx(0.02).epsilon(0.01));

  const Trajectory wobble = synthetic([](double t) { return 0.4 * (1 + 0.3 * std::sin(t)); });
  const WidthBehavior b = width_behavior(wobble);
  REQUIRE(std::holds_alternative<BoundedOscillatory>(b));
  CHECK(std::get<BoundedOscillatory>(b).max_width == doctest::Approx(0.52).epsilon(1e-3));

  const Trajectory grow = synthetic([](double t) { return 0.4 * (1 + t); });
  const WidthBehavior c = width_behavior(grow);
  REQUIRE(std::holds_alternative<Growing>(c));
  CHECK(std::get<Growing>(c).final_ratio > 2.0);

  CHECK_THROWS_AS(width_behavior(synthetic([](double) { return 0.4; }, 5)), Error);
}

TEST_CASE("energy diagnostic") {
  const PacketState y = PacketState::released(0.45);
  CHECK(packet_energy(y, 2.0, 0.5) ==
        doctest::Approx(initial_energy(ScaledParams::from_gamma(2.0, 0.5, 0.4, 0.45))));
  const Trajectory t = integrate(y, 2.0, 0.5, 5.0, rk4(1e-3));
  CHECK(max_energy_drift(t) >= 0.0);
  CHECK(std::isfinite(max_energy_drift(t)));
}

}  // TEST_SUITE
