#include "morsegpe/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace morsegpe {

namespace {

PacketState axpy(const PacketState& y, double h, const PacketState& k) {
  return {y.x0 + h * k.x0, y.v + h * k.v, y.s + h * k.s, y.w + h * k.w};
}

bool finite(const PacketState& y) {
  return std::isfinite(y.x0) && std::isfinite(y.v) && std::isfinite(y.s) &&
         std::isfinite(y.w);
}

PacketState rk4_step(const PacketState& y, double h, double K, double gamma,
                     double s_min) {
  const PacketState k1 = rhs(y, K, gamma, s_min);
  const PacketState k2 = rhs(axpy(y, 0.5 * h, k1), K, gamma, s_min);
  const PacketState k3 = rhs(axpy(y, 0.5 * h, k2), K, gamma, s_min);
  const PacketState k4 = rhs(axpy(y, h, k3), K, gamma, s_min);
  const double c = h / 6.0;
  return {y.x0 + c * (k1.x0 + 2.0 * k2.x0 + 2.0 * k3.x0 + k4.x0),
          y.v + c * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
          y.s + c * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s),
          y.w + c * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

// Dormand-Prince 5(4) tableau (autonomous system, so no c_i nodes).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using Vec4 = std::array<double, 4>;

Vec4 pack(const PacketState& y) { return {y.x0, y.v, y.s, y.w}; }
PacketState unpack(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

struct DPStep {
  PacketState y;
  double err;  // scaled error norm, accept when <= 1
};

DPStep dormand_prince_step(const PacketState& y, double h, double K,
                           double gamma, const IntegratorSettings& cfg) {
  auto f = [&](const Vec4& u) { return pack(rhs(unpack(u), K, gamma, cfg.s_min)); };
  const Vec4 y0 = pack(y);
  auto combo = [&](std::initializer_list<std::pair<double, const Vec4*>> terms) {
    Vec4 out = y0;
    for (const auto& [coef, k] : terms)
      for (int i = 0; i < 4; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };
  const Vec4 k1 = f(y0);
  const Vec4 k2 = f(combo({{a21, &k1}}));
  const Vec4 k3 = f(combo({{a31, &k1}, {a32, &k2}}));
  const Vec4 k4 = f(combo({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vec4 k5 = f(combo({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vec4 k6 = f(combo({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const Vec4 y1 = combo({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const Vec4 k7 = f(y1);
  double err = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
    const double scale =
        cfg.atol + cfg.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    err = std::max(err, std::abs(e) / scale);
  }
  return {unpack(y1), err};
}

void validate(const PacketState& init, double K, double t_max,
              const IntegratorSettings& cfg) {
  require(finite(init), "initial state must be finite");
  require(init.s > 0.0, "initial squared width must be > 0");
  require(std::isfinite(K) && K > 0.0, "K must be > 0");
  require(std::isfinite(t_max) && t_max > 0.0, "t_max must be > 0");
  require(cfg.dt > 0.0, "dt must be > 0");
  require(cfg.sample_interval > 0.0, "sample_interval must be > 0");
  require(cfg.rtol > 0.0 && cfg.atol > 0.0, "tolerances must be > 0");
}

bool escaping(const PacketState& y, double x_stop) {
  return y.x0 > x_stop && y.v > 0.0;
}

void integrate_fixed(Trajectory& traj, PacketState y, double t_max) {
  const IntegratorSettings& cfg = traj.settings;
  const long n_steps = static_cast<long>(std::ceil(t_max / cfg.dt - 1e-9));
  const long every =
      std::max(1L, std::lround(cfg.sample_interval / cfg.dt));
  double t = 0.0;
  for (long n = 1; n <= n_steps; ++n) {
    const double t_next = (n == n_steps) ? t_max : n * cfg.dt;
    try {
      y = rk4_step(y, t_next - t, traj.K, traj.gamma, cfg.s_min);
    } catch (const Error& e) {
      traj.failure = IntegrationFailure{e.kind(), t, e.what()};
      return;
    }
    t = t_next;
    ++traj.steps;
    if (!finite(y)) {
      traj.failure = IntegrationFailure{
          ErrorKind::StepUnderflow, t,
          "non-finite state; step too coarse for the left-wall reflection"};
      return;
    }
    const bool stop = escaping(y, cfg.x_stop);
    if (stop || n % every == 0 || n == n_steps) {
      traj.times.push_back(t);
      traj.states.push_back(y);
    }
    if (stop) {
      traj.stopped_on_escape = true;
      return;
    }
  }
}

void integrate_adaptive(Trajectory& traj, PacketState y, double t_max) {
  const IntegratorSettings& cfg = traj.settings;
  double t = 0.0;
  double h = cfg.dt;
  long sample_index = 1;
  while (t < t_max) {
    const double t_sample = std::min(t_max, sample_index * cfg.sample_interval);
    const double h_try = std::min(h, t_sample - t);
    DPStep step{};
    try {
      step = dormand_prince_step(y, h_try, traj.K, traj.gamma, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::WidthCollapse || h_try <= cfg.dt_floor) {
        traj.failure = IntegrationFailure{e.kind(), t, e.what()};
        return;
      }
      // A trial stage overshot the width floor; retry smaller.
      h = 0.25 * h_try;
      continue;
    }
    if (!std::isfinite(step.err) || !finite(step.y) || step.err > 1.0) {
      const double factor =
          std::isfinite(step.err) ? std::max(0.2, 0.9 * std::pow(step.err, -0.2))
                                  : 0.2;
      h = h_try * factor;
      if (h < cfg.dt_floor) {
        traj.failure = IntegrationFailure{
            ErrorKind::StepUnderflow, t,
            "adaptive step fell below the floor (stiff left-wall reflection)"};
        return;
      }
      continue;
    }
    y = step.y;
    const bool hit_sample = (h_try == t_sample - t);
    t = hit_sample ? t_sample : t + h_try;
    ++traj.steps;
    const bool stop = escaping(y, cfg.x_stop);
    if (hit_sample || stop) {
      traj.times.push_back(t);
      traj.states.push_back(y);
      if (hit_sample) ++sample_index;
    }
    if (stop) {
      traj.stopped_on_escape = true;
      return;
    }
    const double grow =
        step.err > 0.0 ? std::min(5.0, 0.9 * std::pow(step.err, -0.2)) : 5.0;
    h = std::max(h_try * grow, cfg.dt_floor);
  }
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double PacketState::width() const { return std::sqrt(s); }

PacketState rhs(const PacketState& y, double K, double gamma, double s_min) {
  if (!(y.s > s_min)) {
    fail(ErrorKind::WidthCollapse,
         "packet width collapsed (Delta^2 = " + std::to_string(y.s) + ")");
  }
  const double delta = std::sqrt(y.s);
  const double far = gaussian_exp_moment(y.x0, delta, 1);   // e^{-(x0 - s/4)}
  const double near = gaussian_exp_moment(y.x0, delta, 2);  // e^{-(2 x0 - s)}
  PacketState d;
  d.x0 = y.v;
  d.v = 2.0 * (near - far);
  d.s = y.w;
  d.w = 2.0 / (K * K * y.s) + gamma / delta + 4.0 * y.s * (0.5 * far - near);
  return d;
}

Trajectory integrate(const PacketState& init, double K, double gamma,
                     double t_max, const IntegratorSettings& settings) {
  validate(init, K, t_max, settings);
  require(std::isfinite(gamma), "gamma must be finite");
  Trajectory traj;
  traj.K = K;
  traj.gamma = gamma;
  traj.t_max = t_max;
  traj.settings = settings;
  traj.times.push_back(0.0);
  traj.states.push_back(init);
  if (!(init.s > settings.s_min)) {
    traj.failure = IntegrationFailure{ErrorKind::WidthCollapse, 0.0,
                                      "initial width below the collapse floor"};
    return traj;
  }
  if (settings.mode == StepMode::FixedRK4) {
    integrate_fixed(traj, init, t_max);
  } else {
    integrate_adaptive(traj, init, t_max);
  }
  return traj;
}

PacketState integrate_and_reverse(const PacketState& init, double K,
                                  double gamma, double t,
                                  const IntegratorSettings& settings) {
  IntegratorSettings cfg = settings;
  cfg.x_stop = std::numeric_limits<double>::infinity();
  const Trajectory fwd = integrate(init, K, gamma, t, cfg);
  if (!fwd.ok()) fail(fwd.failure->kind, fwd.failure->message);
  PacketState mid = fwd.states.back();
  mid.v = -mid.v;
  mid.w = -mid.w;
  const Trajectory back = integrate(mid, K, gamma, t, cfg);
  if (!back.ok()) fail(back.failure->kind, back.failure->message);
  return back.states.back();
}

Verdict classify(const Trajectory& traj, double x_esc, double t_max,
                 int hysteresis) {
  require(traj.times.size() == traj.states.size() && !traj.times.empty(),
          "classify: malformed trajectory");
  const double t_eps = 1e-9 * std::max(1.0, t_max);
  int reflections = 0;
  long last_change = -1;
  int prev_sign = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] > t_max + t_eps) break;
    const PacketState& y = traj.states[i];
    if (y.x0 > x_esc && y.v > 0.0) return Escaped{traj.times[i]};
    const int sg = sign_of(y.v);
    if (sg == 0) continue;
    if (prev_sign != 0 && sg != prev_sign) {
      const long idx = static_cast<long>(i);
      if (last_change < 0 || idx - last_change >= hysteresis) ++reflections;
      last_change = idx;
    }
    prev_sign = sg;
  }
  if (traj.failure) {
    std::ostringstream os;
    os << to_string(traj.failure->kind) << " at t = " << traj.failure->time
       << ": " << traj.failure->message;
    return Indeterminate{os.str()};
  }
  if (traj.times.back() < t_max - t_eps) {
    return Indeterminate{"trajectory ends before t_max without reaching x_esc"};
  }
  return Trapped{reflections};
}

bool is_escaped(const Verdict& v) { return std::holds_alternative<Escaped>(v); }
bool is_trapped(const Verdict& v) { return std::holds_alternative<Trapped>(v); }

std::string describe(const Verdict& v) {
  std::ostringstream os;
  if (const auto* t = std::get_if<Trapped>(&v)) {
    os << "Trapped{reflections=" << t->reflections << "}";
  } else if (const auto* e = std::get_if<Escaped>(&v)) {
    os << "Escaped{t_escape=" << e->t_escape << "}";
  } else {
    os << "Indeterminate{" << std::get<Indeterminate>(v).reason << "}";
  }
  return os.str();
}

Verdict probe(double K, double gamma, double delta0, double p0,
              const ThresholdOptions& opts) {
  IntegratorSettings cfg = opts.settings;
  cfg.x_stop = opts.x_esc;
  cfg.sample_interval = std::max(cfg.sample_interval, 0.1);
  const Trajectory traj =
      integrate(PacketState::released(p0, delta0), K, gamma, opts.t_max, cfg);
  return classify(traj, opts.x_esc, opts.t_max);
}

ThresholdResult threshold_momentum(double K, double gamma, double delta0,
                                   const ThresholdOptions& opts) {
  require(opts.tol > 0.0, "threshold tolerance must be > 0");
  require(opts.p_lo >= 0.0 && opts.p_hi > opts.p_lo, "invalid momentum bracket");
  const ScaledParams base = ScaledParams::from_gamma(K, gamma, delta0);
  ThresholdResult out;
  auto run = [&](double p) {
    ++out.evaluations;
    Verdict v = probe(K, gamma, delta0, p, opts);
    if (const auto* bad = std::get_if<Indeterminate>(&v)) {
      fail(ErrorKind::Indeterminate,
           "probe at p0 = " + std::to_string(p) + " failed: " + bad->reason);
    }
    return is_escaped(v);
  };
  double lo = opts.p_lo;
  double hi = opts.p_hi;
  if (run(lo)) {
    fail(ErrorKind::NoThreshold,
         "packet escapes already at p0 = " + std::to_string(lo) +
             " (coupling above critical)");
  }
  if (!run(hi)) {
    fail(ErrorKind::NoThreshold,
         "packet still trapped at p0 = " + std::to_string(hi));
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (run(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.p_th = 0.5 * (lo + hi);
  out.E_th = initial_energy(base.with_p0(out.p_th));
  return out;
}

std::vector<ThresholdRow> threshold_energy_table(
    const std::vector<double>& K_values, const std::vector<double>& gamma_values,
    double delta0, const ThresholdOptions& opts) {
  std::vector<std::future<ThresholdRow>> jobs;
  for (double K : K_values) {
    for (double gamma : gamma_values) {
      jobs.push_back(std::async(std::launch::async, [=] {
        ThresholdRow row{K, gamma, std::nullopt, ""};
        try {
          row.result = threshold_momentum(K, gamma, delta0, opts);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoThreshold) throw;
          row.note = e.what();
        }
        return row;
      }));
    }
  }
  std::vector<ThresholdRow> rows;
  rows.reserve(jobs.size());
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

double classical_threshold(double x) {
  const double v = morse_potential(x);
  return v < 0.0 ? std::sqrt(-2.0 * v) : 0.0;
}

WidthBehavior width_behavior(const Trajectory& traj, const WidthOptions& opts) {
  const std::size_t n = traj.states.size();
  if (n < opts.min_samples) {
    fail(ErrorKind::Indeterminate, "width_behavior: trajectory too short");
  }
  const double d0 = traj.states.front().width();
  double lo = d0, hi = d0, dev = 0.0;
  for (const PacketState& y : traj.states) {
    const double d = y.width();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    dev = std::max(dev, std::abs(d - d0) / d0);
  }
  if (dev < opts.shape_tolerance) return ShapeInvariant{dev};
  const double ratio = traj.states.back().width() / d0;
  if (ratio > opts.growth_factor) {
    bool monotone = true;
    for (std::size_t i = n - n / 4; i < n; ++i) {
      if (traj.states[i].s < traj.states[i - 1].s) {
        monotone = false;
        break;
      }
    }
    if (monotone) return Growing{ratio};
  }
  return BoundedOscillatory{lo, hi};
}

std::string describe(const WidthBehavior& b) {
  std::ostringstream os;
  if (const auto* g = std::get_if<Growing>(&b)) {
    os << "Growing{final_ratio=" << g->final_ratio << "}";
  } else if (const auto* o = std::get_if<BoundedOscillatory>(&b)) {
    os << "BoundedOscillatory{min=" << o->min_width << ", max=" << o->max_width
       << "}";
  } else {
    os << "ShapeInvariant{relative_variation="
       << std::get<ShapeInvariant>(b).relative_variation << "}";
  }
  return os.str();
}

double packet_energy(const PacketState& y, double K, double gamma) {
  const double delta = y.width();
  const double trap = gaussian_exp_moment(y.x0, delta, 2) -
                      2.0 * gaussian_exp_moment(y.x0, delta, 1);
  return 0.5 * y.v * y.v + 1.0 / (2.0 * K * K * delta) + trap + gamma / delta;
}

double max_energy_drift(const Trajectory& traj) {
  require(!traj.states.empty(), "max_energy_drift: empty trajectory");
  const double e0 = packet_energy(traj.states.front(), traj.K, traj.gamma);
  double drift = 0.0;
  for (const PacketState& y : traj.states) {
    drift = std::max(drift, std::abs(packet_energy(y, traj.K, traj.gamma) - e0));
  }
  return drift;
}

}  // namespace morsegpe
