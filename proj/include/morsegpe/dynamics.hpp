#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morsegpe/core_model.hpp"
#include "morsegpe/error.hpp"

// Gaussian wave-packet dynamics in the Morse trap. The packet keeps the form
//   psi ~ exp(-(x - x0)^2 / (2 Delta^2)) e^{i p x}
// and its centre and squared width obey
//   x0''      = 2 [e^{-(2 x0 - Delta^2)} - e^{-(x0 - Delta^2/4)}]
//   (Delta^2)'' = 2/(K^2 Delta^2) + gamma/Delta
//               + 4 Delta^2 [e^{-(x0 - Delta^2/4)}/2 - e^{-(2 x0 - Delta^2)}]

namespace morsegpe {

struct PacketState {
  double x0 = 0.0;  // centre
  double v = 0.0;   // d x0 / dt
  double s = kDefaultWidth * kDefaultWidth;  // Delta^2
  double w = 0.0;   // d s / dt

  double width() const;  // Delta = sqrt(s)

  static PacketState released(double p0, double delta0 = kDefaultWidth) {
    return {0.0, p0, delta0 * delta0, 0.0};
  }
};

inline constexpr double kWidthFloor = 1e-8;

// Time derivatives (dx0, dv, ds, dw), packed in a PacketState. Throws
// WidthCollapse when s <= s_min.
PacketState rhs(const PacketState& state, double K, double gamma,
                double s_min = kWidthFloor);

enum class StepMode { FixedRK4, AdaptiveDormandPrince };

struct IntegratorSettings {
  StepMode mode = StepMode::FixedRK4;
  double dt = 1e-3;               // fixed step, or first trial step
  double rtol = 1e-8;             // adaptive only
  double atol = 1e-10;            // adaptive only
  double dt_floor = 1e-12;        // adaptive only; StepUnderflow below this
  double sample_interval = 1e-2;  // spacing of stored samples
  double s_min = kWidthFloor;
  // Integration stops once x0 > x_stop with v > 0. Infinity disables it.
  double x_stop = 15.0;
};

struct IntegrationFailure {
  ErrorKind kind;
  double time;
  std::string message;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PacketState> states;
  double K = 0.0;
  double gamma = 0.0;
  double t_max = 0.0;
  IntegratorSettings settings{};
  std::optional<IntegrationFailure> failure;
  bool stopped_on_escape = false;
  long steps = 0;

  bool ok() const { return !failure.has_value(); }
};

// Integrates from t = 0 to t_max, stopping early on escape or on an
// integrator failure. Failures are recorded on the trajectory (the partial
// trajectory is kept), not thrown; argument errors still throw.
Trajectory integrate(const PacketState& init, double K, double gamma,
                     double t_max, const IntegratorSettings& settings = {});

// Deviation from time-reversal symmetry: integrates for t, flips v and w,
// integrates again, and returns the final state (ideally `init` with v and w
// flipped).
PacketState integrate_and_reverse(const PacketState& init, double K,
                                  double gamma, double t,
                                  const IntegratorSettings& settings);

struct Trapped {
  int reflections = 0;
};
struct Escaped {
  double t_escape = 0.0;
};
struct Indeterminate {
  std::string reason;
};
using Verdict = std::variant<Trapped, Escaped, Indeterminate>;

inline constexpr double kEscapeRadius = 15.0;
inline constexpr double kEscapeHorizon = 100.0;
inline constexpr int kReflectionHysteresis = 10;

// Escaped once x0 > x_esc with v > 0 at some t <= t_max. Trapped if the run
// covers [0, t_max] without that; reflections are sign changes of v, ignoring
// changes within `hysteresis` samples of the previous one.
Verdict classify(const Trajectory& traj, double x_esc = kEscapeRadius,
                 double t_max = kEscapeHorizon,
                 int hysteresis = kReflectionHysteresis);

bool is_escaped(const Verdict& v);
bool is_trapped(const Verdict& v);
std::string describe(const Verdict& v);

// Probes near the threshold can pass through near-collapse width bounces
// (Delta^2 ~ 1e-5 for attractive coupling) that a fixed 1e-3 step cannot
// resolve, so the search integrates adaptively.
inline IntegratorSettings threshold_integrator() {
  IntegratorSettings s;
  s.mode = StepMode::AdaptiveDormandPrince;
  s.sample_interval = 0.1;
  return s;
}

struct ThresholdOptions {
  double p_lo = 0.0;
  double p_hi = 3.0;
  double tol = 1e-3;
  double x_esc = kEscapeRadius;
  double t_max = kEscapeHorizon;
  IntegratorSettings settings = threshold_integrator();
};

struct ThresholdResult {
  double p_th = 0.0;
  double E_th = 0.0;  // initial_energy at p_th, units of D
  double bracket_lo = 0.0;  // trapped
  double bracket_hi = 0.0;  // escaped
  int evaluations = 0;
};

// Runs one packet released at x0 = 0 with momentum p0 and classifies it.
Verdict probe(double K, double gamma, double delta0, double p0,
              const ThresholdOptions& opts = {});

// Bisection on p0 for the trapped -> escaped transition. Throws NoThreshold
// when p0 = p_lo already escapes (or p_hi is still trapped), Indeterminate
// when a probe fails to integrate.
ThresholdResult threshold_momentum(double K, double gamma,
                                   double delta0 = kDefaultWidth,
                                   const ThresholdOptions& opts = {});

struct ThresholdRow {
  double K = 0.0;
  double gamma = 0.0;
  std::optional<ThresholdResult> result;  // empty when no threshold exists
  std::string note;
};

// One row per (K, gamma) pair, K-major. Cells run concurrently.
std::vector<ThresholdRow> threshold_energy_table(
    const std::vector<double>& K_values, const std::vector<double>& gamma_values,
    double delta0 = kDefaultWidth, const ThresholdOptions& opts = {});

// Escape momentum of a classical particle at rest energy V(x): sqrt(-2 V(x)),
// zero where V(x) >= 0. At the minimum x = 0 this is sqrt(2).
double classical_threshold(double x = 0.0);

struct Growing {
  double final_ratio = 0.0;  // Delta(t_end) / Delta0
};
struct BoundedOscillatory {
  double min_width = 0.0;
  double max_width = 0.0;
};
struct ShapeInvariant {
  double relative_variation = 0.0;  // max |Delta - Delta0| / Delta0
};
using WidthBehavior = std::variant<Growing, BoundedOscillatory, ShapeInvariant>;

struct WidthOptions {
  double growth_factor = 2.0;
  double shape_tolerance = 0.10;
  std::size_t min_samples = 20;
};

// Throws Indeterminate on trajectories shorter than min_samples.
WidthBehavior width_behavior(const Trajectory& traj,
                             const WidthOptions& opts = {});
std::string describe(const WidthBehavior& b);

// Packet energy diagnostic, evaluated with the released-packet energy formula
// generalised to an arbitrary centre: v^2/2 + 1/(2 K^2 Delta) + <V> + gamma/Delta.
// Not conserved by the packet equations; reported only as drift.
double packet_energy(const PacketState& state, double K, double gamma);
double max_energy_drift(const Trajectory& traj);

}  // namespace morsegpe
