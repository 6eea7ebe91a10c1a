#include "morsegpe/variational.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "morsegpe/core_model.hpp"
#include "morsegpe/error.hpp"
#include "morsegpe/special.hpp"

namespace morsegpe {

namespace {

void require_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
}

void require_bound_regime(double K) {
  require(std::isfinite(K) && K > 0.5,
          "K must be > 1/2 (no bound state exists otherwise)");
}

// d/dalpha log f(alpha)
double log_factor_slope(double alpha) {
  return 4.0 * (special::digamma(4.0 * alpha) - std::numbers::ln2 -
                special::digamma(2.0 * alpha));
}

double gradient_slope(double alpha, double lambda) {
  return 2.0 + lambda * interaction_factor_second_derivative(alpha);
}

struct LocalMinimum {
  double alpha;
  double gradient;
  int iterations;
  bool converged;
};

// The gradient is a difference of O(K) terms, so the tolerance scales with
// their size.
double gradient_threshold(double alpha, double K, double lambda,
                          const MinimizeOptions& opts) {
  const double terms = 2.0 * alpha + std::abs(1.0 - 2.0 * K) +
                       std::abs(lambda * interaction_factor_derivative(alpha));
  return opts.gradient_tol * std::max(1.0, terms);
}

// Newton on the gradient, falling back to bisection whenever the step leaves
// the bracket [lo, hi] (gradient negative at lo, non-negative at hi).
LocalMinimum refine_minimum(double lo, double hi, double K, double lambda,
                            const MinimizeOptions& opts) {
  double x = 0.5 * (lo + hi);
  double g = energy_gradient(x, K, lambda);
  int it = 0;
  while (it < opts.max_iterations) {
    ++it;
    if (std::abs(g) < gradient_threshold(x, K, lambda, opts)) return {x, g, it, true};
    if (g < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = gradient_slope(x, lambda);
    double next = x - g / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
    g = energy_gradient(x, K, lambda);
  }
  return {x, g, it, std::abs(g) < gradient_threshold(x, K, lambda, opts)};
}

}  // namespace

TrialWavefunction TrialWavefunction::normalized(double alpha, double K) {
  require_alpha(alpha);
  require(std::isfinite(K) && K > 0.0, "K must be > 0");
  // Integral of y^{2 alpha} e^{-2 K y} dx with dx = dy / y.
  const double log_norm =
      2.0 * alpha * std::log(2.0 * K) - special::log_gamma(2.0 * alpha);
  return {alpha, K, log_norm};
}

double TrialWavefunction::operator()(double x) const {
  // log u = log_norm/2 + alpha log y - K y, y = e^{-x}
  const double ky = K * std::exp(-x);
  if (!std::isfinite(ky)) return 0.0;
  return std::exp(0.5 * log_norm - alpha * x - ky);
}

double interaction_factor(double alpha) {
  require_alpha(alpha);
  const double log_f = special::log_gamma(4.0 * alpha) -
                       4.0 * alpha * std::numbers::ln2 -
                       2.0 * special::log_gamma(2.0 * alpha);
  return std::exp(log_f);
}

double interaction_factor_derivative(double alpha) {
  return interaction_factor(alpha) * log_factor_slope(alpha);
}

double interaction_factor_second_derivative(double alpha) {
  const double slope = log_factor_slope(alpha);
  const double curvature = 16.0 * special::trigamma(4.0 * alpha) -
                           8.0 * special::trigamma(2.0 * alpha);
  return interaction_factor(alpha) * (slope * slope + curvature);
}

double energy_alpha(double alpha, double K, double lambda) {
  require_alpha(alpha);
  return alpha * alpha + alpha * (1.0 - 2.0 * K) +
         lambda * interaction_factor(alpha);
}

double energy_gradient(double alpha, double K, double lambda) {
  require_alpha(alpha);
  return 2.0 * alpha + (1.0 - 2.0 * K) +
         lambda * interaction_factor_derivative(alpha);
}

BoundStateResult minimize_energy(double K, double lambda,
                                 const MinimizeOptions& opts) {
  require_bound_regime(K);
  require(std::isfinite(lambda), "lambda must be finite");
  require(opts.gradient_tol > 0.0, "gradient tolerance must be > 0");
  require(opts.scan_points >= 16, "scan_points must be >= 16");

  // The minimum sits below K - 1/2 for lambda >= 0; attractive coupling
  // pushes it right, so grow the upper end until the gradient is positive.
  double hi = 4.0 * K;
  while (energy_gradient(hi, K, lambda) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) fail(ErrorKind::NonConvergence, "minimizer bracket diverged");
  }
  const double lo = 1e-6 * std::min(K, 1.0);

  // Local minima are the - to + sign changes of the gradient on a geometric
  // scan; each is polished and the lowest one wins.
  const int n = opts.scan_points;
  const double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  std::optional<BoundStateResult> best;
  int total_iterations = 0;
  double a_prev = lo;
  double g_prev = energy_gradient(a_prev, K, lambda);
  for (int i = 1; i < n; ++i) {
    const double a = (i == n - 1) ? hi : lo * std::pow(ratio, i);
    const double g = energy_gradient(a, K, lambda);
    if (g_prev < 0.0 && g >= 0.0) {
      const LocalMinimum m = refine_minimum(a_prev, a, K, lambda, opts);
      total_iterations += m.iterations;
      if (!m.converged) {
        fail(ErrorKind::NonConvergence,
             "minimize_energy: gradient did not reach tolerance (|g| = " +
                 std::to_string(std::abs(m.gradient)) + ")");
      }
      BoundStateResult r;
      r.alpha_star = m.alpha;
      r.energy_full = energy_alpha(m.alpha, K, lambda);
      r.energy_quadratic = m.alpha * m.alpha + m.alpha * (1.0 - 2.0 * K);
      r.gradient = m.gradient;
      r.converged = true;
      if (!best || r.energy_full < best->energy_full) best = r;
    }
    a_prev = a;
    g_prev = g;
  }
  if (!best || !(best->energy_full < 0.0)) {
    fail(ErrorKind::NoBoundState,
         "no bound state: minimized energy is not negative (K = " +
             std::to_string(K) + ", lambda = " + std::to_string(lambda) + ")");
  }
  best->iterations = total_iterations;
  return *best;
}

double asymptotic_energy(double K, double lambda) {
  require_bound_regime(K);
  const double m = 2.0 * K - 1.0;
  return -0.25 * m * m + lambda / (2.0 * std::sqrt(std::numbers::pi)) * std::sqrt(m);
}

CriticalResult critical_lambda(double K, const CriticalOptions& opts) {
  require_bound_regime(K);
  require(opts.tol > 0.0, "critical_lambda: tol must be > 0");
  require(opts.initial_upper > 0.0, "critical_lambda: initial_upper must be > 0");

  CriticalResult out;
  auto bound = [&](double lambda) {
    ++out.evaluations;
    try {
      (void)minimize_energy(K, lambda, opts.minimize);
      return true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoBoundState) return false;
      throw;
    }
  };

  double lo = 0.0;
  double hi = opts.initial_upper;
  while (bound(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.lambda_max) {
      fail(ErrorKind::BracketFailure,
           "critical_lambda: bound state persists up to lambda_max");
    }
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (bound(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.lambda_c = 0.5 * (lo + hi);
  out.gamma_c = lambda_to_gamma(out.lambda_c, K);
  return out;
}

double critical_lambda_asymptotic(double K) {
  require(std::isfinite(K) && K >= 0.5, "K must be >= 1/2");
  return std::sqrt(std::numbers::pi) / 2.0 * std::pow(2.0 * K - 1.0, 1.5);
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_power_law: size mismatch");
  require(x.size() >= 2, "fit_power_law: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "fit_power_law: values must be > 0");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 1e-12 * n * sxx, "fit_power_law: x values are degenerate");
  PowerLawFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

ScalingResult scaling_exponent(std::span<const double> K_values,
                               const CriticalOptions& opts) {
  require(K_values.size() >= 4, "scaling_exponent: need at least four K values");
  std::vector<std::future<CriticalResult>> jobs;
  jobs.reserve(K_values.size());
  for (double K : K_values) {
    jobs.push_back(std::async(std::launch::async,
                              [K, opts] { return critical_lambda(K, opts); }));
  }
  ScalingResult out;
  out.K.assign(K_values.begin(), K_values.end());
  for (auto& job : jobs) out.lambda_c.push_back(job.get().lambda_c);
  out.fit = fit_power_law(out.K, out.lambda_c);
  return out;
}

}  // namespace morsegpe
