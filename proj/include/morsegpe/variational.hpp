#pragma once

#include <span>
#include <vector>

// Variational ground state of the stationary GPE in a Morse trap.
//
// Trial family, in y = e^{-x} (x in units of 1/a):
//     u(y) = sqrt(N) * y^alpha * e^{-K y}
// Its energy, in units of hbar^2 a^2 / 2m, is
//     E(alpha) = alpha^2 + alpha (1 - 2K) + lambda * f(alpha),
//     f(alpha) = Gamma(4 alpha) / (2^{4 alpha} Gamma(2 alpha)^2).

namespace morsegpe {

struct TrialWavefunction {
  double alpha;
  double K;
  double log_norm;  // log N, with |u|^2 normalized against dx

  static TrialWavefunction normalized(double alpha, double K);

  // u evaluated at dimensionless position x.
  double operator()(double x) const;
};

double interaction_factor(double alpha);
double interaction_factor_derivative(double alpha);
double interaction_factor_second_derivative(double alpha);

double energy_alpha(double alpha, double K, double lambda);
// dE/dalpha; zero at the variational optimum.
double energy_gradient(double alpha, double K, double lambda);

struct MinimizeOptions {
  // Relative to the size of the terms in dE/dalpha (at least 1).
  double gradient_tol = 1e-10;
  int max_iterations = 100;
  int scan_points = 400;
};

struct BoundStateResult {
  double alpha_star = 0.0;
  double energy_full = 0.0;       // E(alpha*) including the lambda term
  double energy_quadratic = 0.0;  // alpha*^2 + alpha*(1 - 2K) only
  double gradient = 0.0;          // dE/dalpha at alpha*
  bool converged = false;
  int iterations = 0;
};

// Global minimizer of E(alpha) over alpha > 0. Throws NoBoundState when the
// best local minimum is not below zero (E -> 0 as alpha -> 0, so that is the
// unbound limit), NonConvergence when Newton refinement stalls.
BoundStateResult minimize_energy(double K, double lambda,
                                 const MinimizeOptions& opts = {});

// Large-K closed form: -(2K-1)^2/4 + lambda (2K-1)^{1/2} / (2 sqrt(pi)).
double asymptotic_energy(double K, double lambda);

struct CriticalOptions {
  double tol = 1e-6;           // absolute width of the final lambda bracket
  double initial_upper = 1.0;  // first trial upper bracket, doubled as needed
  double lambda_max = 1e8;
  MinimizeOptions minimize{};
};

struct CriticalResult {
  double lambda_c = 0.0;
  double gamma_c = 0.0;
  double bracket_lo = 0.0;  // still bound
  double bracket_hi = 0.0;  // no bound state
  int evaluations = 0;
};

// Smallest lambda at which the minimized E reaches zero, by geometric bracket
// growth followed by bisection.
CriticalResult critical_lambda(double K, const CriticalOptions& opts = {});

// Zero of the large-K closed form: (sqrt(pi)/2) (2K-1)^{3/2}.
double critical_lambda_asymptotic(double K);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log prefactor
};

// Least-squares line through (log x, log y). Needs two distinct x values.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScalingResult {
  PowerLawFit fit;
  std::vector<double> K;
  std::vector<double> lambda_c;
};

// Fits lambda_c ~ K^slope. Requires at least four K values; the K values are
// evaluated concurrently.
ScalingResult scaling_exponent(std::span<const double> K_values,
                               const CriticalOptions& opts = {});

}  // namespace morsegpe
