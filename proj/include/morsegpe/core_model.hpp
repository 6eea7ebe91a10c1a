#pragma once

// Morse trap model shared by the bound-state, packet-dynamics and grid
// modules. Everything here is in dimensionless units: positions in 1/a,
// energies in D, momenta in sqrt(m D). MorseParams + scale_params is the only
// route for unit-carrying input.

namespace morsegpe {

// Exponentials whose argument would overflow saturate to this value; the
// classifiers treat it as an impenetrable wall.
inline constexpr double kSaturated = 1e300;

// Default initial packet width used throughout the packet studies.
inline constexpr double kDefaultWidth = 0.4;

// exp(arg), saturating at kSaturated instead of overflowing.
double saturating_exp(double arg) noexcept;

struct MorseParams {
  double depth = 1.0;        // D
  double inv_length = 1.0;   // a
  double mass = 1.0;         // m
  double hbar = 1.0;

  // K = sqrt(2 m D) / (hbar a). Throws on non-positive fields.
  double depth_parameter() const;
  void validate() const;
};

double gamma_to_lambda(double gamma, double K);
double lambda_to_gamma(double lambda, double K);

// Dimensionless parameter set. The two couplings are stored together and
// kept consistent: lambda = sqrt(2 pi) * gamma * K^2 / 2.
class ScaledParams {
 public:
  static ScaledParams from_gamma(double K, double gamma,
                                 double delta0 = kDefaultWidth,
                                 double p0 = 0.0);
  static ScaledParams from_lambda(double K, double lambda,
                                  double delta0 = kDefaultWidth,
                                  double p0 = 0.0);

  double K() const noexcept { return K_; }
  double gamma() const noexcept { return gamma_; }
  double lambda() const noexcept { return lambda_; }
  double delta0() const noexcept { return delta0_; }
  double p0() const noexcept { return p0_; }

  ScaledParams with_p0(double p0) const;
  ScaledParams with_delta0(double delta0) const;

 private:
  ScaledParams(double K, double gamma, double lambda, double delta0, double p0);

  double K_;
  double gamma_;
  double lambda_;
  double delta0_;
  double p0_;
};

// Maps a physical coupling g, initial width and initial momentum (all in the
// units of `phys`) to the dimensionless set.
ScaledParams scale_params(const MorseParams& phys, double g,
                          double delta0_phys, double p0_phys);

// e^{-2x} - 2 e^{-x}; minimum -1 at x = 0, saturates on the left wall.
double morse_potential(double x) noexcept;
// dV/dx.
double morse_force(double x) noexcept;

// <e^{-k x}> for the Gaussian packet |psi|^2 = exp(-(x-x0)^2/delta^2)/(sqrt(pi) delta),
// i.e. exp(-k x0 + k^2 delta^2 / 4). k must be 1 or 2.
double gaussian_exp_moment(double x0, double delta, int k);

// Integral of |psi|^4 for the same packet: 1 / (sqrt(2 pi) delta).
double quartic_norm(double delta);

// Mean energy (units of D) of the packet released at x0 = 0:
//   1/(2 K^2 delta0) + p0^2/2 + [e^{delta0^2} - 2 e^{delta0^2/4}] + gamma/delta0
// The spread term carries the first power of delta0, not delta0^2; the
// reference threshold energies are only reproduced in this form.
double initial_energy(const ScaledParams& sp);

}  // namespace morsegpe
