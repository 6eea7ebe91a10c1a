#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "morsegpe/dynamics.hpp"

// Grid solver for the full dimensionless GPE
//     i hbar d_t psi = [-(hbar^2/2) d_x^2 + V(x) + g |psi|^2] psi,
// used to cross-check the Gaussian packet equations (real time) and the
// variational energies (imaginary time).

namespace morsegpe {

// hbar_eff = 1/K reproduces the spreading coefficient of the packet
// equations; sqrt(2)/K is what the position/momentum rescaling implies.
enum class HbarConvention { InverseK, Sqrt2OverK };

double hbar_eff(HbarConvention convention, double K);
const char* to_string(HbarConvention convention);
HbarConvention parse_hbar_convention(const std::string& name);

// Coupling g in the grid equation whose Gaussian mean-field energy
// (g/2) * Int |psi|^4 equals the gamma/Delta term of the packet energy.
double mean_field_coupling(double gamma);

struct GridConfig {
  double x_min = -6.0;
  double x_max = 90.0;
  std::size_t n = 4096;  // power of two

  double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  void validate() const;
};

class GridWavefunction {
 public:
  GridWavefunction(const GridConfig& grid, double hbar_eff,
                   std::vector<std::complex<double>> psi);

  const GridConfig& grid() const noexcept { return grid_; }
  double hbar_eff() const noexcept { return hbar_eff_; }
  std::size_t size() const noexcept { return psi_.size(); }
  std::span<const std::complex<double>> psi() const noexcept { return psi_; }
  std::span<std::complex<double>> psi() noexcept { return psi_; }

  // Int |psi|^2 dx (rectangle rule, exact for the periodic grid).
  double norm() const;
  void normalize();

 private:
  GridConfig grid_;
  double hbar_eff_;
  std::vector<std::complex<double>> psi_;
};

// Wavenumbers in FFT order for the grid.
std::vector<double> wavenumbers(const GridConfig& grid);

// Normalized packet pi^{-1/4} delta^{-1/2} exp(-(x-x0)^2/(2 delta^2)) e^{i p0 x / hbar}.
// Throws GridTooNarrow when the amplitude at either boundary exceeds 1e-12.
GridWavefunction init_gaussian(double x0, double p0, double delta0,
                               const GridConfig& grid, double hbar_eff);

struct Moments {
  double norm = 0.0;
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double mean_p = 0.0;
  double mean_p2 = 0.0;
  // Packet width in the Gaussian-ansatz convention: sqrt(2 * variance), so a
  // fresh init_gaussian(x0, p0, delta) reports delta.
  double width = 0.0;
  double quartic = 0.0;     // Int |psi|^4 dx
  double mean_force = 0.0;  // -<dV/dx> = 2(<e^{-2x}> - <e^{-x}>)
};

Moments moments(const GridWavefunction& wf);

struct EvolveOptions {
  double dt = 5e-4;
  double t_max = 10.0;
  int sample_every = 1;        // steps between recorded samples
  bool free_particle = false;  // drop the Morse potential
  double norm_tol = 1e-8;
  double leak_tol = 1e-6;
  bool stop_on_leak = false;   // otherwise BoundaryLeak is thrown
  double x_esc = kEscapeRadius;
};

struct MomentSample {
  double t = 0.0;
  Moments m;
  double force = 0.0;             // force actually applied (0 in free mode)
  double escaped_fraction = 0.0;  // Int_{x > x_esc} |psi|^2
};

struct Evolution {
  std::vector<MomentSample> samples;
  GridWavefunction final_state;
  double hbar_eff = 0.0;
  double coupling = 0.0;
  long steps = 0;
  double max_norm_drift = 0.0;
  bool leaked = false;
  double leak_time = 0.0;
};

using Observer = std::function<void(double t, const GridWavefunction&)>;

// Second-order Strang splitting: half kinetic (spectral), full potential plus
// nonlinear phase (pointwise), half kinetic.
Evolution split_step_evolve(GridWavefunction wf, double K, double gamma,
                            const EvolveOptions& opts, const Observer& observer = {});

struct EhrenfestResiduals {
  double max_position = 0.0;  // |d<x>/dt - <p>|
  double rms_position = 0.0;
  double max_momentum = 0.0;  // |d<p>/dt - F|
  double rms_momentum = 0.0;
};

// Central differences of a uniformly sampled moment series against the
// Ehrenfest right-hand sides.
EhrenfestResiduals ehrenfest_residuals(std::span<const MomentSample> series);

// Energy functional in units of hbar^2 a^2 / 2m on the grid:
//     Int |psi'|^2 + K^2 V |psi|^2 + lambda |psi|^4.
double bound_state_energy(const GridWavefunction& wf, double K, double lambda);

struct GroundStateOptions {
  GridConfig grid{};
  std::vector<double> dtau_schedule{1e-2, 1e-3};  // coarse then fine
  double tol = 1e-10;        // |dE/dtau| for convergence
  int check_every = 50;      // steps between energy checks
  double max_tau = 400.0;    // per stage
  double drift_x = 10.0;     // <x> beyond this flags an unbound state
  // Once |dE/dtau| drops below this, a non-negative chemical potential also
  // flags an unbound state.
  double stationary_rate = 1e-4;
};

struct GroundStateResult {
  double energy = 0.0;  // units of hbar^2 a^2 / 2m
  double mean_x = 0.0;
  double tau = 0.0;
  long steps = 0;
  GridWavefunction state;
};

// Imaginary-time relaxation with renormalization after every step. Throws
// UnboundDrift when the state runs off to the right (lambda beyond the true
// critical coupling) and NonConvergence when max_tau is exhausted.
GroundStateResult imaginary_time_ground_state(double K, double lambda,
                                              const GroundStateOptions& opts = {});

struct CompareOptions {
  GridConfig grid{};
  HbarConvention convention = HbarConvention::InverseK;
  double grid_dt = 5e-4;
  double sample_interval = 0.05;
  double short_time = 1.0;
  double x_esc = kEscapeRadius;
  double leak_tol = 1e-6;
  IntegratorSettings ode{};
};

struct ComparisonReport {
  double K = 0.0, gamma = 0.0, delta0 = 0.0, p0 = 0.0, t_max = 0.0;
  std::string convention;
  double hbar_eff = 0.0;
  double max_center_deviation = 0.0;
  double max_width_deviation = 0.0;
  double short_time_center_deviation = 0.0;
  double compared_until = 0.0;
  std::string ode_verdict;
  std::string grid_verdict;
  bool ode_escaped = false;
  bool grid_escaped = false;
  bool verdicts_agree = false;
  bool grid_leaked = false;
};

// Runs the packet equations and the grid solver from the same initial packet
// and reports how far the centre and width trajectories drift apart.
ComparisonReport compare_with_variational(double K, double gamma, double delta0,
                                          double p0, double t_max,
                                          const CompareOptions& opts = {});

}  // namespace morsegpe
