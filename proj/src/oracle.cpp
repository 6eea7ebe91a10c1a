#include "morsegpe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "morsegpe/core_model.hpp"
#include "morsegpe/error.hpp"

namespace morsegpe {

using cplx = std::complex<double>;

namespace {

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// Grid points at each end inspected for leakage; the periodic transform
// wraps anything reaching x_max around to x_min.
constexpr std::size_t kEdgeWidth = 16;

Moments moments_with(const GridWavefunction& wf, const detail::Fft& fft,
                     std::span<const double> k) {
  const GridConfig& g = wf.grid();
  const double dx = g.dx();
  const auto psi = wf.psi();
  Moments m;
  double sx = 0.0, sx2 = 0.0, s4 = 0.0, e1 = 0.0, e2 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = g.x(i);
    const double rho = std::norm(psi[i]);
    s2 += rho;
    sx += x * rho;
    sx2 += x * x * rho;
    s4 += rho * rho;
    const double y = std::exp(-x);
    e1 += y * rho;
    e2 += y * y * rho;
  }
  m.norm = s2 * dx;
  m.mean_x = sx / s2;
  m.mean_x2 = sx2 / s2;
  m.quartic = s4 * dx / (m.norm * m.norm);
  m.mean_force = 2.0 * (e2 - e1) / s2;
  m.width = std::sqrt(std::max(0.0, 2.0 * (m.mean_x2 - m.mean_x * m.mean_x)));

  std::vector<cplx> spectrum(psi.begin(), psi.end());
  fft.forward(spectrum);
  double pk = 0.0, pk2 = 0.0, pn = 0.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const double a = std::norm(spectrum[j]);
    pn += a;
    pk += k[j] * a;
    pk2 += k[j] * k[j] * a;
  }
  const double hbar = wf.hbar_eff();
  m.mean_p = hbar * pk / pn;
  m.mean_p2 = hbar * hbar * pk2 / pn;
  return m;
}

double edge_amplitude(std::span<const cplx> psi) {
  double amp = 0.0;
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < kEdgeWidth && i < n; ++i) {
    amp = std::max(amp, std::abs(psi[i]));
    amp = std::max(amp, std::abs(psi[n - 1 - i]));
  }
  return amp;
}

double fraction_beyond(const GridWavefunction& wf, double x_esc) {
  const GridConfig& g = wf.grid();
  const auto psi = wf.psi();
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (g.x(i) > x_esc) s += std::norm(psi[i]);
  }
  return s * g.dx();
}

}  // namespace

double hbar_eff(HbarConvention convention, double K) {
  require(std::isfinite(K) && K > 0.0, "K must be > 0");
  return convention == HbarConvention::InverseK ? 1.0 / K : std::sqrt(2.0) / K;
}

const char* to_string(HbarConvention convention) {
  return convention == HbarConvention::InverseK ? "inverse-K" : "sqrt2-over-K";
}

HbarConvention parse_hbar_convention(const std::string& name) {
  if (name == "inverse-K" || name == "1/K") return HbarConvention::InverseK;
  if (name == "sqrt2-over-K" || name == "sqrt2/K") return HbarConvention::Sqrt2OverK;
  fail(ErrorKind::InvalidArgument, "unknown hbar convention '" + name + "'");
}

double mean_field_coupling(double gamma) {
  return 2.0 * std::sqrt(2.0 * std::numbers::pi) * gamma;
}

void GridConfig::validate() const {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
          "grid: x_max must exceed x_min");
  require(power_of_two(n), "grid: n must be a power of two");
}

GridWavefunction::GridWavefunction(const GridConfig& grid, double hbar_eff,
                                   std::vector<cplx> psi)
    : grid_(grid), hbar_eff_(hbar_eff), psi_(std::move(psi)) {
  grid_.validate();
  require(psi_.size() == grid_.n, "grid: amplitude count does not match n");
  require(std::isfinite(hbar_eff_) && hbar_eff_ > 0.0, "hbar_eff must be > 0");
}

double GridWavefunction::norm() const {
  double s = 0.0;
  for (const cplx& z : psi_) s += std::norm(z);
  return s * grid_.dx();
}

void GridWavefunction::normalize() {
  const double nrm = norm();
  require(nrm > 0.0 && std::isfinite(nrm), "cannot normalize a null state");
  const double scale = 1.0 / std::sqrt(nrm);
  for (cplx& z : psi_) z *= scale;
}

std::vector<double> wavenumbers(const GridConfig& grid) {
  grid.validate();
  const std::size_t n = grid.n;
  const double dk = 2.0 * std::numbers::pi / (grid.x_max - grid.x_min);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long jj = j < n / 2 ? static_cast<long>(j)
                              : static_cast<long>(j) - static_cast<long>(n);
    k[j] = dk * static_cast<double>(jj);
  }
  return k;
}

GridWavefunction init_gaussian(double x0, double p0, double delta0,
                               const GridConfig& grid, double hbar) {
  grid.validate();
  require(std::isfinite(delta0) && delta0 > 0.0, "init_gaussian: delta0 must be > 0");
  require(std::isfinite(x0) && std::isfinite(p0), "init_gaussian: non-finite input");
  require(hbar > 0.0, "init_gaussian: hbar_eff must be > 0");
  const double amp = std::pow(std::numbers::pi, -0.25) / std::sqrt(delta0);
  auto envelope = [&](double x) {
    const double u = (x - x0) / delta0;
    return amp * std::exp(-0.5 * u * u);
  };
  const double edge = std::max(envelope(grid.x_min), envelope(grid.x_max));
  if (edge > 1e-12) {
    std::ostringstream os;
    os << "init_gaussian: boundary amplitude " << edge << " exceeds 1e-12";
    fail(ErrorKind::GridTooNarrow, os.str());
  }
  std::vector<cplx> psi(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    psi[i] = envelope(x) * std::polar(1.0, p0 * x / hbar);
  }
  return GridWavefunction(grid, hbar, std::move(psi));
}

Moments moments(const GridWavefunction& wf) {
  const detail::Fft fft(wf.size());
  const std::vector<double> k = wavenumbers(wf.grid());
  return moments_with(wf, fft, k);
}

Evolution split_step_evolve(GridWavefunction wf, double K, double gamma,
                            const EvolveOptions& opts, const Observer& observer) {
  require(std::isfinite(K) && K > 0.0, "K must be > 0");
  require(std::isfinite(gamma), "gamma must be finite");
  require(opts.dt > 0.0 && opts.t_max > 0.0, "dt and t_max must be > 0");
  require(opts.sample_every >= 1, "sample_every must be >= 1");

  const GridConfig grid = wf.grid();
  const std::size_t n = grid.n;
  const double hbar = wf.hbar_eff();
  const double g = mean_field_coupling(gamma);
  const double dt = opts.dt;
  const detail::Fft fft(n);
  const std::vector<double> k = wavenumbers(grid);

  std::vector<cplx> kin_half(n), kin_full(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 0.5 * hbar * k[j] * k[j];  // kinetic energy / hbar
    kin_half[j] = std::polar(1.0, -w * 0.5 * dt);
    kin_full[j] = std::polar(1.0, -w * dt);
  }
  std::vector<double> potential(n, 0.0);
  if (!opts.free_particle) {
    for (std::size_t i = 0; i < n; ++i) potential[i] = morse_potential(grid.x(i));
  }

  Evolution out{{}, wf, hbar, g, 0, 0.0, false, 0.0};
  const double norm0 = wf.norm();
  auto record = [&](double t) {
    MomentSample s;
    s.t = t;
    s.m = moments_with(wf, fft, k);
    s.force = opts.free_particle ? 0.0 : s.m.mean_force;
    s.escaped_fraction = fraction_beyond(wf, opts.x_esc);
    const double drift = std::abs(s.m.norm - norm0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
    if (drift > opts.norm_tol) {
      std::ostringstream os;
      os << "norm drifted by " << drift << " at t = " << t;
      fail(ErrorKind::NormDrift, os.str());
    }
    out.samples.push_back(s);
    if (observer) observer(t, wf);
  };
  record(0.0);

  const long n_steps = static_cast<long>(std::llround(opts.t_max / dt));
  auto psi = wf.psi();
  bool pending_half = false;  // trailing half kinetic step not yet applied
  for (long step = 1; step <= n_steps; ++step) {
    fft.forward(psi);
    const auto& kin = pending_half ? kin_full : kin_half;
    for (std::size_t j = 0; j < n; ++j) psi[j] *= kin[j];
    fft.inverse(psi);
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = -(potential[i] + g * std::norm(psi[i])) * dt / hbar;
      psi[i] *= std::polar(1.0, phase);
    }
    pending_half = true;
    ++out.steps;
    const double t = static_cast<double>(step) * dt;

    const bool leaking = edge_amplitude(psi) > opts.leak_tol;
    if (leaking || step % opts.sample_every == 0 || step == n_steps) {
      fft.forward(psi);
      for (std::size_t j = 0; j < n; ++j) psi[j] *= kin_half[j];
      fft.inverse(psi);
      pending_half = false;
      if (leaking) {
        if (!opts.stop_on_leak) {
          std::ostringstream os;
          os << "wavefunction reached the box boundary at t = " << t;
          fail(ErrorKind::BoundaryLeak, os.str());
        }
        out.leaked = true;
        out.leak_time = t;
        record(t);
        break;
      }
      record(t);
    }
  }
  out.final_state = std::move(wf);
  return out;
}

EhrenfestResiduals ehrenfest_residuals(std::span<const MomentSample> series) {
  require(series.size() >= 3, "ehrenfest_residuals: need at least three samples");
  const double h = series[1].t - series[0].t;
  require(h > 0.0, "ehrenfest_residuals: times must increase");
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double hi = series[i].t - series[i - 1].t;
    require(std::abs(hi - h) <= 1e-9 * std::max(1.0, series[i].t),
            "ehrenfest_residuals: series must be uniformly sampled");
  }
  EhrenfestResiduals r;
  double sum_x = 0.0, sum_p = 0.0;
  const std::size_t count = series.size() - 2;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const double dxdt = (series[i + 1].m.mean_x - series[i - 1].m.mean_x) / (2.0 * h);
    const double dpdt = (series[i + 1].m.mean_p - series[i - 1].m.mean_p) / (2.0 * h);
    const double rx = std::abs(dxdt - series[i].m.mean_p);
    const double rp = std::abs(dpdt - series[i].force);
    r.max_position = std::max(r.max_position, rx);
    r.max_momentum = std::max(r.max_momentum, rp);
    sum_x += rx * rx;
    sum_p += rp * rp;
  }
  r.rms_position = std::sqrt(sum_x / static_cast<double>(count));
  r.rms_momentum = std::sqrt(sum_p / static_cast<double>(count));
  return r;
}

namespace {

struct EnergyParts {
  double kinetic = 0.0;
  double potential = 0.0;
  double interaction = 0.0;  // Int |psi|^4 dx (without lambda)

  double energy(double lambda) const { return kinetic + potential + lambda * interaction; }
  // Lagrange multiplier of the normalized stationary problem; a localized
  // (normalizable) state needs it negative.
  double chemical_potential(double lambda) const {
    return kinetic + potential + 2.0 * lambda * interaction;
  }
};

EnergyParts energy_parts(std::span<const cplx> psi, const GridConfig& grid,
                         std::span<const double> k, std::span<const double> k2v,
                         const detail::Fft& fft) {
  const double dx = grid.dx();
  std::vector<cplx> spectrum(psi.begin(), psi.end());
  fft.forward(spectrum);
  EnergyParts e;
  for (std::size_t j = 0; j < spectrum.size(); ++j) e.kinetic += k[j] * k[j] * std::norm(spectrum[j]);
  e.kinetic *= dx / static_cast<double>(spectrum.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    e.potential += k2v[i] * rho;
    e.interaction += rho * rho;
  }
  e.potential *= dx;
  e.interaction *= dx;
  return e;
}

std::vector<double> scaled_potential(const GridConfig& grid, double K) {
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = K * K * morse_potential(grid.x(i));
  return v;
}

double mean_position(std::span<const cplx> psi, const GridConfig& grid) {
  double s = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    s += rho;
    sx += grid.x(i) * rho;
  }
  return sx / s;
}

}  // namespace

double bound_state_energy(const GridWavefunction& wf, double K, double lambda) {
  const detail::Fft fft(wf.size());
  const std::vector<double> k = wavenumbers(wf.grid());
  const std::vector<double> k2v = scaled_potential(wf.grid(), K);
  return energy_parts(wf.psi(), wf.grid(), k, k2v, fft).energy(lambda);
}

GroundStateResult imaginary_time_ground_state(double K, double lambda,
                                              const GroundStateOptions& opts) {
  require(std::isfinite(K) && K > 0.5, "K must be > 1/2");
  require(std::isfinite(lambda), "lambda must be finite");
  require(!opts.dtau_schedule.empty(), "dtau schedule must not be empty");
  require(opts.check_every >= 1 && opts.tol > 0.0 && opts.max_tau > 0.0,
          "invalid ground-state options");
  const GridConfig& grid = opts.grid;
  grid.validate();
  const std::size_t n = grid.n;
  const detail::Fft fft(n);
  const std::vector<double> k = wavenumbers(grid);
  const std::vector<double> k2v = scaled_potential(grid, K);

  // Neutral start: a plain Gaussian at the potential minimum.
  GridWavefunction wf = init_gaussian(0.0, 0.0, 0.5, grid, hbar_eff(HbarConvention::Sqrt2OverK, K));
  auto psi = wf.psi();

  GroundStateResult out{0.0, 0.0, 0.0, 0, wf};
  EnergyParts parts = energy_parts(psi, grid, k, k2v, fft);
  double energy = parts.energy(lambda);
  std::vector<double> kin_half(n);
  std::vector<double> pot(n);
  for (double dtau : opts.dtau_schedule) {
    require(dtau > 0.0, "dtau must be > 0");
    for (std::size_t j = 0; j < n; ++j) kin_half[j] = std::exp(-k[j] * k[j] * 0.5 * dtau);
    for (std::size_t i = 0; i < n; ++i) pot[i] = std::exp(-k2v[i] * dtau);
    double tau_stage = 0.0;
    bool converged = false;
    while (!converged) {
      for (int s = 0; s < opts.check_every; ++s) {
        fft.forward(psi);
        for (std::size_t j = 0; j < n; ++j) psi[j] *= kin_half[j];
        fft.inverse(psi);
        for (std::size_t i = 0; i < n; ++i) {
          psi[i] *= pot[i] * std::exp(-2.0 * lambda * std::norm(psi[i]) * dtau);
        }
        fft.forward(psi);
        for (std::size_t j = 0; j < n; ++j) psi[j] *= kin_half[j];
        fft.inverse(psi);
        wf.normalize();
        ++out.steps;
      }
      tau_stage += opts.check_every * dtau;
      out.tau += opts.check_every * dtau;
      parts = energy_parts(psi, grid, k, k2v, fft);
      const double next = parts.energy(lambda);
      const double rate = std::abs(next - energy) / (opts.check_every * dtau);
      energy = next;
      const double xbar = mean_position(psi, grid);
      if (xbar > opts.drift_x) {
        std::ostringstream os;
        os << "state drifted to <x> = " << xbar << " (no bound state at lambda = "
           << lambda << ")";
        fail(ErrorKind::UnboundDrift, os.str());
      }
      // Near-stationary with a non-negative chemical potential: the norm is
      // draining out of the well, however slowly.
      if (rate < opts.stationary_rate && parts.chemical_potential(lambda) >= 0.0) {
        std::ostringstream os;
        os << "relaxed state has non-negative chemical potential at lambda = "
           << lambda << " (no bound state)";
        fail(ErrorKind::UnboundDrift, os.str());
      }
      converged = rate < opts.tol;
      if (!converged && tau_stage > opts.max_tau) {
        if (energy >= 0.0) {
          fail(ErrorKind::UnboundDrift,
               "energy stayed non-negative while relaxing (no bound state)");
        }
        fail(ErrorKind::NonConvergence, "imaginary-time relaxation did not converge");
      }
    }
  }
  if (energy >= 0.0) {
    fail(ErrorKind::UnboundDrift, "relaxed energy is not negative (no bound state)");
  }
  out.energy = energy;
  out.mean_x = mean_position(psi, grid);
  out.state = std::move(wf);
  return out;
}

ComparisonReport compare_with_variational(double K, double gamma, double delta0,
                                          double p0, double t_max,
                                          const CompareOptions& opts) {
  require(t_max > 0.0, "t_max must be > 0");
  require(opts.sample_interval > 0.0, "sample_interval must be > 0");
  ComparisonReport rep;
  rep.K = K;
  rep.gamma = gamma;
  rep.delta0 = delta0;
  rep.p0 = p0;
  rep.t_max = t_max;
  rep.convention = to_string(opts.convention);
  rep.hbar_eff = hbar_eff(opts.convention, K);

  IntegratorSettings ode = opts.ode;
  ode.mode = StepMode::FixedRK4;
  ode.sample_interval = opts.sample_interval;
  ode.x_stop = std::numeric_limits<double>::infinity();
  const Trajectory traj =
      integrate(PacketState::released(p0, delta0), K, gamma, t_max, ode);
  const Verdict ode_verdict = classify(traj, opts.x_esc, t_max);
  rep.ode_verdict = describe(ode_verdict);
  rep.ode_escaped = is_escaped(ode_verdict);

  EvolveOptions ev;
  ev.dt = opts.grid_dt;
  ev.t_max = t_max;
  ev.sample_every = std::max(1L, std::lround(opts.sample_interval / opts.grid_dt));
  ev.stop_on_leak = true;
  ev.leak_tol = opts.leak_tol;
  ev.x_esc = opts.x_esc;
  const Evolution evo = split_step_evolve(
      init_gaussian(0.0, p0, delta0, opts.grid, rep.hbar_eff), K, gamma, ev);
  rep.grid_leaked = evo.leaked;

  // Both series are sampled on the same uniform clock; leak samples are
  // off-clock and skipped.
  const std::size_t count = std::min(traj.states.size(), evo.samples.size());
  for (std::size_t i = 0; i < count; ++i) {
    const MomentSample& s = evo.samples[i];
    if (std::abs(s.t - traj.times[i]) > 1e-9 * std::max(1.0, s.t)) break;
    const double dc = std::abs(traj.states[i].x0 - s.m.mean_x);
    const double dw = std::abs(traj.states[i].width() - s.m.width);
    rep.max_center_deviation = std::max(rep.max_center_deviation, dc);
    rep.max_width_deviation = std::max(rep.max_width_deviation, dw);
    if (s.t <= opts.short_time + 1e-12) {
      rep.short_time_center_deviation = std::max(rep.short_time_center_deviation, dc);
    }
    rep.compared_until = s.t;
  }

  double t_escape = -1.0;
  for (const MomentSample& s : evo.samples) {
    if (s.escaped_fraction > 0.5) {
      t_escape = s.t;
      break;
    }
  }
  std::ostringstream gv;
  if (t_escape >= 0.0) {
    rep.grid_escaped = true;
    gv << "Escaped{t_escape=" << t_escape << "}";
  } else if (evo.leaked) {
    gv << "Indeterminate{boundary reached at t = " << evo.leak_time << "}";
  } else {
    gv << "Trapped{escaped_fraction=" << evo.samples.back().escaped_fraction << "}";
  }
  rep.grid_verdict = gv.str();
  rep.verdicts_agree = (rep.grid_escaped == rep.ode_escaped) &&
                       (rep.grid_escaped || !evo.leaked) &&
                       !std::holds_alternative<Indeterminate>(ode_verdict);
  return rep;
}

}  // namespace morsegpe
