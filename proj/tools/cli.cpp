#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "morsegpe/core_model.hpp"
#include "morsegpe/dynamics.hpp"
#include "morsegpe/error.hpp"
#include "morsegpe/io.hpp"
#include "morsegpe/oracle.hpp"
#include "morsegpe/variational.hpp"

namespace morsegpe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::GridTooNarrow:
      return kParameterError;
    case ErrorKind::NoBoundState:
    case ErrorKind::UnboundDrift:
      return kNoBoundState;
    case ErrorKind::NoThreshold:
      return kNoThreshold;
    case ErrorKind::WidthCollapse:
    case ErrorKind::StepUnderflow:
    case ErrorKind::Indeterminate:
    case ErrorKind::NormDrift:
    case ErrorKind::BoundaryLeak:
      return kIntegratorFailure;
    case ErrorKind::NonConvergence:
    case ErrorKind::BracketFailure:
      return kSolverFailure;
    case ErrorKind::Io:
      return kIoError;
  }
  return kFailure;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Shared state for one invocation.
struct Session {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
  std::string out_dir;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path path(const std::string& name) const { return fs::path(out_dir) / name; }

  void write(io::RunManifest& manifest, const std::string& name,
             const std::string& contents) const {
    io::write_atomic(path(name), contents);
    manifest.outputs.push_back(name);
  }

  void finish(io::RunManifest& manifest) const {
    manifest.argv = argv;
    manifest.wall_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    const std::string name = manifest.command + ".manifest.json";
    io::write_atomic(path(name), manifest.to_json().dump(2) + "\n");
    out << "wrote " << path(name).string() << "\n";
  }
};

struct CouplingArgs {
  std::optional<double> lambda;
  std::optional<double> gamma;

  double lambda_for(double K) const {
    if (lambda) return *lambda;
    if (gamma) return gamma_to_lambda(*gamma, K);
    return 0.0;
  }
};

void add_coupling(CLI::App* cmd, CouplingArgs& c) {
  auto* l = cmd->add_option("--lambda", c.lambda, "Bound-state coupling lambda");
  auto* g = cmd->add_option("--gamma", c.gamma, "Dynamics coupling gamma");
  l->excludes(g);
}

// ground-state -------------------------------------------------------------

struct GroundStateArgs {
  double K = 2.0;
  CouplingArgs coupling;
  bool table1 = false;
  double tol = 1e-10;
};

int cmd_ground_state(const Session& s, const GroundStateArgs& a) {
  MinimizeOptions opts;
  opts.gradient_tol = a.tol;
  io::RunManifest m;
  m.command = "ground-state";
  m.settings = {{"gradient_tol", a.tol}};
  if (a.table1) {
    // Preset: K = 2..6 at lambda = 1 unless a coupling is given.
    const double lambda = (a.coupling.lambda || a.coupling.gamma)
                              ? a.coupling.lambda_for(2.0)
                              : 1.0;
    m.parameters = {{"table1", true}, {"lambda", lambda}};
    io::CsvWriter csv({"K", "E_asymptotic", "E_quadratic", "E_full", "alpha_star"});
    s.out << "K,E_asymptotic,E_quadratic,E_full,alpha_star\n";
    for (int K = 2; K <= 6; ++K) {
      const BoundStateResult r = minimize_energy(K, lambda, opts);
      const double asym = asymptotic_energy(K, lambda);
      const double row[] = {double(K), asym, r.energy_quadratic, r.energy_full,
                            r.alpha_star};
      csv.add_row(row);
      s.out << K << "," << fixed(asym, 3) << "," << fixed(r.energy_quadratic, 3)
            << "," << fixed(r.energy_full, 3) << "," << fixed(r.alpha_star, 4)
            << "\n";
    }
    s.write(m, "table1.csv", csv.str());
  } else {
    const double lambda = a.coupling.lambda_for(a.K);
    m.parameters = {{"K", a.K}, {"lambda", lambda},
                    {"gamma", lambda_to_gamma(lambda, a.K)}};
    const BoundStateResult r = minimize_energy(a.K, lambda, opts);
    const double asym = asymptotic_energy(a.K, lambda);
    s.out << "alpha*       = " << fixed(r.alpha_star, 10) << "\n"
          << "E_full       = " << fixed(r.energy_full, 10) << "\n"
          << "E_quadratic  = " << fixed(r.energy_quadratic, 10) << "\n"
          << "E_asymptotic = " << fixed(asym, 10) << "\n"
          << "(energies in units of hbar^2 a^2 / 2m)\n";
    io::CsvWriter csv({"K", "lambda", "alpha_star", "E_full", "E_quadratic",
                       "E_asymptotic"});
    const double row[] = {a.K, lambda, r.alpha_star, r.energy_full,
                          r.energy_quadratic, asym};
    csv.add_row(row);
    s.write(m, "ground_state.csv", csv.str());
    m.results = {{"alpha_star", r.alpha_star}, {"E_full", r.energy_full},
                 {"E_quadratic", r.energy_quadratic}, {"E_asymptotic", asym},
                 {"iterations", r.iterations}};
  }
  s.finish(m);
  return kOk;
}

// critical -----------------------------------------------------------------

struct CriticalArgs {
  double K = 2.0;
  std::vector<double> sweep;
  double tol = 1e-6;
};

int cmd_critical(const Session& s, const CriticalArgs& a) {
  CriticalOptions opts;
  opts.tol = a.tol;
  io::RunManifest m;
  m.command = "critical";
  m.settings = {{"tol", a.tol}};
  io::CsvWriter csv({"K", "lambda_c", "gamma_c", "lambda_c_asymptotic",
                     "gamma_c_asymptotic"});
  auto emit = [&](double K, double lambda_c) {
    const double asym = critical_lambda_asymptotic(K);
    const double row[] = {K, lambda_c, lambda_to_gamma(lambda_c, K), asym,
                          lambda_to_gamma(asym, K)};
    csv.add_row(row);
    s.out << "K = " << K << ": lambda_c = " << fixed(lambda_c)
          << ", gamma_c = " << fixed(lambda_to_gamma(lambda_c, K))
          << ", asymptotic lambda_c = " << fixed(asym)
          << " (gamma = " << fixed(lambda_to_gamma(asym, K)) << ")\n";
  };
  if (!a.sweep.empty()) {
    m.parameters = {{"sweep", a.sweep}};
    const ScalingResult r = scaling_exponent(a.sweep, opts);
    for (std::size_t i = 0; i < r.K.size(); ++i) emit(r.K[i], r.lambda_c[i]);
    s.out << "fitted exponent d log(lambda_c) / d log(K) = " << fixed(r.fit.slope, 4)
          << "\n";
    m.results = {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}};
  } else {
    m.parameters = {{"K", a.K}};
    const CriticalResult r = critical_lambda(a.K, opts);
    emit(a.K, r.lambda_c);
    m.results = {{"lambda_c", r.lambda_c}, {"gamma_c", r.gamma_c},
                 {"evaluations", r.evaluations}};
  }
  s.write(m, "critical.csv", csv.str());
  s.finish(m);
  return kOk;
}

// dynamics -----------------------------------------------------------------

struct IntegratorArgs {
  double dt = 1e-3;
  bool adaptive = false;
  double sample_interval = 1e-2;

  IntegratorSettings settings() const {
    IntegratorSettings st;
    st.dt = dt;
    st.mode = adaptive ? StepMode::AdaptiveDormandPrince : StepMode::FixedRK4;
    st.sample_interval = sample_interval;
    return st;
  }
};

void add_integrator(CLI::App* cmd, IntegratorArgs& a) {
  cmd->add_option("--dt", a.dt, "Fixed step (or first adaptive step)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--adaptive", a.adaptive, "Use the adaptive Dormand-Prince mode");
  cmd->add_option("--sample-interval", a.sample_interval, "Output spacing in t")
      ->check(CLI::PositiveNumber);
}

struct DynamicsArgs {
  double K = 2.0;
  double gamma = 0.0;
  double delta0 = kDefaultWidth;
  double p0 = 0.0;
  double t_max = kEscapeHorizon;
  double x_esc = kEscapeRadius;
  IntegratorArgs integrator;
};

int cmd_dynamics(const Session& s, const DynamicsArgs& a) {
  IntegratorSettings st = a.integrator.settings();
  st.x_stop = a.x_esc;
  const ScaledParams sp = ScaledParams::from_gamma(a.K, a.gamma, a.delta0, a.p0);
  const Trajectory traj =
      integrate(PacketState::released(a.p0, a.delta0), a.K, a.gamma, a.t_max, st);
  const Verdict verdict = classify(traj, a.x_esc, a.t_max);

  io::RunManifest m;
  m.command = "dynamics";
  m.parameters = {{"K", a.K}, {"gamma", a.gamma}, {"lambda", sp.lambda()},
                  {"delta0", a.delta0}, {"p0", a.p0}, {"t_max", a.t_max},
                  {"x_esc", a.x_esc}};
  m.settings = io::to_json(st);

  json v;
  v["classification"] = describe(verdict);
  v["escaped"] = is_escaped(verdict);
  if (const auto* t = std::get_if<Trapped>(&verdict)) v["reflections"] = t->reflections;
  if (const auto* e = std::get_if<Escaped>(&verdict)) v["t_escape"] = e->t_escape;
  try {
    v["width_behavior"] = describe(width_behavior(traj));
  } catch (const Error& e) {
    v["width_behavior"] = std::string("Indeterminate{") + e.what() + "}";
  }
  v["initial_energy"] = initial_energy(sp);
  v["energy_drift"] = max_energy_drift(traj);
  if (traj.failure) {
    v["failure"] = {{"kind", to_string(traj.failure->kind)},
                    {"time", traj.failure->time},
                    {"message", traj.failure->message}};
  }
  m.results = v;
  s.write(m, "trajectory.csv", io::trajectory_csv(traj));
  s.write(m, "dynamics.json", v.dump(2) + "\n");
  s.out << "classification: " << v["classification"].get<std::string>() << "\n"
        << "width behavior: " << v["width_behavior"].get<std::string>() << "\n";
  if (traj.failure) {
    s.err << "integrator failure (" << to_string(traj.failure->kind) << ") at t = "
          << traj.failure->time << ": " << traj.failure->message << "\n";
    s.finish(m);
    return kIntegratorFailure;
  }
  s.finish(m);
  return kOk;
}

// threshold ----------------------------------------------------------------

struct ThresholdArgs {
  std::vector<double> K{2.0};
  std::vector<double> gamma{0.5};
  double delta0 = kDefaultWidth;
  bool table2 = false;
  double tol = 1e-3;
  double t_max = kEscapeHorizon;
  double x_esc = kEscapeRadius;
};

int cmd_threshold(const Session& s, const ThresholdArgs& a) {
  std::vector<double> Ks = a.K;
  std::vector<double> gammas = a.gamma;
  if (a.table2) {
    Ks = {2, 3, 4, 5, 6};
    gammas = {0.5, -0.5};
  }
  ThresholdOptions opts;
  opts.tol = a.tol;
  opts.t_max = a.t_max;
  opts.x_esc = a.x_esc;
  const std::vector<ThresholdRow> rows = threshold_energy_table(Ks, gammas, a.delta0, opts);

  io::RunManifest m;
  m.command = "threshold";
  m.parameters = {{"K", Ks}, {"gamma", gammas}, {"delta0", a.delta0},
                  {"table2", a.table2}};
  m.settings = {{"tol", a.tol}, {"t_max", a.t_max}, {"x_esc", a.x_esc},
                {"p_bracket", {opts.p_lo, opts.p_hi}},
                {"integrator", io::to_json(opts.settings)}};
  io::CsvWriter csv({"K", "gamma", "p_th", "E_th", "status"});
  json results = json::array();
  bool any_missing = false;
  s.out << "K,gamma,p_th,E_th/D\n";
  for (const ThresholdRow& r : rows) {
    if (r.result) {
      csv.add_row({io::format_number(r.K), io::format_number(r.gamma),
                   io::format_number(r.result->p_th), io::format_number(r.result->E_th),
                   "ok"});
      s.out << r.K << "," << r.gamma << "," << fixed(r.result->p_th, 4) << ","
            << fixed(r.result->E_th, 4) << "\n";
      json j = io::to_json(*r.result);
      j["K"] = r.K;
      j["gamma"] = r.gamma;
      results.push_back(j);
    } else {
      any_missing = true;
      csv.add_row({io::format_number(r.K), io::format_number(r.gamma), "", "",
                   "NoThreshold"});
      s.out << r.K << "," << r.gamma << ",NoThreshold,\n";
      results.push_back({{"K", r.K}, {"gamma", r.gamma}, {"status", "NoThreshold"},
                         {"note", r.note}});
    }
  }
  m.results = {{"rows", results}};
  s.write(m, "threshold.csv", csv.str());
  s.finish(m);
  return any_missing ? kNoThreshold : kOk;
}

// oracle -------------------------------------------------------------------

struct GridArgs {
  double x_min = -6.0;
  double x_max = 90.0;
  std::size_t n = 4096;
  std::string convention = "inverse-K";

  GridConfig config() const { return {x_min, x_max, n}; }
};

void add_grid(CLI::App* cmd, GridArgs& g, bool with_convention) {
  cmd->add_option("--x-min", g.x_min, "Grid left edge");
  cmd->add_option("--x-max", g.x_max, "Grid right edge");
  cmd->add_option("--n", g.n, "Grid points (power of two)");
  if (with_convention) {
    cmd->add_option("--hbar-convention", g.convention,
                    "Effective hbar: inverse-K (1/K) or sqrt2-over-K (sqrt(2)/K)");
  }
}

json grid_json(const GridConfig& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}};
}

struct EvolveArgs {
  double K = 2.0;
  double gamma = 0.0;
  double delta0 = kDefaultWidth;
  double p0 = 0.0;
  double t_max = 10.0;
  double dt = 5e-4;
  int sample_every = 20;
  bool free_particle = false;
  GridArgs grid;
};

int cmd_oracle_evolve(const Session& s, const EvolveArgs& a) {
  const GridConfig grid = a.grid.config();
  const HbarConvention conv = parse_hbar_convention(a.grid.convention);
  const double hbar = hbar_eff(conv, a.K);
  EvolveOptions ev;
  ev.dt = a.dt;
  ev.t_max = a.t_max;
  ev.sample_every = a.sample_every;
  ev.free_particle = a.free_particle;
  ev.stop_on_leak = true;
  const Evolution evo =
      split_step_evolve(init_gaussian(0.0, a.p0, a.delta0, grid, hbar), a.K, a.gamma, ev);

  io::RunManifest m;
  m.command = "oracle-evolve";
  m.parameters = {{"K", a.K}, {"gamma", a.gamma}, {"delta0", a.delta0},
                  {"p0", a.p0}, {"t_max", a.t_max}, {"free", a.free_particle}};
  m.settings = {{"dt", a.dt}, {"sample_every", a.sample_every},
                {"grid", grid_json(grid)}, {"hbar_convention", to_string(conv)},
                {"hbar_eff", hbar}, {"coupling", evo.coupling}};
  m.results = {{"max_norm_drift", evo.max_norm_drift}, {"steps", evo.steps},
               {"leaked", evo.leaked}, {"leak_time", evo.leak_time}};
  s.write(m, "oracle_moments.csv", io::moment_series_csv(evo.samples));
  s.write(m, "oracle_snapshot.csv", io::snapshot_csv(evo.final_state));
  s.out << "hbar convention: " << to_string(conv) << " (hbar_eff = " << hbar << ")\n"
        << "max norm drift: " << evo.max_norm_drift << "\n";
  if (evo.leaked) s.out << "stopped at t = " << evo.leak_time << " (box boundary)\n";
  s.finish(m);
  return kOk;
}

struct OracleGroundArgs {
  double K = 2.0;
  CouplingArgs coupling;
  GridArgs grid;
};

int cmd_oracle_ground(const Session& s, const OracleGroundArgs& a) {
  GroundStateOptions opts;
  opts.grid = a.grid.config();
  const double lambda = a.coupling.lambda_for(a.K);
  const GroundStateResult r = imaginary_time_ground_state(a.K, lambda, opts);
  io::RunManifest m;
  m.command = "oracle-ground";
  m.parameters = {{"K", a.K}, {"lambda", lambda}};
  m.settings = {{"grid", grid_json(opts.grid)}, {"dtau_schedule", opts.dtau_schedule},
                {"tol", opts.tol}};
  m.results = {{"E0", r.energy}, {"mean_x", r.mean_x}, {"tau", r.tau},
               {"steps", r.steps}};
  try {
    const BoundStateResult v = minimize_energy(a.K, lambda);
    m.results["E_variational"] = v.energy_full;
  } catch (const Error&) {
    m.results["E_variational"] = nullptr;
  }
  s.write(m, "oracle_ground_snapshot.csv", io::snapshot_csv(r.state));
  s.out << "E0 = " << fixed(r.energy, 10) << " (units of hbar^2 a^2 / 2m)\n";
  s.finish(m);
  return kOk;
}

struct CompareArgs {
  double K = 2.0;
  double gamma = 0.5;
  double delta0 = kDefaultWidth;
  double p0 = 0.1;
  double t_max = 20.0;
  double dt = 5e-4;
  double leak_tol = 1e-6;
  // Wider box than evolve: the dispersing tail must stay off the edge.
  GridArgs grid{-6.0, 250.0, 8192};
};

int cmd_oracle_compare(const Session& s, const CompareArgs& a) {
  CompareOptions opts;
  opts.grid = a.grid.config();
  opts.convention = parse_hbar_convention(a.grid.convention);
  opts.grid_dt = a.dt;
  opts.leak_tol = a.leak_tol;
  const ComparisonReport rep =
      compare_with_variational(a.K, a.gamma, a.delta0, a.p0, a.t_max, opts);
  io::RunManifest m;
  m.command = "oracle-compare";
  m.parameters = {{"K", a.K}, {"gamma", a.gamma}, {"delta0", a.delta0},
                  {"p0", a.p0}, {"t_max", a.t_max}};
  m.settings = {{"grid", grid_json(opts.grid)}, {"grid_dt", a.dt},
                {"leak_tol", a.leak_tol},
                {"ode", io::to_json(opts.ode)}};
  m.results = io::to_json(rep);
  s.write(m, "oracle_compare.json", m.results.dump(2) + "\n");
  s.out << "ODE:  " << rep.ode_verdict << "\n"
        << "grid: " << rep.grid_verdict << "\n"
        << "classification agreement = " << (rep.verdicts_agree ? "true" : "false")
        << "\n"
        << "max |x0 - <x>| = " << rep.max_center_deviation << " (t <= "
        << opts.short_time << ": " << rep.short_time_center_deviation << ")\n";
  s.finish(m);
  return kOk;
}

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morse-trap Gross-Pitaevskii toolkit: variational bound states, "
               "critical coupling, Gaussian packet dynamics and a grid oracle"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  app.set_version_flag("--version", MORSEGPE_VERSION);

  Session session{out, err, args, default_out_dir()};
  app.add_option("--out-dir", session.out_dir,
                 std::string("Output directory (default: $") + kOutDirEnv + " or .)");

  GroundStateArgs gs;
  auto* c_gs = app.add_subcommand("ground-state", "Variational bound state");
  c_gs->add_option("--K", gs.K, "Depth parameter K");
  add_coupling(c_gs, gs.coupling);
  c_gs->add_flag("--table1", gs.table1, "K = 2..6 grid (lambda = 1 by default)");
  c_gs->add_option("--tol", gs.tol, "Gradient tolerance")->check(CLI::PositiveNumber);

  CriticalArgs cr;
  auto* c_cr = app.add_subcommand("critical", "Critical coupling");
  c_cr->add_option("--K", cr.K, "Depth parameter K");
  c_cr->add_option("--sweep", cr.sweep, "Comma-separated K values")->delimiter(',');
  c_cr->add_option("--tol", cr.tol, "Bisection tolerance on lambda")
      ->check(CLI::PositiveNumber);

  DynamicsArgs dy;
  auto* c_dy = app.add_subcommand("dynamics", "Integrate one Gaussian packet");
  c_dy->add_option("--K", dy.K, "Depth parameter K");
  c_dy->add_option("--gamma", dy.gamma, "Coupling gamma");
  c_dy->add_option("--delta0", dy.delta0, "Initial width");
  c_dy->add_option("--p0", dy.p0, "Initial momentum");
  c_dy->add_option("--t-max", dy.t_max, "Final time");
  c_dy->add_option("--x-esc", dy.x_esc, "Escape radius");
  add_integrator(c_dy, dy.integrator);

  ThresholdArgs th;
  auto* c_th = app.add_subcommand("threshold", "Escape threshold momentum and energy");
  c_th->add_option("--K", th.K, "Comma-separated K values")->delimiter(',');
  c_th->add_option("--gamma", th.gamma, "Comma-separated gamma values")->delimiter(',');
  c_th->add_option("--delta0", th.delta0, "Initial width");
  c_th->add_flag("--table2", th.table2, "K = 2..6 x gamma = +-0.5 preset");
  c_th->add_option("--tol", th.tol, "Bisection tolerance on p0")
      ->check(CLI::PositiveNumber);
  c_th->add_option("--t-max", th.t_max, "Escape horizon");
  c_th->add_option("--x-esc", th.x_esc, "Escape radius");

  auto* c_or = app.add_subcommand("oracle", "Grid GPE solver");
  c_or->require_subcommand(1);
  EvolveArgs ev;
  auto* c_ev = c_or->add_subcommand("evolve", "Real-time split-step evolution");
  c_ev->add_option("--K", ev.K, "Depth parameter K");
  c_ev->add_option("--gamma", ev.gamma, "Coupling gamma");
  c_ev->add_option("--delta0", ev.delta0, "Initial width");
  c_ev->add_option("--p0", ev.p0, "Initial momentum");
  c_ev->add_option("--t-max", ev.t_max, "Final time");
  c_ev->add_option("--dt", ev.dt, "Time step")->check(CLI::PositiveNumber);
  c_ev->add_option("--sample-every", ev.sample_every, "Steps between samples");
  c_ev->add_flag("--free", ev.free_particle, "Drop the trap potential");
  add_grid(c_ev, ev.grid, true);

  OracleGroundArgs og;
  auto* c_og = c_or->add_subcommand("ground", "Imaginary-time ground state");
  c_og->add_option("--K", og.K, "Depth parameter K");
  add_coupling(c_og, og.coupling);
  add_grid(c_og, og.grid, false);

  CompareArgs cp;
  auto* c_cp = c_or->add_subcommand("compare", "Packet equations versus grid solver");
  c_cp->add_option("--K", cp.K, "Depth parameter K");
  c_cp->add_option("--gamma", cp.gamma, "Coupling gamma");
  c_cp->add_option("--delta0", cp.delta0, "Initial width");
  c_cp->add_option("--p0", cp.p0, "Initial momentum");
  c_cp->add_option("--t-max", cp.t_max, "Final time");
  c_cp->add_option("--dt", cp.dt, "Grid time step")->check(CLI::PositiveNumber);
  c_cp->add_option("--leak-tol", cp.leak_tol, "Edge amplitude that stops the grid run");
  add_grid(c_cp, cp.grid, true);

  std::string manifest_path;
  auto* c_rp = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  c_rp->add_option("manifest", manifest_path, "Path to a *.manifest.json")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParameterError;
  }

  try {
    if (*c_rp) {
      std::ifstream f(manifest_path);
      if (!f) fail(ErrorKind::Io, "cannot read " + manifest_path);
      io::RunManifest m;
      try {
        m = io::RunManifest::from_json(json::parse(f));
      } catch (const json::exception& e) {
        fail(ErrorKind::Io, manifest_path + ": " + e.what());
      }
      if (!m.argv.empty() && m.argv.front() == "replay") {
        fail(ErrorKind::InvalidArgument, "manifest records a replay");
      }
      return run(m.argv, out, err);
    }
    // Record the resolved output directory so a replay lands in the same place.
    if (std::find(args.begin(), args.end(), "--out-dir") == args.end()) {
      session.argv.insert(session.argv.begin(), {"--out-dir", session.out_dir});
    }
    if (*c_gs) return cmd_ground_state(session, gs);
    if (*c_cr) return cmd_critical(session, cr);
    if (*c_dy) return cmd_dynamics(session, dy);
    if (*c_th) return cmd_threshold(session, th);
    if (*c_ev) return cmd_oracle_evolve(session, ev);
    if (*c_og) return cmd_oracle_ground(session, og);
    if (*c_cp) return cmd_oracle_compare(session, cp);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace morsegpe::cli
