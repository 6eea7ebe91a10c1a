#include "morsegpe/io.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "morsegpe/error.hpp"

namespace morsegpe::io {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  require(columns_ > 0, "CSV header must not be empty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

void CsvWriter::add_row(std::span<const double> values) {
  require(values.size() == columns_, "CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_number(values[i]);
  }
  body_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  require(cells.size() == columns_, "CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

std::string trajectory_csv(const Trajectory& traj) {
  CsvWriter csv({"t", "x0", "v", "delta", "w"});
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const PacketState& y = traj.states[i];
    const double row[] = {traj.times[i], y.x0, y.v, y.width(), y.w};
    csv.add_row(row);
  }
  return csv.str();
}

std::string moment_series_csv(std::span<const MomentSample> series) {
  CsvWriter csv({"t", "x0", "v", "delta", "w"});
  const std::size_t n = series.size();
  auto s = [&](std::size_t i) { return series[i].m.width * series[i].m.width; };
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (n >= 2) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 == n ? n - 1 : i + 1;
      w = (s(b) - s(a)) / (series[b].t - series[a].t);
    }
    const double row[] = {series[i].t, series[i].m.mean_x, series[i].m.mean_p,
                          series[i].m.width, w};
    csv.add_row(row);
  }
  return csv.str();
}

std::string snapshot_csv(const GridWavefunction& wf) {
  CsvWriter csv({"x", "re_psi", "im_psi", "abs2"});
  const auto psi = wf.psi();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double row[] = {wf.grid().x(i), psi[i].real(), psi[i].imag(),
                          std::norm(psi[i])};
    csv.add_row(row);
  }
  return csv.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    f << contents;
    f.flush();
    if (!f) fail(ErrorKind::Io, "failed writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot move output into place at " + path.string());
  }
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},   {"argv", argv},
          {"parameters", parameters}, {"settings", settings},
          {"results", results},   {"outputs", outputs},
          {"wall_seconds", wall_seconds}, {"version", version}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.parameters = j.value("parameters", nlohmann::json::object());
  m.settings = j.value("settings", nlohmann::json::object());
  m.results = j.value("results", nlohmann::json::object());
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.wall_seconds = j.value("wall_seconds", 0.0);
  m.version = j.value("version", std::string(MORSEGPE_VERSION));
  return m;
}

nlohmann::json to_json(const ThresholdResult& r) {
  return {{"p_th", r.p_th},
          {"E_th", r.E_th},
          {"bracket_lo", r.bracket_lo},
          {"bracket_hi", r.bracket_hi},
          {"evaluations", r.evaluations}};
}

nlohmann::json to_json(const ComparisonReport& r) {
  return {{"K", r.K},
          {"gamma", r.gamma},
          {"delta0", r.delta0},
          {"p0", r.p0},
          {"t_max", r.t_max},
          {"hbar_convention", r.convention},
          {"hbar_eff", r.hbar_eff},
          {"max_center_deviation", r.max_center_deviation},
          {"max_width_deviation", r.max_width_deviation},
          {"short_time_center_deviation", r.short_time_center_deviation},
          {"compared_until", r.compared_until},
          {"ode_verdict", r.ode_verdict},
          {"grid_verdict", r.grid_verdict},
          {"verdicts_agree", r.verdicts_agree},
          {"grid_leaked", r.grid_leaked}};
}

nlohmann::json to_json(const IntegratorSettings& s) {
  return {{"mode", s.mode == StepMode::FixedRK4 ? "rk4" : "dopri5"},
          {"dt", s.dt},
          {"rtol", s.rtol},
          {"atol", s.atol},
          {"dt_floor", s.dt_floor},
          {"sample_interval", s.sample_interval},
          {"s_min", s.s_min},
          {"x_stop", s.x_stop}};
}

}  // namespace morsegpe::io
