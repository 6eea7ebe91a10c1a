#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "morsegpe/dynamics.hpp"
#include "morsegpe/oracle.hpp"

namespace morsegpe::io {

// 15 significant digits, locale independent.
std::string format_number(double v);

// Comma-separated, header row, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::span<const double> values);
  void add_row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return body_; }

 private:
  std::size_t columns_;
  std::string body_;
};

// Columns t, x0, v, delta, w (delta = sqrt(s)).
std::string trajectory_csv(const Trajectory& traj);

// Same columns for a grid run: x0 = <x>, v = <p>, delta = packet width, and w
// the finite-difference rate of delta^2 (one-sided at the ends).
std::string moment_series_csv(std::span<const MomentSample> series);

// Columns x, re_psi, im_psi, abs2.
std::string snapshot_csv(const GridWavefunction& wf);

// Writes through a temporary file in the same directory and renames it into
// place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // replayable argument list
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json settings = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::string version = MORSEGPE_VERSION;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const IntegratorSettings& s);

}  // namespace morsegpe::io
