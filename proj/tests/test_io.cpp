#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "morsegpe/error.hpp"
#include "morsegpe/io.hpp"

using namespace morsegpe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("number formatting") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(-2.25) == "-2.25");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333333");
  CHECK(io::format_number(1e-20) == "1e-20");
}

TEST_CASE("csv writer") {
  io::CsvWriter w({"a", "b"});
  const double row[] = {1.5, -2.0};
  w.add_row(row);
  w.add_row(std::vector<std::string>{"x", ""});
  CHECK(w.str() == "a,b\n1.5,-2\nx,\n");
  const double bad[] = {1.0};
  CHECK_THROWS_AS(w.add_row(bad), Error);
}

TEST_CASE("trajectory csv") {
  const Trajectory t = integrate(PacketState::released(0.2), 2.0, 0.5, 0.05);
  const std::string csv = io::trajectory_csv(t);
  CHECK(csv.rfind("t,x0,v,delta,w\n0,0,0.2,0.4,0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv == io::trajectory_csv(integrate(PacketState::released(0.2), 2.0, 0.5, 0.05)));
}

TEST_CASE("atomic write") {
  const fs::path dir = fs::temp_directory_path() / "morsegpe_io_test";
  fs::remove_all(dir);
  const fs::path p = dir / "nested" / "out.txt";
  io::write_atomic(p, "first\n");
  io::write_atomic(p, "second\n");
  CHECK(slurp(p) == "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p.parent_path())) ++files;
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("manifest round trip") {
  io::RunManifest m;
  m.command = "dynamics";
  m.argv = {"dynamics", "--K", "2"};
  m.parameters = {{"K", 2.0}};
  m.outputs = {"trajectory.csv"};
  m.wall_seconds = 0.5;
  const io::RunManifest back = io::RunManifest::from_json(m.to_json());
  CHECK(back.command == m.command);
  CHECK(back.argv == m.argv);
  CHECK(back.parameters == m.parameters);
  CHECK(back.outputs == m.outputs);
  CHECK(back.version == MORSEGPE_VERSION);
}

TEST_CASE("result serialization") {
  ThresholdResult r{0.44, 0.75, 0.4395, 0.4405, 12};
  const nlohmann::json j = io::to_json(r);
  CHECK(j.at("p_th") == 0.44);
  CHECK(j.at("evaluations") == 12);
  const nlohmann::json s = io::to_json(threshold_integrator());
  CHECK(s.at("mode") == "dopri5");
}

}  // TEST_SUITE
