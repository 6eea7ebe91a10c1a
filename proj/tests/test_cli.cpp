#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace morsegpe;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  TempDir dir("morsegpe_cli_codes");
  CHECK(run({}).code == cli::kParameterError);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"frobnicate"}).code == cli::kParameterError);
  CHECK(run({"--out-dir", dir.str(), "critical", "--K", "0.4"}).code == cli::kParameterError);
  CHECK(run({"--out-dir", dir.str(), "ground-state", "--K", "abc"}).code ==
        cli::kParameterError);
  CHECK(run({"--out-dir", dir.str(), "ground-state", "--lambda", "1", "--gamma", "1"}).code ==
        cli::kParameterError);
  CHECK(run({"--out-dir", dir.str(), "ground-state", "--K", "2", "--lambda", "6"}).code ==
        cli::kNoBoundState);
  CHECK(run({"--out-dir", dir.str(), "threshold", "--K", "2", "--gamma", "1.2"}).code ==
        cli::kNoThreshold);
  CHECK(run({"--out-dir", dir.str(), "replay", (dir.path / "missing.json").string()}).code ==
        cli::kIoError);
}

TEST_CASE("ground state table") {
  TempDir dir("morsegpe_cli_gs");
  const Run r = run({"--out-dir", dir.str(), "ground-state", "--table1"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("2,-1.761,-2.242,-1.789,1.4127") != std::string::npos);
  const std::string csv = slurp(dir.path / "table1.csv");
  CHECK(csv.rfind("K,E_asymptotic,E_quadratic,E_full,alpha_star\n", 0) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir.path / "ground-state.manifest.json"));
  CHECK(manifest.at("command") == "ground-state");
  CHECK(manifest.at("outputs")[0] == "table1.csv");
}

TEST_CASE("dynamics output and determinism") {
  TempDir dir("morsegpe_cli_dyn");
  const std::vector<std::string> args{"--out-dir", dir.str(), "dynamics", "--K", "2",
                                      "--gamma", "0.5", "--p0", "0.6"};
  REQUIRE(run(args).code == cli::kOk);
  const std::string first = slurp(dir.path / "trajectory.csv");
  REQUIRE(run(args).code == cli::kOk);
  CHECK(slurp(dir.path / "trajectory.csv") == first);
  const auto j = nlohmann::json::parse(slurp(dir.path / "dynamics.json"));
  CHECK(j.at("escaped") == true);
  CHECK(first.rfind("t,x0,v,delta,w\n", 0) == 0);
}

TEST_CASE("config file and precedence") {
  TempDir dir("morsegpe_cli_cfg");
  {
    std::ofstream cfg(dir.path / "run.ini");
    cfg << "[dynamics]\nK=3\ngamma=0.5\np0=0.2\nt-max=5\n";
  }
  const std::string cfg = (dir.path / "run.ini").string();
  REQUIRE(run({"--out-dir", dir.str(), "--config", cfg, "dynamics"}).code == cli::kOk);
  auto m = nlohmann::json::parse(slurp(dir.path / "dynamics.manifest.json"));
  CHECK(m.at("parameters").at("K") == 3.0);
  CHECK(m.at("parameters").at("t_max") == 5.0);
  REQUIRE(run({"--out-dir", dir.str(), "--config", cfg, "dynamics", "--K", "4"}).code ==
          cli::kOk);
  m = nlohmann::json::parse(slurp(dir.path / "dynamics.manifest.json"));
  CHECK(m.at("parameters").at("K") == 4.0);
  CHECK(m.at("parameters").at("gamma") == 0.5);
}

TEST_CASE("replay reproduces outputs") {
  TempDir dir("morsegpe_cli_replay");
  REQUIRE(run({"--out-dir", dir.str(), "threshold", "--K", "2,3", "--gamma", "0.5"}).code ==
          cli::kOk);
  const std::string first = slurp(dir.path / "threshold.csv");
  fs::remove(dir.path / "threshold.csv");
  const Run r = run({"replay", (dir.path / "threshold.manifest.json").string()});
  CHECK(r.code == cli::kOk);
  CHECK(slurp(dir.path / "threshold.csv") == first);
}

TEST_CASE("oracle subcommands") {
  TempDir dir("morsegpe_cli_oracle");
  const Run ev = run({"--out-dir", dir.str(), "oracle", "evolve", "--K", "2", "--p0", "0.2",
                      "--t-max", "0.5", "--n", "1024"});
  CHECK(ev.code == cli::kOk);
  CHECK(fs::exists(dir.path / "oracle_moments.csv"));
  CHECK(fs::exists(dir.path / "oracle_snapshot.csv"));
  CHECK(run({"--out-dir", dir.str(), "oracle", "evolve", "--hbar-convention", "bogus"}).code ==
        cli::kParameterError);
  CHECK(run({"--out-dir", dir.str(), "oracle", "evolve", "--n", "1000"}).code ==
        cli::kParameterError);
  CHECK(run({"--out-dir", dir.str(), "oracle"}).code == cli::kParameterError);
}

}  // TEST_SUITE
