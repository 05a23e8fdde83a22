#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "digirabi/config.hpp"
#include "digirabi/resources.hpp"
#include "digirabi/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace digirabi;
using config::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("digirabi_run_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  REQUIRE(f.good());
}

json parse_file_json(const fs::path& p) { return json::parse(slurp(p)); }

// Weakly coupled model: the mode barely populates, so nothing truncates.
json base_rabi() {
  json j;
  j["command"] = "simulate-rabi";
  j["rabi_resonator_mhz"] = 100.0;
  j["rabi_qubit_mhz"] = 100.0;
  j["rabi_coupling_mhz"] = 10.0;
  j["fock_cutoff"] = 6;
  j["trotter_steps"] = 4;
  j["sim_time_ns"] = 2.0;
  return j;
}

int run_binary(const std::string& args, const fs::path& capture_dir,
               std::string* out = nullptr, std::string* err = nullptr) {
  const char* bin = std::getenv("DIGIRABI_BIN");
  REQUIRE(bin != nullptr);
  const fs::path so = capture_dir / "stdout.txt";
  const fs::path se = capture_dir / "stderr.txt";
  const std::string cmd = std::string(bin) + " " + args + " >" + so.string() +
                          " 2>" + se.string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  if (out) *out = slurp(so);
  if (err) *err = slurp(se);
  return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("a small ideal run produces a consistent summary and CSV") {
  const config::RunSpec spec = config::parse_config_json(base_rabi());
  const run::RunResult r = run::run_core(spec);

  CHECK(r.csv_name == "trajectory.csv");
  CHECK_FALSE(r.truncation_flagged);
  CHECK(r.summary.at("schema_version").get<int>() == 1);
  CHECK(r.summary.at("command").get<std::string>() == "simulate-rabi");
  CHECK(r.summary.at("settings") == spec.raw);
  CHECK(r.summary.at("warnings").empty());

  const json& res = r.summary.at("results");
  CHECK(res.at("grid_points").get<int>() == 5); // ideal: one row per step
  CHECK(res.at("final_sim_time_ns").get<double>() == 2.0);
  CHECK(res.at("final_lab_time_ns").get<double>() == 4.0);
  CHECK(res.at("truncation_flagged").get<bool>() == false);
  const double f = res.at("fidelity_final").get<double>();
  CHECK(f > 0.0);
  CHECK(f <= 1.0 + 1e-12);
  CHECK(res.contains("wall_ms"));

  std::istringstream csv(r.csv);
  std::string line;
  std::getline(csv, line);
  CHECK(line ==
        "time_ns,sz,n_phot,fidelity,sim_time_ns,lab_time_ns,x_quad,p_quad,"
        "top_fock_pop");
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("multi-qubit runs add per-qubit CSV columns") {
  json j = base_rabi();
  j["command"] = "simulate-dicke";
  j["dicke_qubits"] = 2;
  j["fock_cutoff"] = 4;
  j["trotter_steps"] = 2;
  const config::RunSpec spec = config::parse_config_json(j);
  const run::RunResult r = run::run_core(spec);
  std::istringstream csv(r.csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "time_ns,sz,n_phot,fidelity,sim_time_ns,lab_time_ns,x_quad,p_quad,"
        "top_fock_pop,sz_1,sz_2");
}

TEST_CASE("runs are reproducible and artifacts land in the output directory") {
  const config::RunSpec spec = config::parse_config_json(base_rabi());
  const TempDir a, b;
  CHECK(run::run(spec, a.str()) == 0);
  CHECK(run::run(spec, b.str()) == 0);

  REQUIRE(fs::exists(a.path / "trajectory.csv"));
  REQUIRE(fs::exists(a.path / "summary.json"));
  CHECK(slurp(a.path / "trajectory.csv") == slurp(b.path / "trajectory.csv"));

  json sa = parse_file_json(a.path / "summary.json");
  json sb = parse_file_json(b.path / "summary.json");
  sa.at("results").erase("wall_ms");
  sb.at("results").erase("wall_ms");
  CHECK(sa == sb);
}

TEST_CASE("a summary file re-parses into the identical run") {
  const config::RunSpec spec = config::parse_config_json(base_rabi());
  const run::RunResult first = run::run_core(spec);

  const config::RunSpec echoed = config::parse_config_json(first.summary);
  const run::RunResult second = run::run_core(echoed);
  CHECK(second.csv == first.csv);
}

TEST_CASE("the output directory falls back from override to config") {
  const TempDir t;
  json j = base_rabi();
  j["out_dir"] = (t.path / "from_config").string();
  const config::RunSpec spec = config::parse_config_json(j);

  CHECK(run::run(spec) == 0);
  CHECK(fs::exists(t.path / "from_config" / "trajectory.csv"));

  CHECK(run::run(spec, (t.path / "override").string()) == 0);
  CHECK(fs::exists(t.path / "override" / "trajectory.csv"));
}

TEST_CASE("resources runs emit a summary and no trajectory") {
  json j;
  j["command"] = "resources";
  j["rabi_resonator_mhz"] = 100.0;
  j["rabi_qubit_mhz"] = 80.0;
  j["rabi_coupling_mhz"] = 50.0;
  j["dicke_qubits"] = 2;
  j["fock_cutoff"] = 8;
  j["sim_time_ns"] = 10.0;
  j["trotter_steps"] = 16;
  j["epsilon"] = 1e-3;
  j["suzuki_k"] = 2;
  const config::RunSpec spec = config::parse_config_json(j);
  const run::RunResult r = run::run_core(spec);
  CHECK(r.csv_name.empty());

  const json& res = r.summary.at("results");
  resources::ResourceQuery q;
  const double tau = 2 * std::numbers::pi * 1e-3;
  q.dicke = {models::RabiParams{100 * tau, 80 * tau, 50 * tau}, 2};
  q.fock_cutoff = 8;
  q.t = 10.0;
  q.epsilon = 1e-3;
  q.k = 2;
  CHECK(res.at("norm_bound").get<double>() ==
        doctest::Approx(resources::dicke_norm_bound(q)).epsilon(1e-12));
  CHECK(res.at("gate_count").get<double>() ==
        doctest::Approx(resources::gate_count_bound(q)).epsilon(1e-12));
  CHECK(res.at("trotter_error").get<double>() > 0.0);

  const TempDir t;
  CHECK(run::run(spec, t.str()) == 0);
  CHECK(fs::exists(t.path / "summary.json"));
  CHECK_FALSE(fs::exists(t.path / "trajectory.csv"));
}

TEST_CASE("resources without steps omits the splitting estimate") {
  json j;
  j["command"] = "resources";
  j["rabi_resonator_mhz"] = 100.0;
  j["rabi_qubit_mhz"] = 80.0;
  j["rabi_coupling_mhz"] = 50.0;
  j["fock_cutoff"] = 4;
  j["sim_time_ns"] = 10.0;
  j["epsilon"] = 1e-3;
  const run::RunResult r = run::run_core(config::parse_config_json(j));
  CHECK_FALSE(r.summary.at("results").contains("trotter_error"));
}

TEST_CASE("sweeps expand row-major and are identical for any worker count") {
  json j;
  j["command"] = "sweep";
  j["sweep_command"] = "simulate-rabi";
  j["workers"] = 1;
  j["sweep"] = json::object();
  j["sweep"]["trotter_steps"] = json::array({2, 4});
  j["sweep"]["rabi_coupling_mhz"] = json::array({10.0, 20.0});
  j["rabi_resonator_mhz"] = 100.0;
  j["rabi_qubit_mhz"] = 100.0;
  j["fock_cutoff"] = 6;
  j["sim_time_ns"] = 2.0;

  const run::RunResult serial = run::run_core(config::parse_config_json(j));
  j["workers"] = 4;
  const run::RunResult pooled = run::run_core(config::parse_config_json(j));

  CHECK(serial.csv_name == "sweep.csv");
  CHECK(serial.csv == pooled.csv);

  const json& res = serial.summary.at("results");
  CHECK(res.at("cells").get<int>() == 4);
  CHECK(res.at("ok").get<int>() == 4);
  CHECK(res.at("failed").get<int>() == 0);
  CHECK(res.at("axes") == json::array({"trotter_steps", "rabi_coupling_mhz"}));

  std::istringstream csv(serial.csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "cell,trotter_steps,rabi_coupling_mhz,status,time_ns,sz,n_phot,"
        "fidelity,top_fock_pop,truncation_flagged");
  // Last axis fastest: (2,10), (2,20), (4,10), (4,20).
  std::string row;
  std::getline(csv, row);
  CHECK(row.rfind("0,2,10,ok,", 0) == 0);
  std::getline(csv, row);
  CHECK(row.rfind("1,2,20,ok,", 0) == 0);
  std::getline(csv, row);
  CHECK(row.rfind("2,4,10,ok,", 0) == 0);
  std::getline(csv, row);
  CHECK(row.rfind("3,4,20,ok,", 0) == 0);

  const json& r0 = res.at("rows").at(0);
  CHECK(r0.at("cell").get<int>() == 0);
  CHECK(r0.at("trotter_steps").get<int>() == 2);
  CHECK(r0.at("status").get<std::string>() == "ok");
  CHECK(r0.at("results").contains("fidelity_final"));
}

TEST_CASE("a failing sweep cell is reported, not fatal") {
  json j;
  j["command"] = "sweep";
  j["sweep_command"] = "simulate-rabi";
  j["sweep"] = json::object();
  j["sweep"]["fock_cutoff"] = json::array({2, 0}); // 0 is out of range
  j["rabi_resonator_mhz"] = 100.0;
  j["rabi_qubit_mhz"] = 100.0;
  j["rabi_coupling_mhz"] = 10.0;
  j["trotter_steps"] = 2;
  j["sim_time_ns"] = 1.0;

  const config::RunSpec spec = config::parse_config_json(j);
  const run::RunResult r = run::run_core(spec);
  const json& res = r.summary.at("results");
  CHECK(res.at("cells").get<int>() == 2);
  CHECK(res.at("ok").get<int>() == 1);
  CHECK(res.at("failed").get<int>() == 1);
  CHECK(res.at("rows").at(1).at("status").get<std::string>() == "error");
  CHECK(res.at("rows").at(1).contains("error"));
  CHECK(r.csv.find("1,0,error,,,,,,\n") != std::string::npos);

  const TempDir t;
  CHECK(run::run(spec, t.str()) == 0); // partial failure is still a run
  CHECK(fs::exists(t.path / "sweep.csv"));
}

TEST_CASE("truncation policy controls the exit code") {
  json j = base_rabi();
  j["rabi_coupling_mhz"] = 100.0; // deep-strong: the mode fills fast
  j["fock_cutoff"] = 2;
  j["trotter_steps"] = 5;
  j["sim_time_ns"] = 5.0;

  const TempDir t;
  const config::RunSpec degraded = config::parse_config_json(j);
  CHECK(run::run(degraded, (t.path / "a").string()) == 3);

  j["truncation_policy"] = "error";
  const config::RunSpec fatal = config::parse_config_json(j);
  CHECK(run::run(fatal, (t.path / "b").string()) == 1);

  j["truncation_policy"] = "warn";
  const config::RunSpec loose = config::parse_config_json(j);
  CHECK(run::run(loose, (t.path / "c").string()) == 0);

  const json sum = parse_file_json(t.path / "a" / "summary.json");
  CHECK(sum.at("results").at("truncation_flagged").get<bool>());
  REQUIRE(sum.at("warnings").size() == 1);
  CHECK(sum.at("warnings").at(0).get<std::string>().find("truncation") !=
        std::string::npos);
}

TEST_CASE("binary: help and usage errors") {
  const TempDir t;
  CHECK(run_binary("--help", t.path) == 0);

  std::string err;
  CHECK(run_binary("", t.path, nullptr, &err) == 2);
  CHECK(err.find("\"type\":\"usage\"") != std::string::npos);

  CHECK(run_binary("simulate-rabi", t.path, nullptr, &err) == 2);
  CHECK(err.find("--config") != std::string::npos);
}

TEST_CASE("binary: config errors exit 2 with a structured message") {
  const TempDir t;
  std::string err;

  CHECK(run_binary("simulate-rabi --config " + (t.path / "nope.json").string(),
                   t.path, nullptr, &err) == 2);
  CHECK(err.find("\"type\":\"config\"") != std::string::npos);
  CHECK(err.find("cannot open config file") != std::string::npos);

  spit(t.path / "broken.json", "{ not json");
  CHECK(run_binary("simulate-rabi --config " + (t.path / "broken.json").string(),
                   t.path, nullptr, &err) == 2);
  CHECK(err.find("parse error") != std::string::npos);

  spit(t.path / "wrong.json", base_rabi().dump());
  CHECK(run_binary("simulate-dirac --config " + (t.path / "wrong.json").string(),
                   t.path, nullptr, &err) == 2);
  CHECK(err.find("does not match subcommand") != std::string::npos);
}

TEST_CASE("binary: a full run writes artifacts and echoes overrides") {
  const TempDir t;
  spit(t.path / "run.json", base_rabi().dump());
  const fs::path out = t.path / "out";

  std::string stdout_text;
  const int rc = run_binary("simulate-rabi --config " +
                                (t.path / "run.json").string() + " --out " +
                                out.string() + " --steps 3 --mode ideal",
                            t.path, &stdout_text);
  CHECK(rc == 0);
  CHECK(stdout_text.find("wrote") != std::string::npos);
  REQUIRE(fs::exists(out / "trajectory.csv"));
  REQUIRE(fs::exists(out / "summary.json"));

  const json sum = parse_file_json(out / "summary.json");
  CHECK(sum.at("settings").at("trotter_steps").get<int>() == 3);
  CHECK(sum.at("settings").at("mode").get<std::string>() == "ideal");
  CHECK(sum.at("results").at("grid_points").get<int>() == 4);

  // The echoed summary is itself a valid config for the same command.
  std::string err;
  const fs::path out2 = t.path / "out2";
  CHECK(run_binary("simulate-rabi --config " + (out / "summary.json").string() +
                       " --out " + out2.string(),
                   t.path, nullptr, &err) == 0);
  CHECK(slurp(out2 / "trajectory.csv") == slurp(out / "trajectory.csv"));
}

TEST_CASE("binary: truncation-limited runs exit 3 under the default policy") {
  const TempDir t;
  json j = base_rabi();
  j["rabi_coupling_mhz"] = 100.0;
  j["fock_cutoff"] = 2;
  j["trotter_steps"] = 5;
  j["sim_time_ns"] = 5.0;
  spit(t.path / "hot.json", j.dump());

  std::string err;
  const int rc = run_binary("simulate-rabi --config " +
                                (t.path / "hot.json").string() + " --out " +
                                (t.path / "out").string(),
                            t.path, nullptr, &err);
  CHECK(rc == 3);
  CHECK(err.find("truncation") != std::string::npos);
}
