#include "digirabi/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace digirabi::config {

namespace {

enum class Kind { Num, Int, Bool, Str, Init, Sweep };

const std::map<std::string, Kind>& key_table() {
  static const std::map<std::string, Kind> t = {
      {"command", Kind::Str},
      {"resonator_ghz", Kind::Num},
      {"qubit1_ghz", Kind::Num},
      {"qubit2_ghz", Kind::Num},
      {"frame_ghz", Kind::Num},
      {"coupling_mhz", Kind::Num},
      {"rabi_resonator_mhz", Kind::Num},
      {"rabi_qubit_mhz", Kind::Num},
      {"rabi_coupling_mhz", Kind::Num},
      {"dicke_qubits", Kind::Int},
      {"mass_energy_mhz", Kind::Num},
      {"light_speed_mhz", Kind::Num},
      {"kappa_khz", Kind::Num},
      {"gamma_phi_khz", Kind::Num},
      {"gamma_minus_khz", Kind::Num},
      {"fock_cutoff", Kind::Int},
      {"trotter_steps", Kind::Int},
      {"sim_time_ns", Kind::Num},
      {"samples", Kind::Int},
      {"initial_state", Kind::Init},
      {"split", Kind::Str},
      {"mode", Kind::Str},
      {"pulse_time_ns", Kind::Num},
      {"pulse_shape", Kind::Str},
      {"pulse_amp_scale", Kind::Num},
      {"pulse_with_jc", Kind::Bool},
      {"truncation_policy", Kind::Str},
      {"out_dir", Kind::Str},
      {"workers", Kind::Int},
      {"epsilon", Kind::Num},
      {"suzuki_k", Kind::Int},
      {"sweep", Kind::Sweep},
      {"sweep_command", Kind::Str},
  };
  return t;
}

const std::set<std::string> kPhysicalKeys = {
    "resonator_ghz", "qubit1_ghz", "qubit2_ghz", "frame_ghz", "coupling_mhz"};
const std::set<std::string> kSimulatedKeys = {
    "rabi_resonator_mhz", "rabi_qubit_mhz", "rabi_coupling_mhz"};
const std::set<std::string> kDiracKeys = {"mass_energy_mhz", "light_speed_mhz"};
const std::set<std::string> kSimulateCommon = {
    "fock_cutoff",     "trotter_steps",   "sim_time_ns",
    "samples",         "initial_state",   "split",
    "mode",            "pulse_time_ns",   "pulse_shape",
    "pulse_amp_scale", "pulse_with_jc",   "truncation_policy",
    "kappa_khz",       "gamma_phi_khz",   "gamma_minus_khz"};

bool is_simulate(const std::string& cmd) {
  return cmd == "simulate-rabi" || cmd == "simulate-dicke" ||
         cmd == "simulate-dirac";
}

// Keys a given command may carry; anything else is rejected outright.
std::set<std::string> allowed_for(const std::string& cmd,
                                  const std::string& sweep_cmd) {
  std::set<std::string> a = {"command", "out_dir"};
  auto add = [&a](const std::set<std::string>& s) { a.insert(s.begin(), s.end()); };
  if (is_simulate(cmd)) add(kSimulateCommon);
  if (cmd == "simulate-rabi") {
    add(kPhysicalKeys);
    add(kSimulatedKeys);
  } else if (cmd == "simulate-dicke") {
    add(kSimulatedKeys);
    a.insert("dicke_qubits");
  } else if (cmd == "simulate-dirac") {
    add(kDiracKeys);
  } else if (cmd == "resources") {
    add(kSimulatedKeys);
    add({"dicke_qubits", "fock_cutoff", "sim_time_ns", "trotter_steps",
         "split", "epsilon", "suzuki_k"});
  } else if (cmd == "sweep") {
    add(allowed_for(sweep_cmd, ""));
    add({"sweep", "sweep_command", "workers"});
  }
  return a;
}

struct Problems {
  std::vector<std::string> items;
  void add(std::string s) { items.push_back(std::move(s)); }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string msg = "invalid config:";
    for (const std::string& s : items) msg += "\n  - " + s;
    throw std::invalid_argument(msg);
  }
};

// SAX pass used only to reject duplicate keys, which DOM parsing would
// silently collapse.
struct DupDetector : nlohmann::json_sax<json> {
  std::vector<std::set<std::string>> stack;
  std::string dup, err;

  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }
  bool start_object(std::size_t) override {
    stack.emplace_back();
    return true;
  }
  bool key(string_t& v) override {
    if (!stack.back().insert(v).second) {
      dup = v;
      return false;
    }
    return true;
  }
  bool end_object() override {
    stack.pop_back();
    return true;
  }
  bool start_array(std::size_t) override { return true; }
  bool end_array() override { return true; }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    err = ex.what();
    return false;
  }
};

class Extractor {
 public:
  Extractor(const json& doc, Problems& problems)
      : doc_(doc), problems_(problems) {}

  double num(const char* k, double dflt, double min_incl,
             bool strict_positive = false) {
    if (!doc_.contains(k)) return dflt;
    const double v = doc_[k].get<double>();
    if (strict_positive ? !(v > min_incl) : v < min_incl)
      problems_.add(std::string(k) + " must be " +
                    (strict_positive ? "> " : ">= ") +
                    std::to_string(min_incl));
    return v;
  }

  int integer(const char* k, int dflt, int min_incl) {
    if (!doc_.contains(k)) return dflt;
    const long long v = doc_[k].get<long long>();
    if (v < min_incl || v > 1'000'000'000)
      problems_.add(std::string(k) + " must be in [" +
                    std::to_string(min_incl) + ", 1e9]");
    return static_cast<int>(v);
  }

  bool boolean(const char* k, bool dflt) {
    return doc_.contains(k) ? doc_[k].get<bool>() : dflt;
  }

  std::string choice(const char* k, std::string dflt,
                     const std::set<std::string>& options) {
    if (!doc_.contains(k)) return dflt;
    const std::string v = doc_[k].get<std::string>();
    if (!options.count(v)) {
      std::string msg = std::string(k) + " must be one of {";
      bool first = true;
      for (const std::string& o : options) {
        msg += (first ? "" : ", ") + o;
        first = false;
      }
      problems_.add(msg + "}, got '" + v + "'");
    }
    return v;
  }

 private:
  const json& doc_;
  Problems& problems_;
};

const std::set<std::string> kCommands = {"simulate-rabi", "simulate-dicke",
                                         "simulate-dirac", "resources",
                                         "sweep"};

void check_family_presence(const json& doc, const std::set<std::string>& keys,
                           const std::string& family, bool& any,
                           Problems& problems, bool enforce) {
  int present = 0;
  for (const std::string& k : keys) present += doc.contains(k) ? 1 : 0;
  any = present > 0;
  if (enforce && present > 0 && present < static_cast<int>(keys.size())) {
    std::string missing;
    for (const std::string& k : keys)
      if (!doc.contains(k)) missing += (missing.empty() ? "" : ", ") + k;
    problems.add("incomplete " + family + " parameter family; missing: " +
                 missing);
  }
}

void parse_initial_state(const json& doc, RunSpec& spec, Problems& problems) {
  if (!doc.contains("initial_state")) return;
  const json& v = doc["initial_state"];
  if (v.is_string()) {
    spec.initial_state = v.get<std::string>();
    const std::string& s = spec.initial_state;
    if (s == "excited-vacuum" || s == "ground-vacuum") return;
    if (s.rfind("fock:", 0) == 0) {
      const std::string digits = s.substr(5);
      if (digits.empty() ||
          digits.find_first_not_of("0123456789") != std::string::npos) {
        problems.add("initial_state 'fock:<m>' needs a nonnegative integer m");
        return;
      }
      const long m = std::stol(digits);
      if (m > spec.fock_cutoff)
        problems.add("initial_state fock:" + digits +
                     " exceeds fock_cutoff " + std::to_string(spec.fock_cutoff));
      return;
    }
    problems.add("initial_state must be excited-vacuum, ground-vacuum, "
                 "fock:<m>, or an amplitude array");
    return;
  }
  if (v.is_array()) {
    spec.initial_custom = true;
    spec.initial_state = "custom";
    for (const json& x : v) {
      if (!x.is_number()) {
        problems.add("initial_state amplitudes must be numbers");
        return;
      }
      spec.initial_amplitudes.push_back(x.get<double>());
    }
    const int n_qubits = spec.command == "simulate-dicke" ? spec.dicke_qubits : 1;
    const long dim = (1L << n_qubits) * (spec.fock_cutoff + 1);
    if (static_cast<long>(spec.initial_amplitudes.size()) != 2 * dim) {
      problems.add("initial_state amplitude array must hold " +
                   std::to_string(2 * dim) +
                   " numbers (re,im pairs over the full basis), got " +
                   std::to_string(spec.initial_amplitudes.size()));
      return;
    }
    double norm2 = 0;
    for (size_t i = 0; i < spec.initial_amplitudes.size(); i += 2)
      norm2 += spec.initial_amplitudes[i] * spec.initial_amplitudes[i] +
               spec.initial_amplitudes[i + 1] * spec.initial_amplitudes[i + 1];
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8)
      problems.add("initial_state amplitudes are not normalized (|norm-1| = " +
                   std::to_string(std::abs(std::sqrt(norm2) - 1.0)) + ")");
    return;
  }
  problems.add("initial_state must be a string or an amplitude array");
}

void parse_sweep_axes(const json& doc, RunSpec& spec, Problems& problems) {
  const json& sw = doc["sweep"];
  if (!sw.is_object() || sw.empty()) {
    problems.add("sweep must be a non-empty object of key -> value array");
    return;
  }
  const std::set<std::string> cell_allowed = allowed_for(spec.sweep_command, "");
  for (const auto& [key, vals] : sw.items()) {
    const auto it = key_table().find(key);
    if (it == key_table().end() || !cell_allowed.count(key) ||
        key == "command" || key == "out_dir") {
      problems.add("sweep axis '" + key + "' is not a sweepable key of " +
                   spec.sweep_command);
      continue;
    }
    if (!vals.is_array() || vals.empty()) {
      problems.add("sweep axis '" + key + "' must be a non-empty array");
      continue;
    }
    SweepAxis axis;
    axis.key = key;
    bool dup_warned = false;
    for (const json& v : vals) {
      const bool type_ok =
          (it->second == Kind::Num && v.is_number()) ||
          (it->second == Kind::Int && v.is_number_integer()) ||
          (it->second == Kind::Bool && v.is_boolean()) ||
          ((it->second == Kind::Str || it->second == Kind::Init) &&
           v.is_string());
      if (!type_ok) {
        problems.add("sweep axis '" + key + "' has a value of the wrong type");
        break;
      }
      bool seen = false;
      for (const json& u : axis.values) seen = seen || u == v;
      if (seen) {
        if (!dup_warned)
          spec.warnings.push_back("sweep axis '" + key +
                                  "': duplicate values removed");
        dup_warned = true;
        continue;
      }
      axis.values.push_back(v);
    }
    spec.sweep_axes.push_back(std::move(axis));
  }
}

} // namespace

RunSpec parse_config_json(json doc, const std::string& cli_command,
                          const json& overrides) {
  if (!doc.is_object())
    throw std::invalid_argument("config root must be a JSON object");

  // A previous run's summary document works as a config: its settings echo
  // is the config that produced it.
  if (doc.contains("schema_version") && doc.contains("settings")) {
    if (!doc["settings"].is_object())
      throw std::invalid_argument("summary 'settings' must be an object");
    doc = doc["settings"];
  }

  for (const auto& [k, v] : overrides.items())
    doc[k] = v;

  Problems problems;
  RunSpec spec;

  std::string cmd;
  if (doc.contains("command")) {
    if (!doc["command"].is_string())
      throw std::invalid_argument("command must be a string");
    cmd = doc["command"].get<std::string>();
  }
  if (!cli_command.empty()) {
    if (!cmd.empty() && cmd != cli_command)
      throw std::invalid_argument("config command '" + cmd +
                                  "' does not match subcommand '" +
                                  cli_command + "'");
    cmd = cli_command;
    doc["command"] = cmd;
  }
  if (cmd.empty())
    throw std::invalid_argument("invalid config:\n  - missing key: command "
                                "(or invoke a subcommand)");
  if (!kCommands.count(cmd))
    throw std::invalid_argument("unknown command '" + cmd + "'");
  spec.command = cmd;

  if (cmd == "sweep") {
    if (!doc.contains("sweep_command") || !doc["sweep_command"].is_string())
      throw std::invalid_argument(
          "invalid config:\n  - sweep requires a sweep_command string");
    spec.sweep_command = doc["sweep_command"].get<std::string>();
    if (!kCommands.count(spec.sweep_command) || spec.sweep_command == "sweep")
      throw std::invalid_argument("sweep_command must name a non-sweep command");
  }

  const std::set<std::string> allowed = allowed_for(cmd, spec.sweep_command);
  for (const auto& [k, v] : doc.items()) {
    const auto it = key_table().find(k);
    if (it == key_table().end()) {
      problems.add("unknown key '" + k + "'");
      continue;
    }
    if (!allowed.count(k)) {
      problems.add("key '" + k + "' is not used by " + cmd);
      continue;
    }
    const Kind kind = it->second;
    const bool ok = (kind == Kind::Num && v.is_number()) ||
                    (kind == Kind::Int && v.is_number_integer()) ||
                    (kind == Kind::Bool && v.is_boolean()) ||
                    (kind == Kind::Str && v.is_string()) ||
                    (kind == Kind::Init && (v.is_string() || v.is_array())) ||
                    (kind == Kind::Sweep && v.is_object());
    if (!ok) problems.add("key '" + k + "' has the wrong type");
  }
  problems.raise_if_any();

  Extractor ex(doc, problems);
  spec.resonator_ghz = ex.num("resonator_ghz", 0, 0);
  spec.qubit1_ghz = ex.num("qubit1_ghz", 0, 0);
  spec.qubit2_ghz = ex.num("qubit2_ghz", 0, 0);
  spec.frame_ghz = ex.num("frame_ghz", 0, 0);
  spec.coupling_mhz = ex.num("coupling_mhz", 0, 0, /*strict=*/true);
  spec.rabi_resonator_mhz = ex.num("rabi_resonator_mhz", 0, 0);
  spec.rabi_qubit_mhz = ex.num("rabi_qubit_mhz", 0, 0);
  spec.rabi_coupling_mhz = ex.num("rabi_coupling_mhz", 0, 0);
  spec.dicke_qubits = ex.integer("dicke_qubits", 1, 1);
  spec.mass_energy_mhz = ex.num("mass_energy_mhz", 0, 0);
  spec.light_speed_mhz = ex.num("light_speed_mhz", 0, 0, /*strict=*/true);
  spec.kappa_khz = ex.num("kappa_khz", 0, 0);
  spec.gamma_phi_khz = ex.num("gamma_phi_khz", 0, 0);
  spec.gamma_minus_khz = ex.num("gamma_minus_khz", 0, 0);
  spec.fock_cutoff = ex.integer("fock_cutoff", 0, 1);
  spec.trotter_steps = ex.integer("trotter_steps", 0, 0);
  spec.sim_time_ns = ex.num("sim_time_ns", 0, 0, /*strict=*/true);
  spec.samples = ex.integer("samples", 201, 2);
  spec.split = ex.choice("split", "symmetric", {"symmetric", "step2-zero"});
  spec.mode = ex.choice("mode", "ideal", {"ideal", "pulsed"});
  spec.pulse_time_ns = ex.num("pulse_time_ns", 10.0, 0, /*strict=*/true);
  spec.pulse_shape = ex.choice("pulse_shape", "sine2", {"sine2", "rect"});
  spec.pulse_amp_scale = ex.num("pulse_amp_scale", 1.0, 0, /*strict=*/true);
  spec.pulse_with_jc = ex.boolean("pulse_with_jc", false);
  spec.truncation_policy = ex.choice("truncation_policy", "degraded",
                                     {"degraded", "warn", "error"});
  spec.out_dir = doc.contains("out_dir") ? doc["out_dir"].get<std::string>() : "";
  spec.workers = ex.integer("workers", 1, 1);
  spec.epsilon = ex.num("epsilon", 0, 0, /*strict=*/true);
  spec.suzuki_k = ex.integer("suzuki_k", 1, 1);

  // Sweep bases may leave a family partial; the axes fill cells in and each
  // cell re-parses with full enforcement.
  const bool enforce_families = cmd != "sweep";
  check_family_presence(doc, kPhysicalKeys, "lab-device", spec.has_physical,
                        problems, enforce_families);
  check_family_presence(doc, kSimulatedKeys, "simulated-model",
                        spec.has_simulated, problems, enforce_families);
  check_family_presence(doc, kDiracKeys, "dirac", spec.has_dirac, problems,
                        enforce_families);

  if (cmd != "sweep") {
    std::vector<std::string> missing;
    auto need = [&](const char* k) {
      if (!doc.contains(k)) missing.push_back(k);
    };
    if (cmd == "simulate-rabi") {
      if (spec.has_physical && spec.has_simulated)
        problems.add("give exactly one model family (lab-device keys or "
                     "rabi_* keys), not both");
      if (!spec.has_physical && !spec.has_simulated)
        missing.push_back("a model family (resonator_ghz/qubit1_ghz/"
                          "qubit2_ghz/frame_ghz/coupling_mhz, or "
                          "rabi_resonator_mhz/rabi_qubit_mhz/rabi_coupling_mhz)");
    } else if (cmd == "simulate-dicke") {
      if (!spec.has_simulated)
        missing.push_back("rabi_resonator_mhz/rabi_qubit_mhz/rabi_coupling_mhz");
      need("dicke_qubits");
    } else if (cmd == "simulate-dirac") {
      if (!spec.has_dirac) missing.push_back("mass_energy_mhz/light_speed_mhz");
    } else if (cmd == "resources") {
      if (!spec.has_simulated)
        missing.push_back("rabi_resonator_mhz/rabi_qubit_mhz/rabi_coupling_mhz");
      need("epsilon");
    }
    if (is_simulate(cmd) || cmd == "resources") {
      need("fock_cutoff");
      need("sim_time_ns");
    }
    for (const std::string& k : missing) problems.add("missing key: " + k);
    problems.raise_if_any();

    if (is_simulate(cmd)) {
      if (spec.mode == "pulsed" && spec.trotter_steps < 1)
        problems.add("pulsed mode requires trotter_steps >= 1");
      if (spec.noisy() && spec.mode != "pulsed")
        problems.add("noise rates require mode = pulsed");
      parse_initial_state(doc, spec, problems);
    }
    if (cmd == "simulate-rabi" && spec.has_physical) {
      // The lab-device family maps onto a simulated model; flag sign flips.
      const double wr = 2.0 * (spec.resonator_ghz - spec.frame_ghz);
      const double wq = spec.qubit1_ghz - spec.qubit2_ghz;
      if (wr < 0)
        spec.warnings.push_back("device maps to a negative simulated mode "
                                "frequency omega_r^R/2pi = " +
                                std::to_string(wr) + " GHz");
      if (wq < 0)
        spec.warnings.push_back("device maps to a negative simulated qubit "
                                "frequency omega_q^R/2pi = " +
                                std::to_string(wq) + " GHz");
    }
  } else {
    parse_sweep_axes(doc, spec, problems);
  }
  problems.raise_if_any();

  spec.raw = std::move(doc);
  return spec;
}

json load_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string content = buf.str();

  // An empty file is an empty config; it fails later with the full
  // missing-key list rather than a parse error.
  if (content.find_first_not_of(" \t\r\n") == std::string::npos)
    return json::object();

  DupDetector det;
  if (!json::sax_parse(content, &det)) {
    if (!det.dup.empty())
      throw std::invalid_argument(path + ": duplicate key '" + det.dup + "'");
    throw std::invalid_argument(path + ": parse error: " + det.err);
  }
  return json::parse(content);
}

RunSpec parse_config(const std::string& path, const std::string& cli_command) {
  json doc = load_config_file(path);
  try {
    return parse_config_json(std::move(doc), cli_command);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

} // namespace digirabi::config
