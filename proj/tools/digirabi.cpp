// digirabi — digital simulation of quantum Rabi class models on a JC device.
//
// Usage: digirabi <command> --config <file> [--out dir] [--steps n]
//                 [--mode ideal|pulsed] [--workers n]
//
// Exit codes: 0 success, 1 runtime failure, 2 bad usage or config,
// 3 completed but truncation limited (policy "degraded").

#include "digirabi/config.hpp"
#include "digirabi/run.hpp"

#include <CLI11.hpp>

#include <exception>
#include <string>
#include <utility>

int main(int argc, char** argv) {
  namespace cfg = digirabi::config;
  namespace run = digirabi::run;

  CLI::App app{"digital quantum Rabi, Dicke and Dirac simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string mode;
  int steps = 0;
  int workers = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"simulate-rabi", "two-step digital quantum Rabi run"},
      {"simulate-dicke", "multi-qubit digital Dicke run"},
      {"simulate-dirac", "1+1d Dirac dynamics via the Rabi mapping"},
      {"resources", "norm bound, gate count bound, Trotter error estimate"},
      {"sweep", "Cartesian parameter sweep of another command"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--config", config_path, "JSON config file")->required();
    sc->add_option("--out", out_dir,
                   "output directory (overrides config and DIGIRABI_OUT)");
    sc->add_option("--steps", steps, "override trotter_steps");
    const std::string n = name;
    if (n != "resources")
      sc->add_option("--mode", mode, "override mode: ideal or pulsed");
    if (n == "sweep")
      sc->add_option("--workers", workers, "override sweep worker count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    run::emit_error_json("usage", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto passed = [&](const std::string& opt) {
    const CLI::Option* o = sub->get_option_no_throw(opt);
    return o != nullptr && o->count() > 0;
  };

  try {
    cfg::json doc = cfg::load_config_file(config_path);
    cfg::json overrides = cfg::json::object();
    if (passed("--steps"))
      overrides["trotter_steps"] = steps;
    if (passed("--mode"))
      overrides["mode"] = mode;
    if (passed("--workers"))
      overrides["workers"] = workers;
    cfg::RunSpec spec;
    try {
      spec = cfg::parse_config_json(std::move(doc), sub->get_name(), overrides);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(config_path + ": " + e.what());
    }
    return run::run(spec, out_dir);
  } catch (const std::invalid_argument& e) {
    run::emit_error_json("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    run::emit_error_json("runtime", e.what());
    return 1;
  }
}
