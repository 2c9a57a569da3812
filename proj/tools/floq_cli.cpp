#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "floq/floq.h"

namespace {

struct Common {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // config key -> raw value
  bool print_config = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_file, "INI config or sweep plan file");
  cmd->add_option("--preset", c.preset, "figure preset: fig1 ... fig6");
  cmd->add_option("--set", c.sets, "override any key: section.key=value")->take_all();
  cmd->add_flag("--print-config", c.print_config, "print the resolved config and exit");
  const std::vector<std::pair<std::string, std::string>> shortcuts = {
      {"--L", "chain.L"},
      {"--J", "chain.J"},
      {"--g", "chain.g"},
      {"--lambda", "chain.lambda"},
      {"--kernel-mode", "chain.kernel_mode"},
      {"--a1", "drive.a1"},
      {"--a2", "drive.a2"},
      {"--tau", "drive.tau"},
      {"--T", "drive.T"},
      {"--horizon", "solver.horizon"},
      {"--step", "solver.h"},
      {"--refinements", "solver.refinements"},
      {"--samples-per-period", "solver.samples_per_period"},
      {"--solver", "solver.spectrum_solver"},
      {"-o,--output", "output.dir"},
      {"--workers", "sweep.workers"},
  };
  for (const auto& [flag, key] : shortcuts) {
    cmd->add_option_function<std::string>(
        flag, [&c, key = key](const std::string& v) { c.flags[key] = v; }, "sets " + key);
  }
}

int fail(floq_status s) {
  std::cerr << floq_last_error_json() << std::endl;
  return floq_exit_code(s);
}

int fail_usage(const std::string& message) {
  nlohmann::json j = {{"code", 2}, {"error", "validation"}, {"message", message}, {"exit_code", 2}};
  std::cerr << j.dump() << std::endl;
  return 2;
}

int build_config(const Common& c, floq_config** out) {
  floq_status s = FLOQ_OK;
  if (!c.config_file.empty()) {
    std::ifstream in(c.config_file);
    if (!in) {
      nlohmann::json j = {{"code", 4}, {"error", "io"}, {"message", "cannot read " + c.config_file}, {"exit_code", 4}};
      std::cerr << j.dump() << std::endl;
      return 4;
    }
    std::stringstream text;
    text << in.rdbuf();
    // A preset given on the command line replaces one in the file; file keys still apply on top.
    std::string body = text.str();
    if (!c.preset.empty()) body += "\npreset = " + c.preset + "\n";
    s = floq_config_parse(body.c_str(), out);
  } else if (!c.preset.empty()) {
    s = floq_config_preset(c.preset.c_str(), out);
  } else {
    s = floq_config_new(out);
  }
  if (s != FLOQ_OK) return fail(s);
  for (const auto& [key, value] : c.flags) {
    if ((s = floq_config_set(*out, key.c_str(), value.c_str())) != FLOQ_OK) return fail(s);
  }
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) return fail_usage("--set expects section.key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if ((s = floq_config_set(*out, key.c_str(), value.c_str())) != FLOQ_OK) return fail(s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven impurity on an XX chain: exact dynamics, quasienergy spectra, bound states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(floq_version()));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"dynamics", "exact P_t (lattice) with a Volterra cross-check"},
      {"spectrum", "quasienergy spectrum with bound-mode classification"},
      {"fbs", "bound-state steady state, site profile and harmonics"},
      {"filter", "filtering prediction against the exact dynamics"},
      {"sweep", "parameter sweep with the bound-state / plateau correlation"},
      {"converge", "drift under step halving, K growth and L doubling"},
  };
  std::map<std::string, Common> common;
  std::map<std::string, CLI::App*> subs;
  std::string a2_scan;
  std::string plan_file;
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, common[name]);
    subs[name] = cmd;
  }
  subs["spectrum"]->add_option("--a2-scan", a2_scan, "start:stop:step over a2");
  subs["sweep"]->add_option("plan", plan_file, "sweep plan (same format as --config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail_usage(e.what());
  }

  for (const auto& [name, help] : commands) {
    if (!subs[name]->parsed()) continue;
    Common& c = common[name];
    if (name == "sweep" && !plan_file.empty()) {
      if (!c.config_file.empty()) return fail_usage("give the sweep plan either positionally or with --config");
      c.config_file = plan_file;
    }
    floq_config* cfg = nullptr;
    if (const int rc = build_config(c, &cfg); rc != 0) {
      floq_config_free(cfg);
      return rc;
    }
    if (c.print_config) {
      std::cout << floq_config_serialize(cfg);
      floq_config_free(cfg);
      return 0;
    }
    std::string options;
    if (!a2_scan.empty()) options = nlohmann::json{{"a2_scan", a2_scan}}.dump();
    const char* summary = nullptr;
    const floq_status s = floq_run_command(cfg, name.c_str(), options.empty() ? nullptr : options.c_str(), &summary);
    if (s != FLOQ_OK) {
      floq_config_free(cfg);
      return fail(s);
    }
    std::cout << nlohmann::json::parse(summary).dump(2) << std::endl;
    floq_config_free(cfg);
    return 0;
  }
  return 2;
}
