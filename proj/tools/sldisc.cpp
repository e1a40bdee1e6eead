#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sldisc/sldisc.h"

namespace {

// Exit codes: 0 success, 1 domain error, 2 IO or configuration error.
int exit_code(sldisc_status s) {
  switch (s) {
    case SLDISC_OK: return 0;
    case SLDISC_ERR_DOMAIN:
    case SLDISC_ERR_INTERNAL: return 1;
    default: return 2;
  }
}

int report_failure(sldisc_status s) {
  std::fprintf(stderr, "error: %s\n", sldisc_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse problems for Sturm-Liouville operators with a discontinuity"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  std::string out_dir = "out";
  // config key (the flag spells it with dashes) and its optional value
  std::vector<std::pair<std::string, std::optional<std::string>>> overrides{
      {"num_eigenvalues", {}}, {"epsilon", {}},    {"seed", {}},       {"tail_start", {}},
      {"truncation", {}},      {"borg_modes", {}}, {"borg_pairs", {}}};

  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  const char* help[] = {"number of eigenvalues to compute",
                        "spectral perturbation size (invert) or single sweep epsilon (stability)",
                        "random seed",
                        "first index of the asymptotic tail window",
                        "Galerkin truncation of the main equation",
                        "cosine modes of the two-spectra fit",
                        "label pairs entering the two-spectra fit"};
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    std::string flag = "--" + overrides[i].first;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    app.add_option(flag, overrides[i].second, help[i]);
  }

  const std::vector<std::pair<const char*, const char*>> commands{
      {"forward", "eigenvalues of the configured problem"},
      {"invert", "full-spectrum inversion: recover q1, h1, a2 from a full spectrum at d = 1/2"},
      {"invert-partial", "partial-spectrum inversion: recover q1, h1 from a sub-spectrum at d < 1/2"},
      {"roundtrip", "forward spectrum, inversion, and errors against the configured truth"},
      {"stability", "perturbation sweep of the full-spectrum round trip"},
      {"basis-check", "Riesz basis and completeness diagnostics"}};
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  sldisc_config* cfg = nullptr;
  sldisc_status s = config_path.empty() ? sldisc_config_create(&cfg)
                                        : sldisc_config_load(config_path.c_str(), &cfg);
  if (s != SLDISC_OK) return report_failure(s);
  for (const auto& [key, value] : overrides) {
    if (!value) continue;
    s = sldisc_config_set(cfg, key.c_str(), value->c_str());
    if (s != SLDISC_OK) {
      sldisc_config_destroy(cfg);
      return report_failure(s);
    }
  }

  char* report = nullptr;
  s = sldisc_run(cfg, app.get_subcommands().front()->get_name().c_str(), out_dir.c_str(), &report);
  sldisc_config_destroy(cfg);
  if (s != SLDISC_OK) return report_failure(s);
  std::fputs(report, stdout);
  sldisc_string_free(report);
  return 0;
}
