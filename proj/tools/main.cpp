#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "varlp/config.hpp"
#include "varlp/image_io.hpp"
#include "varlp/solver.hpp"

namespace {

// Exit codes: 0 ok, 2 configuration, 3 numerical failure, 4 I/O.
constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;
constexpr int kIoExit = 4;

void print_keys(const std::string& command) {
  std::printf("%-24s %-12s %s\n", "key", "default", "description");
  for (const varlp::KeySpec& ks : varlp::cli::schema_for(command)) {
    const std::string def = ks.default_value ? (ks.default_value->empty() ? "\"\"" : *ks.default_value)
                                             : "(required)";
    std::printf("%-24s %-12s %s\n", ks.key.c_str(), def.c_str(), ks.description.c_str());
  }
}

int dispatch(const std::string& command, const std::string& config_path,
             const std::vector<std::string>& overrides) {
  varlp::ConfigMap map = config_path.empty() ? varlp::ConfigMap()
                                             : varlp::ConfigMap::from_file(config_path);
  for (const std::string& assignment : overrides) map.set_override(assignment);
  const varlp::ResolvedConfig cfg(map, varlp::cli::schema_for(command));
  return varlp::cli::run(command, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variable-exponent total variation toolkit"};
  app.require_subcommand(1);

  struct SubState {
    std::string config_path;
    std::vector<std::string> overrides;
    bool keys = false;
  };
  static const std::vector<std::pair<std::string, std::string>> verbs = {
      {"phantom", "write the piecewise-linear square test image"},
      {"exponent", "build an exponent map from an image and dump its stages"},
      {"denoise", "remove Gaussian noise with tv, tvp, tgv2 or tikhonov"},
      {"tomo", "fan-beam sinogram, FBP and variational reconstruction"},
      {"bench", "kernel micro-benchmarks"}};

  std::vector<SubState> states(verbs.size());
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    CLI::App* sub = app.add_subcommand(verbs[i].first, verbs[i].second);
    sub->add_option("-c,--config", states[i].config_path, "configuration file (key = value lines)");
    sub->add_option("-s,--set", states[i].overrides, "override one key (key=value, repeatable)");
    sub->add_flag("--keys", states[i].keys, "list the command's configuration keys and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  std::size_t idx = 0;
  while (verbs[idx].first != chosen->get_name()) ++idx;

  try {
    if (states[idx].keys) {
      print_keys(verbs[idx].first);
      return 0;
    }
    return dispatch(verbs[idx].first, states[idx].config_path, states[idx].overrides);
  } catch (const varlp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const varlp::NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumericExit;
  } catch (const varlp::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kIoExit;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
