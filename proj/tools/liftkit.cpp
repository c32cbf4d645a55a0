#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liftkit/cli/commands.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool break_adjoint = false;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Options& opt) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out, "Output directory (overrides 'out')");
  sub->add_option("--seed", opt.seed, "Random seed (overrides 'seed')");
  sub->add_option("--set", opt.overrides, "Override a config entry, key.path=value")
      ->allow_extra_args(false);
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace liftkit::cli;

  CLI::App app{"Lifted convex relaxations of variational imaging problems"};
  app.require_subcommand(1);
  Options opt;
  add_command(app, "denoise", "Scalar TV denoising of an image", opt);
  add_command(app, "stereo", "Disparity estimation from a rectified pair", opt);
  add_command(app, "flow", "Optical flow with 2D displacement labels", opt);
  add_command(app, "register", "Image registration with curvature regularization", opt);
  add_command(app, "harmonic", "Harmonic interpolation of measure-valued boundaries", opt);
  CLI::App* verify = add_command(app, "verify", "Run the property battery", opt);
  verify->add_flag("--break-adjoint", opt.break_adjoint,
                   "Perturb every adjoint (negative control; must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json file;
    std::filesystem::path base = std::filesystem::current_path();
    if (!opt.config.empty()) {
      file = read_config_file(opt.config);
      base = std::filesystem::absolute(opt.config).parent_path();
    }
    std::vector<std::string> overrides = opt.overrides;
    if (!opt.out.empty()) overrides.push_back("out=\"" + opt.out + "\"");
    if (opt.seed) overrides.push_back("seed=" + std::to_string(*opt.seed));
    if (opt.break_adjoint) overrides.push_back("verify.break_adjoint=true");
    ExperimentConfig cfg = make_config(command, file, base, overrides);
    // --out is relative to the working directory, a config 'out' to the file.
    if (opt.out.empty() && cfg.out.is_relative()) cfg.out = base / cfg.out;
    return run_command(cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
