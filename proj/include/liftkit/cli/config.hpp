#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "liftkit/cli/pipelines.hpp"
#include "liftkit/error.hpp"
#include "liftkit/solver.hpp"

namespace liftkit::cli {

/// Invalid command line or configuration content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parsed run configuration. `raw` keeps the merged JSON document (defaults,
/// file, overrides) and is what the manifest records.
struct ExperimentConfig {
  std::string command;
  nlohmann::json raw;
  /// Relative input paths resolve against this directory.
  std::filesystem::path base_dir;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  double lambda = 0.1;
  LabelAxes labels;
  SolverConfig solver;

  /// inputs.<key> as a path; throws ConfigError if absent.
  std::filesystem::path input(const std::string& key) const;
  /// <command>.<key>, or `fallback` when absent.
  template <class T>
  T option(const std::string& key, T fallback) const {
    const auto sec = raw.find(command);
    if (sec == raw.end() || !sec->is_object()) return fallback;
    const auto it = sec->find(key);
    if (it == sec->end() || it->is_null()) return fallback;
    try {
      return it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(command + "." + key + ": wrong type");
    }
  }
};

const std::vector<std::string>& command_names();

/// Built-in defaults of a command.
nlohmann::json default_config(const std::string& command);

/// Applies `key.path=value` to `doc`; the value is parsed as JSON and taken as
/// a plain string if that fails.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Merges `file` over the defaults, applies overrides, then validates:
/// label counts >= 2, min < max per axis, lambda > 0, solver settings in range.
ExperimentConfig make_config(const std::string& command, const nlohmann::json& file,
                             const std::filesystem::path& base_dir,
                             const std::vector<std::string>& overrides);

/// Reads a JSON file; throws ConfigError on I/O or parse failure.
nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace liftkit::cli
