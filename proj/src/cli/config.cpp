#include "liftkit/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <type_traits>

namespace liftkit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json solver_defaults(int max_iters, double balance, double tol_gap) {
  const SolverConfig d;
  return json{{"max_iters", max_iters},   {"check_every", d.check_every},
              {"tol_feas", d.tol_feas},   {"tol_gap", tol_gap},
              {"step_balance", balance},  {"theta", d.theta},
              {"tau", d.tau},             {"sigma", d.sigma},
              {"opnorm_iters", d.opnorm_iters}};
}

json labels_json(std::vector<std::size_t> counts, std::vector<double> lo, std::vector<double> hi) {
  return json{{"counts", counts}, {"min", lo}, {"max", hi}};
}

template <class T>
T get_as(const std::string& path, const json& node) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + ": wrong type");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + key + ": missing");
  return *it;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"denoise", "stereo",   "flow",
                                              "register", "harmonic", "verify"};
  return names;
}

json default_config(const std::string& command) {
  json doc{{"seed", 0}, {"out", "out/" + command}, {"inputs", json::object()}};
  if (command == "denoise") {
    doc["labels"] = labels_json({16}, {0.0}, {1.0});
    doc["lambda"] = 0.1;
    doc["solver"] = solver_defaults(5000, 1.0, 1e-6);
    doc["denoise"] = {{"data", "abs"}, {"probe", nullptr}};
  } else if (command == "stereo") {
    doc["labels"] = labels_json({8}, {0.0}, {7.0});
    doc["lambda"] = 0.05;
    doc["solver"] = solver_defaults(5000, 1.0, 1e-6);
    doc["stereo"] = {{"window_radius", 2}, {"nu", 0.1}};
  } else if (command == "flow") {
    doc["labels"] = labels_json({5, 5}, {-2.0, -2.0}, {2.0, 2.0});
    doc["lambda"] = 0.05;
    doc["solver"] = solver_defaults(5000, 1.0, 1e-6);
  } else if (command == "register") {
    doc["labels"] = labels_json({9, 9}, {-4.0, -4.0}, {4.0, 4.0});
    doc["lambda"] = 0.1;
    doc["solver"] = solver_defaults(5000, 1.0, 1e-6);
    doc["register"] = {{"model", "laplacian"}};
  } else if (command == "harmonic") {
    doc["labels"] = labels_json({16}, {0.0}, {1.0});
    doc["lambda"] = 1.0;
    doc["solver"] = solver_defaults(20000, 3.0, 1e-7);
    doc["harmonic"] = {{"domain", json::array({18})},
                       {"spacing", nullptr},
                       {"corners", json::array({json::array({json::array({0, 1.0})}),
                                    json::array({json::array({15, 1.0})})})},
                       {"boundary", json::array()}};
  } else if (command == "verify") {
    doc["verify"] = {{"break_adjoint", false}};
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return doc;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) throw ConfigError("override '" + key + "': parent is not a section");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

json read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false, true);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config '" + path.string() + "' is not a JSON object");
  }
  return doc;
}

ExperimentConfig make_config(const std::string& command, const json& file,
                             const fs::path& base_dir, const std::vector<std::string>& overrides) {
  json doc = default_config(command);
  if (!file.is_null()) {
    if (!file.is_object()) throw ConfigError("config must be a JSON object");
    doc.merge_patch(file);
  }
  for (const auto& o : overrides) apply_override(doc, o);

  ExperimentConfig cfg;
  cfg.command = command;
  cfg.base_dir = base_dir;
  cfg.seed = get_as<std::uint64_t>("seed", require(doc, "seed", ""));
  cfg.out = get_as<std::string>("out", require(doc, "out", ""));
  if (cfg.out.empty()) throw ConfigError("out: empty output directory");
  if (!doc["inputs"].is_object()) throw ConfigError("inputs: must be a section");

  if (command != "verify") {
    cfg.lambda = get_as<double>("lambda", require(doc, "lambda", ""));
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
      throw ConfigError("lambda: must be positive and finite");
    }
    const json& lab = require(doc, "labels", "");
    cfg.labels.counts = get_as<std::vector<std::size_t>>("labels.counts",
                                                         require(lab, "counts", "labels."));
    cfg.labels.lo = get_as<std::vector<double>>("labels.min", require(lab, "min", "labels."));
    cfg.labels.hi = get_as<std::vector<double>>("labels.max", require(lab, "max", "labels."));
    const std::size_t s = cfg.labels.counts.size();
    if (s == 0 || cfg.labels.lo.size() != s || cfg.labels.hi.size() != s) {
      throw ConfigError("labels: counts, min and max need one entry per range axis");
    }
    for (std::size_t k = 0; k < s; ++k) {
      if (cfg.labels.counts[k] < 2) throw ConfigError("labels.counts: need at least 2 labels");
      if (!(cfg.labels.lo[k] < cfg.labels.hi[k]) || !std::isfinite(cfg.labels.hi[k]) ||
          !std::isfinite(cfg.labels.lo[k])) {
        throw ConfigError("labels: min must be below max on every axis");
      }
    }

    const json& sol = require(doc, "solver", "");
    SolverConfig& sc = cfg.solver;
    auto num = [&](const char* key, auto& dst) {
      const auto it = sol.find(key);
      if (it != sol.end()) {
        dst = get_as<std::decay_t<decltype(dst)>>(std::string("solver.") + key, *it);
      }
    };
    num("tau", sc.tau);
    num("sigma", sc.sigma);
    num("step_balance", sc.step_balance);
    num("theta", sc.theta);
    num("max_iters", sc.max_iters);
    num("check_every", sc.check_every);
    num("tol_feas", sc.tol_feas);
    num("tol_gap", sc.tol_gap);
    num("opnorm_iters", sc.opnorm_iters);
    sc.seed = cfg.seed;
    if (sc.max_iters < 1) throw ConfigError("solver.max_iters: must be >= 1");
    if (sc.check_every < 1) throw ConfigError("solver.check_every: must be >= 1");
    if (!(sc.step_balance > 0.0)) throw ConfigError("solver.step_balance: must be positive");
    if (sc.tau < 0.0 || sc.sigma < 0.0) throw ConfigError("solver.tau/sigma: must be >= 0");
    if (!(sc.tol_feas > 0.0) || !(sc.tol_gap >= 0.0)) {
      throw ConfigError("solver tolerances: must be positive");
    }
    if (sc.opnorm_iters < 10) throw ConfigError("solver.opnorm_iters: must be >= 10");
  }
  cfg.raw = std::move(doc);
  return cfg;
}

fs::path ExperimentConfig::input(const std::string& key) const {
  const auto& in = raw.at("inputs");
  const auto it = in.find(key);
  if (it == in.end() || !it->is_string()) {
    throw ConfigError("inputs." + key + ": missing path");
  }
  fs::path p = it->get<std::string>();
  if (p.is_relative()) p = base_dir / p;
  return p;
}

}  // namespace liftkit::cli
