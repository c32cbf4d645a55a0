#include "liftkit/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "liftkit/cli/io.hpp"
#include "liftkit/verify/battery.hpp"

namespace liftkit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path prepare_out(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  return cfg.out;
}

json report_json(const PipelineResult& r) {
  const SolveReport& rep = r.report;
  json viol = json::object();
  for (const auto& [name, v] : rep.violations) viol[name] = v;
  return json{{"iterations", rep.iterations},
              {"converged", rep.converged},
              {"energy", rep.energy},
              {"residual", rep.residual},
              {"violations", viol},
              {"energy_monotone", rep.energy_monotone},
              {"opnorm", rep.opnorm},
              {"tau", rep.tau},
              {"sigma", rep.sigma}};
}

json solver_json(const SolverConfig& s) {
  return json{{"tau", s.tau},           {"sigma", s.sigma},
              {"step_balance", s.step_balance}, {"theta", s.theta},
              {"max_iters", s.max_iters}, {"check_every", s.check_every},
              {"tol_feas", s.tol_feas}, {"tol_gap", s.tol_gap},
              {"seed", s.seed},         {"opnorm_iters", s.opnorm_iters}};
}

// report.csv, mu.lkf and manifest.json; returns the exit code of the run.
int finish(const ExperimentConfig& cfg, const fs::path& out, const PipelineResult& r,
           json summary, std::ostream& log) {
  {
    std::ofstream os(out / "report.csv");
    r.report.write_csv(os);
    if (!os) throw FormatError("cannot write " + (out / "report.csv").string());
  }
  io::save_lifted(out / "mu.lkf", r.mu);

  const std::size_t primal = r.primal.total_size();
  json grid{{"domain_shape", r.grid.domain_shape()},
            {"label_counts", r.grid.range_shape()},
            {"points", r.grid.num_points()}};
  json manifest{{"command", cfg.command},
                {"config", cfg.raw},
                {"solver", solver_json(cfg.solver)},
                {"report", report_json(r)},
                {"grid", grid},
                {"memory_estimate_bytes", 8 * (3 * primal + 2 * r.dual_size)},
                {"summary", std::move(summary)}};
  std::ofstream os(out / "manifest.json");
  os << manifest.dump(2) << '\n';
  if (!os) throw FormatError("cannot write " + (out / "manifest.json").string());

  log << cfg.command << ": " << r.report.iterations << " iterations, energy "
      << r.report.energy << ", residual " << r.report.residual
      << (r.report.converged ? ", converged" : ", not converged") << " ("
      << r.report.wall_seconds << " s)\n";
  return r.report.converged ? kExitOk : kExitNotConverged;
}

// Maps u from the label box of axis k to [0, 1].
Image normalized(const GraphFunction& u, const ProductGrid& grid, std::size_t k, std::size_t h,
                 std::size_t w) {
  Image im(h, w);
  const double lo = grid.range_min(k), hi = grid.range_max(k);
  for (std::size_t x = 0; x < h * w; ++x) im.data[x] = (u.values(k, x) - lo) / (hi - lo);
  return im;
}

// One row per pixel: row, col, then the components of u.
void write_field_csv(const fs::path& path, const GraphFunction& u, std::size_t width,
                     const std::vector<std::string>& names) {
  std::vector<std::string> header{"row", "col"};
  header.insert(header.end(), names.begin(), names.end());
  const std::size_t n = u.values.size() / u.range_dims();
  std::vector<std::vector<double>> rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    rows[x] = {static_cast<double>(x / width), static_cast<double>(x % width)};
    for (std::size_t k = 0; k < u.range_dims(); ++k) rows[x].push_back(u.values(k, x));
  }
  io::write_csv(path, header, rows);
}

ImagePair read_pair(const ExperimentConfig& cfg, const char* a, const char* b) {
  ImagePair pair{io::read_image(cfg.input(a)), io::read_image(cfg.input(b))};
  pair.validate();
  return pair;
}

MassList parse_masses(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of [label, mass]");
  MassList out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        e[0].get<long long>() < 0 || !e[1].is_number()) {
      throw ConfigError(where + ": entries must be [label, mass]");
    }
    out.emplace_back(e[0].get<std::size_t>(), e[1].get<double>());
  }
  return out;
}

}  // namespace

int cmd_denoise(const ExperimentConfig& cfg, std::ostream& log) {
  DenoiseParams params;
  params.labels = cfg.labels;
  params.lambda = cfg.lambda;
  params.solver = cfg.solver;
  const std::string data = cfg.option<std::string>("data", "abs");
  if (data == "abs") {
    params.data = DenoiseData::Absolute;
  } else if (data == "squared") {
    params.data = DenoiseData::Squared;
  } else {
    throw ConfigError("denoise.data: expected 'abs' or 'squared'");
  }
  const Image g = io::read_image(cfg.input("image"));
  std::vector<std::size_t> probe =
      cfg.option<std::vector<std::size_t>>("probe", {g.height / 2, g.width / 2});
  if (probe.size() != 2 || probe[0] >= g.height || probe[1] >= g.width) {
    throw ConfigError("denoise.probe: expected [row, col] inside the image");
  }

  const PipelineResult r = denoise(g, params);
  const fs::path out = prepare_out(cfg);
  io::write_png(out / "denoised.png", normalized(r.u, r.grid, 0, g.height, g.width));
  write_field_csv(out / "denoised.csv", r.u, g.width, {"u"});

  const std::size_t px = probe[0] * g.width + probe[1];
  std::vector<std::vector<double>> hist;
  for (std::size_t l = 0; l < r.grid.num_labels(); ++l) {
    hist.push_back({static_cast<double>(l), r.grid.label_coord(l, 0),
                    r.primal[0](0, r.grid.point(px, l))});
  }
  io::write_csv(out / "probe_histogram.csv", {"label", "z", "mass"}, hist);
  return finish(cfg, out, r, json{{"probe", probe}}, log);
}

int cmd_stereo(const ExperimentConfig& cfg, std::ostream& log) {
  StereoParams params;
  params.labels = cfg.labels;
  params.lambda = cfg.lambda;
  params.solver = cfg.solver;
  params.window_radius = cfg.option<int>("window_radius", params.window_radius);
  params.nu = cfg.option<double>("nu", params.nu);
  const ImagePair pair = read_pair(cfg, "left", "right");

  const PipelineResult r = stereo(pair, params);
  const fs::path out = prepare_out(cfg);
  const std::size_t h = pair.first.height, w = pair.first.width;
  io::write_png(out / "disparity.png", normalized(r.u, r.grid, 0, h, w));
  write_field_csv(out / "disparity.csv", r.u, w, {"disparity"});
  return finish(cfg, out, r, json::object(), log);
}

int cmd_flow(const ExperimentConfig& cfg, std::ostream& log) {
  FlowParams params;
  params.labels = cfg.labels;
  params.lambda = cfg.lambda;
  params.solver = cfg.solver;
  const ImagePair pair = read_pair(cfg, "first", "second");

  const PipelineResult r = flow(pair, params);
  const fs::path out = prepare_out(cfg);
  write_field_csv(out / "flow.csv", r.u, pair.first.width, {"u_row", "u_col"});
  io::write_png(out / "flow.png", flow_to_rgb(r.u));
  return finish(cfg, out, r, json::object(), log);
}

int cmd_register(const ExperimentConfig& cfg, std::ostream& log) {
  RegisterParams params;
  params.labels = cfg.labels;
  params.lambda = cfg.lambda;
  params.solver = cfg.solver;
  const std::string model = cfg.option<std::string>("model", "laplacian");
  if (model == "laplacian") {
    params.model = RegisterModel::Laplacian;
  } else if (model == "tv") {
    params.model = RegisterModel::FirstOrder;
  } else {
    throw ConfigError("register.model: expected 'laplacian' or 'tv'");
  }
  const ImagePair pair = read_pair(cfg, "template", "reference");

  const RegisterResult r = register_images(pair, params);
  const fs::path out = prepare_out(cfg);
  write_field_csv(out / "deformation.csv", r.run.u, pair.first.width, {"u_row", "u_col"});
  io::write_png(out / "warped.png", r.warped);
  io::write_png(out / "difference.png", r.difference);

  double m0 = 0.0, m1 = 0.0;
  const std::size_t n = r.run.grid.num_pixels();
  for (std::size_t x = 0; x < n; ++x) {
    m0 += r.run.u.values(0, x);
    m1 += r.run.u.values(1, x);
  }
  json summary{{"error_before", r.error_before},
               {"error_after", r.error_after},
               {"mean_displacement", {m0 / n, m1 / n}},
               {"laplacian_magnitude", laplacian_magnitude(r.run.u)}};
  log << "register: L1 error " << r.error_before << " -> " << r.error_after << '\n';
  return finish(cfg, out, r.run, std::move(summary), log);
}

int cmd_harmonic(const ExperimentConfig& cfg, std::ostream& log) {
  HarmonicParams params;
  params.labels = cfg.labels;
  params.weight = cfg.lambda;
  params.solver = cfg.solver;
  params.domain = cfg.option<std::vector<std::size_t>>("domain", params.domain);
  params.spacing = cfg.option<std::vector<double>>("spacing", {});
  const json& sec = cfg.raw.at("harmonic");
  if (const auto it = sec.find("corners"); it != sec.end() && !it->is_null()) {
    if (!it->is_array()) throw ConfigError("harmonic.corners: expected a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      params.corners.push_back(parse_masses((*it)[i], "harmonic.corners"));
    }
  }
  if (const auto it = sec.find("boundary"); it != sec.end() && !it->is_null()) {
    if (!it->is_array()) throw ConfigError("harmonic.boundary: expected a list");
    for (const auto& e : *it) {
      if (!e.is_object() || !e.contains("pixel") || !e.contains("masses")) {
        throw ConfigError("harmonic.boundary: entries need 'pixel' and 'masses'");
      }
      BoundaryEntry b;
      try {
        b.pixel = e.at("pixel").get<std::vector<std::size_t>>();
      } catch (const json::exception&) {
        throw ConfigError("harmonic.boundary: pixel must be a list of indices");
      }
      b.masses = parse_masses(e.at("masses"), "harmonic.boundary");
      params.boundary.push_back(std::move(b));
    }
  }
  if (!params.spacing.empty() && params.spacing.size() != params.domain.size()) {
    throw ConfigError("harmonic.spacing: one entry per domain axis");
  }

  const HarmonicResult r = harmonic(params);
  const fs::path out = prepare_out(cfg);
  const ProductGrid& grid = r.run.grid;
  const std::size_t L = grid.num_labels();
  const std::size_t width = params.domain.back();
  const std::size_t height = params.domain.size() == 2 ? params.domain[0] : 1;
  write_field_csv(out / "mean.csv", r.run.u, width, {"u"});

  double peak = 0.0;
  for (std::size_t t = 0; t < grid.num_points(); ++t) peak = std::max(peak, r.run.primal[0](0, t));
  const double scale = peak > 0.0 ? 1.0 / peak : 1.0;
  if (height == 1) {
    // Labels along rows (top = largest label), pixels along columns.
    Image im(L, width);
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t l = 0; l < L; ++l) {
        im.at(L - 1 - l, x) = r.run.primal[0](0, grid.point(x, l)) * scale;
      }
    }
    io::write_png(out / "mu.png", im);
  } else {
    for (std::size_t l = 0; l < L; ++l) {
      Image im(height, width);
      for (std::size_t x = 0; x < height * width; ++x) {
        im.data[x] = r.run.primal[0](0, grid.point(x, l)) * scale;
      }
      char name[48];
      std::snprintf(name, sizeof name, "mu_label_%03zu.png", l);
      io::write_png(out / name, im);
    }
    io::write_png(out / "mean.png", normalized(r.run.u, grid, 0, height, width));
  }
  return finish(cfg, out, r.run, json::object(), log);
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log) {
  verify::BatteryOptions opt;
  opt.seed = cfg.seed;
  opt.break_adjoint = cfg.option<bool>("break_adjoint", false);
  const auto results = verify::run_property_battery(opt);

  bool ok = true;
  const fs::path out = prepare_out(cfg);
  std::ofstream csv(out / "verify.csv");
  csv << "check,status,gating,measured\n";
  for (const auto& r : results) {
    const char* status = r.passed ? "PASS" : (r.gating ? "FAIL" : "INFO");
    ok = ok && (r.passed || !r.gating);
    log << std::left << std::setw(36) << r.name << std::setw(6) << status << r.measured << " ("
        << std::fixed << std::setprecision(2) << r.seconds << " s)" << std::defaultfloat
        << std::setprecision(6) << '\n';
    csv << r.name << ',' << status << ',' << (r.gating ? 1 : 0) << ",\"" << r.measured << "\"\n";
  }
  if (!csv) throw FormatError("cannot write " + (out / "verify.csv").string());
  json manifest{{"command", cfg.command}, {"config", cfg.raw}, {"passed", ok}};
  std::ofstream(out / "manifest.json") << manifest.dump(2) << '\n';
  log << (ok ? "all checks passed" : "verification FAILED") << '\n';
  return ok ? kExitOk : kExitNotConverged;
}

int run_command(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    if (cfg.command == "denoise") return cmd_denoise(cfg, log);
    if (cfg.command == "stereo") return cmd_stereo(cfg, log);
    if (cfg.command == "flow") return cmd_flow(cfg, log);
    if (cfg.command == "register") return cmd_register(cfg, log);
    if (cfg.command == "harmonic") return cmd_harmonic(cfg, log);
    if (cfg.command == "verify") return cmd_verify(cfg, log);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace liftkit::cli
