#include "liftkit/cli/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "liftkit/error.hpp"
#include "liftkit/integrand.hpp"

namespace liftkit::cli {

namespace {

void check_labels(const LabelAxes& labels, std::size_t s, const char* who) {
  if (labels.counts.size() != s || labels.lo.size() != s || labels.hi.size() != s) {
    throw DimensionError(std::string(who) + ": expected " + std::to_string(s) +
                         " label axes");
  }
}

PipelineResult run(SaddleProblem problem, const SolverConfig& cfg) {
  SolveResult res = solve(problem, cfg);
  LiftedMeasure mu = lifted_measure(problem, res.primal);
  GraphFunction u = unlift(mu);
  return PipelineResult{problem.grid, std::move(res.primal), std::move(res.report), std::move(mu),
                        std::move(u), res.dual.total_size()};
}

PipelineResult run_first_order(const ProductGrid& grid, std::vector<double> cost, double lambda,
                               const SolverConfig& cfg) {
  const Integrand tv(RegularizerKind::NuclearNorm, {grid.domain_dims(), grid.range_dims()}, {0.0},
                     lambda);
  return run(assemble_first_order(grid, tv, std::move(cost)), cfg);
}

ProductGrid pair_grid(const ImagePair& pair, const LabelAxes& labels) {
  pair.validate();
  return image_grid(pair.first, labels);
}

}  // namespace

ProductGrid image_grid(const Image& im, const LabelAxes& labels) {
  if (im.height == 0 || im.width == 0) throw DimensionError("image_grid: empty image");
  std::vector<std::size_t> shape;
  if (im.height == 1) {
    shape = {im.width};
  } else {
    shape = {im.height, im.width};
  }
  std::vector<double> spacing(shape.size(), 1.0);
  return ProductGrid::uniform(std::move(shape), std::move(spacing), labels.lo, labels.hi,
                              labels.counts);
}

Image to_gray(const Image& im) {
  Image g(im.height, im.width, 1);
  for (std::size_t i = 0; i < im.height * im.width; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < im.channels; ++c) s += im.data[i * im.channels + c];
    g.data[i] = s / static_cast<double>(im.channels);
  }
  return g;
}

PipelineResult denoise(const Image& g, const DenoiseParams& params) {
  check_labels(params.labels, 1, "denoise");
  const Image gray = to_gray(g);
  const ProductGrid grid = image_grid(gray, params.labels);
  std::vector<double> cost(grid.num_points());
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      const double r = grid.label_coord(l, 0) - gray.data[x];
      cost[grid.point(x, l)] = params.data == DenoiseData::Squared ? r * r : std::fabs(r);
    }
  }
  return run_first_order(grid, std::move(cost), params.lambda, params.solver);
}

PipelineResult stereo(const ImagePair& pair, const StereoParams& params) {
  check_labels(params.labels, 1, "stereo");
  const ProductGrid grid = pair_grid(pair, params.labels);
  CostVolume cv = stereo_cost(pair, grid, params.window_radius, params.nu);
  return run_first_order(grid, std::move(cv.values), params.lambda, params.solver);
}

PipelineResult flow(const ImagePair& pair, const FlowParams& params) {
  check_labels(params.labels, 2, "flow");
  const ProductGrid grid = pair_grid(pair, params.labels);
  CostVolume cv = l1_cost(pair, grid);
  return run_first_order(grid, std::move(cv.values), params.lambda, params.solver);
}

RegisterResult register_images(const ImagePair& pair, const RegisterParams& params) {
  check_labels(params.labels, 2, "register");
  const ProductGrid grid = pair_grid(pair, params.labels);
  if (grid.domain_dims() != 2) throw DimensionError("register: images need at least two rows");
  CostVolume cv = l1_cost(pair, grid);

  const Integrand intg(RegularizerKind::SquaredL2Half, {2}, {0.0}, params.lambda);
  PipelineResult res =
      params.model == RegisterModel::Laplacian
          ? run(assemble_laplacian(grid, intg, std::move(cv.values)), params.solver)
          : run_first_order(grid, std::move(cv.values), params.lambda, params.solver);

  const Image& T = pair.first;
  const Image& R = pair.second;
  RegisterResult out{std::move(res), Image(T.height, T.width, T.channels),
                     Image(T.height, T.width, T.channels)};
  for (std::size_t r = 0; r < T.height; ++r) {
    for (std::size_t c = 0; c < T.width; ++c) {
      const std::size_t x = r * T.width + c;
      const double dr = out.run.u.values(0, x);
      const double dc = out.run.u.values(1, x);
      for (std::size_t ch = 0; ch < T.channels; ++ch) {
        const double w = T.bilinear(static_cast<double>(r) + dr, static_cast<double>(c) + dc, ch);
        out.warped.at(r, c, ch) = w;
        out.difference.at(r, c, ch) = std::fabs(w - R.at(r, c, ch));
        out.error_before += std::fabs(T.at(r, c, ch) - R.at(r, c, ch));
        out.error_after += out.difference.at(r, c, ch);
      }
    }
  }
  return out;
}

namespace {

// Density of one pixel from a mass list, written into `b`.
void set_masses(LiftedMeasure& b, std::size_t pixel, const MassList& masses) {
  const ProductGrid& grid = b.grid;
  for (std::size_t l = 0; l < grid.num_labels(); ++l) b.values(0, grid.point(pixel, l)) = 0.0;
  for (const auto& [label, mass] : masses) {
    if (label >= grid.num_labels()) {
      throw RangeError("harmonic: label " + std::to_string(label) + " out of range");
    }
    b.values(0, grid.point(pixel, label)) += mass / grid.label_volume();
  }
}

// Harmonic interpolation along a 1D line of n points between two mass lists;
// returns the n per-pixel mass lists.
std::vector<MassList> solve_edge(std::size_t n, const HarmonicParams& params, const MassList& a,
                                 const MassList& b) {
  const auto grid = ProductGrid::uniform({n}, {1.0 / static_cast<double>(n - 1)},
                                         params.labels.lo, params.labels.hi,
                                         params.labels.counts);
  LiftedMeasure bd(grid);
  set_masses(bd, 0, a);
  set_masses(bd, n - 1, b);
  const SaddleProblem p = assemble_harmonic(grid, bd, params.weight);
  const SolveResult res = solve(p, params.solver);
  std::vector<MassList> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0.0;
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      total += std::max(0.0, res.primal[0](0, grid.point(x, l)));
    }
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      const double m = std::max(0.0, res.primal[0](0, grid.point(x, l)));
      if (m > 0.0) out[x].emplace_back(l, m / total);
    }
  }
  return out;
}

}  // namespace

HarmonicResult harmonic(const HarmonicParams& params) {
  const std::size_t d = params.domain.size();
  if (d == 0 || d > 2) {
    throw UnsupportedConfigurationError("harmonic: domain must be 1D or 2D");
  }
  std::vector<double> spacing = params.spacing;
  if (spacing.empty()) {
    for (std::size_t n : params.domain) {
      spacing.push_back(n > 1 ? 1.0 / static_cast<double>(n - 1) : 1.0);
    }
  }
  const auto grid = ProductGrid::uniform(params.domain, spacing, params.labels.lo,
                                         params.labels.hi, params.labels.counts);
  LiftedMeasure boundary(grid);

  if (!params.corners.empty()) {
    if (d == 1) {
      if (params.corners.size() != 2) {
        throw DimensionError("harmonic: a 1D domain takes two end-point measures");
      }
      set_masses(boundary, 0, params.corners[0]);
      set_masses(boundary, params.domain[0] - 1, params.corners[1]);
    } else {
      if (params.corners.size() != 4) {
        throw DimensionError("harmonic: a 2D domain takes four corner measures");
      }
      const std::size_t H = params.domain[0], W = params.domain[1];
      const auto& c = params.corners;
      const auto top = solve_edge(W, params, c[0], c[1]);
      const auto bottom = solve_edge(W, params, c[2], c[3]);
      const auto left = solve_edge(H, params, c[0], c[2]);
      const auto right = solve_edge(H, params, c[1], c[3]);
      for (std::size_t j = 0; j < W; ++j) {
        set_masses(boundary, j, top[j]);
        set_masses(boundary, (H - 1) * W + j, bottom[j]);
      }
      for (std::size_t i = 1; i + 1 < H; ++i) {
        set_masses(boundary, i * W, left[i]);
        set_masses(boundary, i * W + W - 1, right[i]);
      }
    }
  }
  for (const BoundaryEntry& e : params.boundary) {
    if (e.pixel.size() != d) throw DimensionError("harmonic: boundary pixel has wrong rank");
    for (std::size_t i = 0; i < d; ++i) {
      if (e.pixel[i] >= params.domain[i]) throw RangeError("harmonic: boundary pixel outside domain");
    }
    const std::size_t px = grid.pixel_from_indices(e.pixel);
    if (!grid.pixel_on_boundary(px)) {
      throw RangeError("harmonic: pixel " + std::to_string(px) + " is not on the boundary");
    }
    set_masses(boundary, px, e.masses);
  }

  SaddleProblem p = assemble_harmonic(grid, boundary, params.weight);
  HarmonicResult out{run(std::move(p), params.solver), std::move(boundary)};
  return out;
}

double laplacian_magnitude(const GraphFunction& u) {
  const auto& shape = u.domain_shape;
  const std::size_t d = shape.size();
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t i = d; i-- > 1;) stride[i - 1] = stride[i] * shape[i];
  const std::size_t n = u.values.size() / std::max<std::size_t>(1, u.range_dims());
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    bool interior = true;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t idx = (x / stride[i]) % shape[i];
      interior = interior && idx > 0 && idx + 1 < shape[i];
    }
    if (!interior) continue;
    for (std::size_t k = 0; k < u.range_dims(); ++k) {
      double lap = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        lap += u.values(k, x + stride[i]) - 2.0 * u.values(k, x) + u.values(k, x - stride[i]);
      }
      total += std::fabs(lap);
    }
  }
  return total;
}

Image flow_to_rgb(const GraphFunction& u) {
  if (u.range_dims() != 2 || u.domain_shape.size() != 2) {
    throw DimensionError("flow_to_rgb: expects a 2D field with two components");
  }
  const std::size_t H = u.domain_shape[0], W = u.domain_shape[1];
  double vmax = 0.0;
  for (std::size_t x = 0; x < H * W; ++x) {
    vmax = std::max(vmax, std::hypot(u.values(0, x), u.values(1, x)));
  }
  Image out(H, W, 3);
  for (std::size_t x = 0; x < H * W; ++x) {
    const double dy = u.values(0, x), dx = u.values(1, x);
    const double sat = vmax > 0.0 ? std::hypot(dx, dy) / vmax : 0.0;
    double hue = std::atan2(dy, dx) / (2.0 * std::numbers::pi);
    if (hue < 0.0) hue += 1.0;
    const double h6 = hue * 6.0;
    const int sector = static_cast<int>(h6) % 6;
    const double f = h6 - std::floor(h6);
    const double p = 1.0 - sat, q = 1.0 - sat * f, t = 1.0 - sat * (1.0 - f);
    double r = 1.0, g = 1.0, b = 1.0;
    switch (sector) {
      case 0: r = 1.0; g = t; b = p; break;
      case 1: r = q; g = 1.0; b = p; break;
      case 2: r = p; g = 1.0; b = t; break;
      case 3: r = p; g = q; b = 1.0; break;
      case 4: r = t; g = p; b = 1.0; break;
      default: r = 1.0; g = p; b = q; break;
    }
    out.data[3 * x] = r;
    out.data[3 * x + 1] = g;
    out.data[3 * x + 2] = b;
  }
  return out;
}

}  // namespace liftkit::cli
