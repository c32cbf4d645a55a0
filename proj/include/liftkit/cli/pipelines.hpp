#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "liftkit/dataterms.hpp"
#include "liftkit/image.hpp"
#include "liftkit/lifted.hpp"
#include "liftkit/solver.hpp"

namespace liftkit::cli {

/// Equispaced labels: counts[k] values in [lo[k], hi[k]].
struct LabelAxes {
  std::vector<std::size_t> counts;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Solver output of one experiment together with its unlifted field.
struct PipelineResult {
  ProductGrid grid;
  FieldSet primal;
  SolveReport report;
  LiftedMeasure mu;
  GraphFunction u;
  /// Number of dual values, for the memory estimate.
  std::size_t dual_size = 0;
};

/// Domain grid of an image: a single row becomes a 1D domain, otherwise
/// rows x columns with unit spacing.
ProductGrid image_grid(const Image& im, const LabelAxes& labels);

/// Channel mean of an image as a single-channel image.
Image to_gray(const Image& im);

enum class DenoiseData { Absolute, Squared };

struct DenoiseParams {
  LabelAxes labels{{16}, {0.0}, {1.0}};
  double lambda = 0.1;
  DenoiseData data = DenoiseData::Absolute;
  SolverConfig solver;
};

/// First-order TV model with rho(x, z) = |z - g(x)| (or (z - g(x))^2) on the
/// gray values of `g`.
PipelineResult denoise(const Image& g, const DenoiseParams& params);

struct StereoParams {
  LabelAxes labels{{8}, {0.0}, {7.0}};
  double lambda = 0.05;
  int window_radius = 2;
  double nu = 0.1;
  SolverConfig solver;
};

/// Truncated gradient-matching cost and the first-order TV model.
PipelineResult stereo(const ImagePair& pair, const StereoParams& params);

struct FlowParams {
  LabelAxes labels{{5, 5}, {-2.0, -2.0}, {2.0, 2.0}};
  double lambda = 0.05;
  SolverConfig solver;
};

/// l1_cost with 2D displacement labels and the first-order TV model
/// (nuclear norm of the 2 x 2 Jacobian).
PipelineResult flow(const ImagePair& pair, const FlowParams& params);

enum class RegisterModel { Laplacian, FirstOrder };

struct RegisterParams {
  LabelAxes labels{{9, 9}, {-4.0, -4.0}, {4.0, 4.0}};
  double lambda = 0.1;
  RegisterModel model = RegisterModel::Laplacian;
  SolverConfig solver;
};

struct RegisterResult {
  PipelineResult run;
  /// Template sampled at x + u(x), bilinear.
  Image warped;
  /// |warped - reference| per pixel and channel.
  Image difference;
  /// Sum of |T - R| and of |warped - R| over pixels and channels.
  double error_before = 0.0;
  double error_after = 0.0;
};

/// rho(x, z) = ||T(x + z) - R(x)||; Laplacian model w/2 |Delta u|^2 by default.
/// pair.first is the template T, pair.second the reference R.
RegisterResult register_images(const ImagePair& pair, const RegisterParams& params);

/// Mass list (label index, mass) for one pixel.
using MassList = std::vector<std::pair<std::size_t, double>>;

struct BoundaryEntry {
  std::vector<std::size_t> pixel;
  MassList masses;
};

struct HarmonicParams {
  std::vector<std::size_t> domain{18};
  std::vector<double> spacing;  // default 1 / (n - 1) per axis
  LabelAxes labels{{16}, {0.0}, {1.0}};
  double weight = 1.0;
  /// 1D: the two end points. 2D: corners (0, 0), (0, W-1), (H-1, 0),
  /// (H-1, W-1); the edges between corners are filled by 1D harmonic solves.
  std::vector<MassList> corners;
  /// Explicit boundary pixels; these override corner-derived values.
  std::vector<BoundaryEntry> boundary;
  SolverConfig solver;
};

struct HarmonicResult {
  PipelineResult run;
  /// Boundary density used for pinning.
  LiftedMeasure boundary;
};

HarmonicResult harmonic(const HarmonicParams& params);

/// sum_x |Delta u(x)| over interior pixels and components of u, five-point
/// stencil with unit spacing.
double laplacian_magnitude(const GraphFunction& u);

/// Standard HSV flow coding: hue = angle, saturation = |u| / max |u|, value 1.
Image flow_to_rgb(const GraphFunction& u);

}  // namespace liftkit::cli
