#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace liftkit::prox {

/// Euclidean projection onto {w >= 0, sum w = mass}, in place.
void project_simplex(std::span<double> v, double mass = 1.0);

/// Clips the singular values of a row-major rows x cols matrix at `radius`.
void project_spectral_ball(std::span<double> m, std::size_t rows, std::size_t cols,
                           double radius);

/// Projection onto {(xi, lam) : c/2 |xi|^2 + lam <= 0}, in place.
/// c = 1 is the plain parabola epigraph.
void project_quad_epigraph(std::span<double> xi, double& lam, double curvature = 1.0);

/// Nearest positive semidefinite matrix to (M + M^T) / 2, in place.
void project_psd(std::span<double> m, std::size_t n);

inline double clip_upper(double v, double bound) { return v < bound ? v : bound; }
inline double nonneg(double v) { return v > 0.0 ? v : 0.0; }

/// Projection of (a, b, c) onto the plane a = b + c, in place.
void project_equality(double& a, double& b, double& c);

/// Orthogonal projection onto d x s x d x s tensors with [i,k,j,l] = [i,l,j,k].
void project_block_symmetric(std::span<double> h, std::size_t d, std::size_t s);

/// Declarative description of a pointwise constraint set.
struct ProjectionSpec {
  enum class Kind {
    Simplex,
    NonNeg,
    UpperBound,
    SpectralBall,
    QuadEpigraph,
    PSDCone,
    Equality,
    BlockSymmetric
  };

  Kind kind = Kind::NonNeg;
  /// Variables the set acts on, in the order their values are concatenated.
  std::vector<std::string> variables;
  /// Shape of the per-point block the projection sees.
  std::vector<std::size_t> shape;
  double radius = 1.0;     // SpectralBall
  double mass = 1.0;       // Simplex
  double curvature = 1.0;  // QuadEpigraph
  std::vector<double> bound;  // UpperBound, one entry per point

  static ProjectionSpec simplex(std::string var, std::size_t labels, double mass);
  static ProjectionSpec nonneg(std::string var);
  static ProjectionSpec upper_bound(std::string var, std::vector<double> bound);
  static ProjectionSpec spectral_ball(std::string var, std::size_t rows, std::size_t cols,
                                      double radius);
  /// Block layout: the xi entries first, lam last.
  static ProjectionSpec quad_epigraph(std::string xi_var, std::string lam_var, std::size_t dim,
                                      double curvature);
  static ProjectionSpec psd(std::string var, std::size_t n);
  static ProjectionSpec block_symmetric(std::string var, std::size_t d, std::size_t s);
  /// Block layout (a, b, c) with a = b + c.
  static ProjectionSpec equality(std::string a, std::string b, std::string c);

  /// Number of doubles in one block.
  std::size_t block_size() const;
};

/// Applies the projection to one block; `point` selects the UpperBound entry.
void apply(const ProjectionSpec& spec, std::span<double> block, std::size_t point = 0);

const char* kind_name(ProjectionSpec::Kind kind);

}  // namespace liftkit::prox
