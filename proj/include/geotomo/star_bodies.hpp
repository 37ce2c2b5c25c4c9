#pragma once

// Centrally symmetric star bodies given by their radial functions, and the
// geometric functionals built on them. Bodies are immutable closure trees:
// composites keep references to their children and evaluate on demand.

#include <memory>
#include <string>
#include <vector>

#include "geotomo/harmonics.hpp"
#include "geotomo/sphere_core.hpp"

namespace geotomo {

/// Vol(D_m) = pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);

enum class BodyKind {
  ball,
  ellipsoid,
  lp,
  perturbed_ball,
  expansion,
  function,
  power,
  radial_sum,
  dilate,
  intersection_body
};

const char* to_string(BodyKind kind);

/// Even perturbation phi for radial functions 1 + eps * phi.
///   zero:      phi = 0 (axis holds a zero vector fixing the dimension)
///   zonal:     phi(x) = scale * C_d^nu(x . axis) / C_d^nu(1), d even
///   quadratic: phi(x) = scale * x^T B x, B symmetric with spectral norm <= 1
struct Perturbation {
  enum class Kind { zero, zonal, quadratic };

  Kind kind = Kind::zero;
  int degree = 2;
  Vector axis;
  Matrix matrix;
  double scale = 1.0;

  static Perturbation zero(int n);
  static Perturbation zonal(int degree, Vector axis, double scale = 1.0);
  static Perturbation quadratic(Matrix b, double scale = 1.0);

  int dim() const;
  double operator()(const VecRef& x) const;
  Perturbation scaled(double factor) const;
  /// Gradient and Hessian of phi in geodesic normal coordinates at x, using
  /// the orthonormal tangent frame of hyperplane_orthogonal_to(x).
  void normal_derivatives(const VecRef& x, Vector& gradient, Matrix& hessian) const;
};

const char* to_string(Perturbation::Kind kind);

/// Sup-norms of phi and its first and second normal-coordinate derivatives
/// over a set of directions. M = max(first, second).
struct PerturbationBounds {
  double sup_value = 0.0;
  double sup_first = 0.0;
  double sup_second = 0.0;
  std::size_t grid_size = 0;
  double M() const { return std::max(sup_first, sup_second); }
};

PerturbationBounds perturbation_bounds(const Perturbation& phi, const Matrix& directions);
PerturbationBounds perturbation_bounds(const Perturbation& phi, int count = 4000,
                                       std::uint64_t seed = 0);

class StarBody;
struct BodyNode;

class StarBody {
 public:
  explicit StarBody(std::shared_ptr<const BodyNode> node);

  int dim() const;
  BodyKind kind() const;
  /// rho_K(theta); theta is assumed unit. Non-positive or non-finite values throw InvalidBody.
  double radial(const VecRef& theta) const;
  double operator()(const VecRef& theta) const { return radial(theta); }
  /// Values at every column of `thetas`.
  Vector radial_many(const Matrix& thetas) const;
  SphereFunction radial_function() const;
  /// True when the radial function is C^2 on the sphere (needed by curvature
  /// and certificate claims).
  bool is_smooth() const;

  // Primitive parameters; throw InvalidArgument for other kinds.
  const Matrix& matrix() const;
  double p() const;
  double epsilon() const;
  const Perturbation& perturbation() const;
  const HarmonicExpansion& expansion() const;
  // Composite parameters.
  double exponent() const;  // power alpha, radial_sum k
  double factor() const;    // dilate c
  const std::vector<StarBody>& children() const;
  int rule_size() const;    // intersection_body
  const std::string& label() const;  // function

  const BodyNode& node() const { return *node_; }

 private:
  std::shared_ptr<const BodyNode> node_;
};

StarBody ball(int n);
/// rho(theta) = (theta^T A theta)^{-1/2}; A symmetric positive definite.
StarBody ellipsoid(Matrix a, double eigenvalue_floor = 1e-12);
/// Ellipsoid with the given semi-axes along the coordinate axes.
StarBody ellipsoid_axes(const Vector& semi_axes);
/// rho(theta) = (sum |theta_i|^p)^{-1/p}, p > 0 (convex for p >= 1).
StarBody lp_ball(int n, double p);
/// rho = 1 + eps * phi; throws InvalidBody when 1 + eps * phi <= 0 on the test grid.
StarBody perturbed_ball(double eps, const Perturbation& phi);
StarBody from_expansion(HarmonicExpansion expansion);
StarBody from_function(int n, SphereFunction rho, std::string label, bool smooth);
StarBody power_transform(const StarBody& k, double alpha);
/// rho = (sum_j rho_j^k)^{1/k}.
StarBody radial_sum_k(const std::vector<StarBody>& bodies, double k);
StarBody dilate(const StarBody& k, double c);
/// rho(theta) = Vol(L ∩ theta^perp), evaluated lazily and cached per direction.
StarBody intersection_body_of(const StarBody& l, int rule_size = 4096);

/// |x| / rho_K(x / |x|); 0 at the origin.
double minkowski_functional(const StarBody& k, const VecRef& x);

/// Default volume rule on S^{n-1}: a product rule whose size stays near 3e4 nodes.
QuadratureRule default_volume_rule(int n);

/// Vol(D_n) * \int rho^n dsigma.
double volume(const StarBody& k, const QuadratureRule& rule);
double volume(const StarBody& k);

/// Vol(D_m) * \int_{S^{n-1} ∩ E} rho^m dsigma_m for E of dimension m.
double section_volume(const StarBody& k, const Subspace& e, const QuadratureRule& rule);
double section_volume(const StarBody& k, const Subspace& e, int rule_size = 4096);

struct RadialDistance {
  double distance = 0.0;
  std::size_t grid_size = 0;
};

/// max over the columns of `grid` of |rho_K - rho_L|; a lower bound for d_r.
RadialDistance radial_distance(const StarBody& k, const StarBody& l, const Matrix& grid);
RadialDistance radial_distance(const StarBody& k, const StarBody& l, int count = 10000,
                               std::uint64_t seed = 0);

/// Checks positivity and evenness of rho on `count` random directions; throws InvalidBody.
void validate_body(const StarBody& k, int count = 10000, std::uint64_t seed = 0);

}  // namespace geotomo
