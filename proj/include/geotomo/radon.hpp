#pragma once

// m-dimensional spherical Radon transform R_m, its dual R_m^*, and the Funk
// transform of star bodies. Fourier transforms of homogeneous functions are
// reached only through their Radon identities.

#include <functional>
#include <string>
#include <vector>

#include "geotomo/harmonics.hpp"
#include "geotomo/star_bodies.hpp"

namespace geotomo {

using SubspaceFunction = std::function<double(const Subspace&)>;

/// A continuous function on G(n, m): sampled values plus the generator that
/// produced them, so fresh subspaces can always be evaluated.
class GrassmannDensity {
 public:
  GrassmannDensity(int n, int m, SubspaceFunction generator, std::string description);

  int ambient_dim() const { return n_; }
  int sub_dim() const { return m_; }
  const std::string& description() const { return description_; }
  double operator()(const Subspace& e) const;

  /// Evaluates at `count` Haar subspaces (sample i seeded by (seed, i)) and stores them.
  void sample(int count, std::uint64_t seed);
  const std::vector<Subspace>& subspaces() const { return subspaces_; }
  const std::vector<double>& values() const { return values_; }
  /// min / max / mean of the stored values.
  MeanAccumulator summary() const;

 private:
  int n_;
  int m_;
  SubspaceFunction generator_;
  std::string description_;
  std::vector<Subspace> subspaces_;
  std::vector<double> values_;
};

/// R_m f(E): average of f over S^{n-1} ∩ E (antipodal pair for m = 1).
double radon_forward(const SphereFunction& f, const Subspace& e, int rule_size = 4096);

/// R_m^* g(theta): Monte Carlo average of g over Haar E in G(n, m) containing theta.
Estimate radon_dual(const GrassmannDensity& g, const VecRef& theta, int mc_count,
                    std::uint64_t seed);

/// Both sides of <f, R_m^* g> = <R_m f, g>, each estimated by independent Monte Carlo.
struct DualityEstimate {
  Estimate sphere_side;       // E_theta[ f(theta) R_m^* g(theta) ]
  Estimate grassmann_side;    // E_E[ R_m f(E) g(E) ]
  double combined_standard_error() const;
  double gap() const { return sphere_side.value - grassmann_side.value; }
};

DualityEstimate duality_check(const SphereFunction& f, const GrassmannDensity& g, int samples,
                              int rule_size, std::uint64_t seed);

struct BodyTransformOptions {
  /// Allowed expansion residual, relative to the sup of rho on the grid.
  double residual_tolerance = 1e-3;
  InversionOptions inversion;
};

/// Expansion of rho_K at bandlimit L; throws BandlimitInsufficient when the
/// relative residual exceeds the tolerance.
HarmonicExpansion expand_body(const StarBody& k, int bandlimit, const BodyTransformOptions& options = {});
/// Expansion of R(rho_K).
HarmonicExpansion funk_transform_body(const StarBody& k, int bandlimit,
                                      const BodyTransformOptions& options = {});
/// Expansion of u = R^{-1}(rho_K).
HarmonicExpansion funk_inverse_body(const StarBody& k, int bandlimit,
                                    const BodyTransformOptions& options = {});

/// pi (n-1) Vol(D_{n-1}).
double fourier_radon_constant(int n);

/// (|.|_L^{-n+1})^(theta) = pi (n-1) Vol(D_{n-1}) R(rho_L^{n-1})(theta).
double fourier_norm_power(const StarBody& l, const VecRef& theta, int rule_size = 4096);

/// (|.|_K^{-1})^ on the sphere, through (2 pi)^n / (pi (n-1) Vol(D_{n-1})) R^{-1}(rho_K).
HarmonicExpansion fourier_inverse_norm(const StarBody& k, int bandlimit,
                                       const BodyTransformOptions& options = {});

}  // namespace geotomo
