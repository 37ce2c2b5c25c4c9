#pragma once

// Even spherical-harmonic analysis on S^{n-1} through Gegenbauer zonal
// kernels. Band components are stored as values on an analysis grid and
// re-evaluated anywhere by the reproducing kernel of their band, so no
// explicit harmonic basis is ever built.

#include <functional>
#include <memory>
#include <vector>

#include "geotomo/sphere_core.hpp"

namespace geotomo {

using SphereFunction = std::function<double(const VecRef&)>;

/// Gegenbauer polynomial C_d^nu(t) by the three-term recurrence. For nu == 0
/// the Chebyshev polynomial T_d(t) is returned (the normalized nu -> 0 limit).
template <typename Scalar>
Scalar gegenbauer(Scalar nu, int d, Scalar t) {
  if (d < 0) throw InvalidArgument("gegenbauer: degree must be non-negative");
  if (!(std::abs(t) <= Scalar(1))) throw InvalidArgument("gegenbauer: |t| must be <= 1");
  if (nu < Scalar(0)) throw InvalidArgument("gegenbauer: nu must be >= 0");
  if (d == 0) return Scalar(1);
  const bool chebyshev = nu == Scalar(0);
  Scalar prev = 1;
  Scalar cur = chebyshev ? t : 2 * nu * t;
  for (int k = 1; k < d; ++k) {
    const Scalar next = chebyshev ? 2 * t * cur - prev
                                  : (2 * (k + nu) * t * cur - (k + 2 * nu - 1) * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// dim H_d^n, the dimension of the space of degree-d spherical harmonics on S^{n-1}.
double harmonic_dimension(int n, int d);

/// Reproducing kernel of H_d^n under the probability measure:
/// Z_d(1) = dim H_d^n and (Pi_d f)(x) = \int Z_d(x . y) f(y) dsigma(y).
double zonal_kernel(int n, int d, double t);

/// Eigenvalue of the probability-normalized spherical Radon (Funk) transform
/// on degree-d harmonics: C_d^{(n-2)/2}(0) / C_d^{(n-2)/2}(1). Odd d throws.
double funk_multiplier(int n, int d);

/// (Pi_d f)(theta) by quadrature of f against the zonal kernel on `rule`.
SphereFunction project_band(const SphereFunction& f, int n, int d, const QuadratureRule& rule);

/// Analysis grid used by expand(): hemisphere representatives of an
/// antipodally symmetric product rule exact to degree 2L, weights summing to 1.
std::shared_ptr<const QuadratureRule> analysis_grid(int n, int max_degree);

/// Default bandlimit used for certificates and transforms in dimension n.
int default_bandlimit(int n);

class HarmonicExpansion {
 public:
  HarmonicExpansion(int dim, int max_degree, std::shared_ptr<const QuadratureRule> grid,
                    Matrix band_values, double residual);

  int dim() const { return dim_; }
  int max_degree() const { return max_degree_; }
  int band_count() const { return static_cast<int>(band_values_.cols()); }
  static int degree_of_band(int band) { return 2 * band; }
  const QuadratureRule& grid() const { return *grid_; }
  std::shared_ptr<const QuadratureRule> grid_ptr() const { return grid_; }
  /// grid().size() x band_count(); column b holds the degree-2b component on the grid.
  const Matrix& band_values() const { return band_values_; }
  /// sup over the grid of |f - sum of bands| for the function that was expanded.
  double residual() const { return residual_; }

  double operator()(const VecRef& theta) const;
  double band(int degree, const VecRef& theta) const;
  /// Values at each column of `thetas`.
  Vector evaluate(const Matrix& thetas) const;
  double band_sup_norm(int degree) const;
  double sup_norm_on_grid() const;

  /// Band b multiplied by factors[b].
  HarmonicExpansion with_band_factors(const std::vector<double>& factors) const;
  HarmonicExpansion scaled(double c) const;
  /// Re-projects the stored component of `degree` onto its own band (should
  /// reproduce it: band projection is idempotent).
  Vector reprojected_band(int degree) const;

  SphereFunction as_function() const;

 private:
  void refresh_weighted();

  int dim_;
  int max_degree_;
  std::shared_ptr<const QuadratureRule> grid_;
  Matrix band_values_;
  Matrix weighted_;  // weights(i) * band_values_(i, b)
  double residual_;
};

/// Band-by-band projection of f for degrees 0, 2, ..., L on the analysis grid.
HarmonicExpansion expand(const SphereFunction& f, int n, int max_degree);
HarmonicExpansion expand(const SphereFunction& f, int n, int max_degree,
                         std::shared_ptr<const QuadratureRule> rule);

/// Multiplier-based Funk transform: band d scaled by funk_multiplier(n, d).
HarmonicExpansion funk_transform(const HarmonicExpansion& f);

struct InversionOptions {
  double multiplier_floor = 1e-6;
  double zero_band_tolerance = 1e-9;
};

/// Spectral inverse of the Funk transform: band d divided by funk_multiplier(n, d).
HarmonicExpansion funk_inverse(const HarmonicExpansion& f, const InversionOptions& options = {});

/// Homogeneous polynomial of even degree in n variables, used as a fast
/// evaluator of a bandlimited even sphere function (its restriction to the
/// sphere spans exactly the even bands up to the degree).
class HomogeneousPolynomial {
 public:
  HomogeneousPolynomial(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  Index term_count() const { return static_cast<Index>(exponents_.size()) / dim_; }
  const Vector& coefficients() const { return coefficients_; }
  void set_coefficients(Vector c);

  double operator()(const VecRef& x) const;
  /// Monomial values at x (term_count() entries).
  Vector monomials(const VecRef& x) const;

 private:
  int dim_;
  int degree_;
  std::vector<int> exponents_;  // term-major, dim_ entries per term
  Vector coefficients_;
};

struct PolynomialFit {
  HomogeneousPolynomial polynomial;
  /// max |p - f| over held-out directions, relative to max |f| there.
  double relative_error;
};

/// Least-squares fit of a homogeneous polynomial of degree L to the expansion.
PolynomialFit fit_polynomial(const HarmonicExpansion& f, std::uint64_t seed);

}  // namespace geotomo
