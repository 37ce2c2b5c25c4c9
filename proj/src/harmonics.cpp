#include "geotomo/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace geotomo {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Calls visit(d, factor, C) for every even d <= max_degree, where
// factor * C is the array of zonal kernel values Z_d at the entries of t.
template <typename Visit>
void for_each_even_zonal(int n, int max_degree, const Eigen::ArrayXXd& t, Visit&& visit) {
  Eigen::ArrayXXd tc = t.max(-1.0).min(1.0);
  Eigen::ArrayXXd prev = Eigen::ArrayXXd::Ones(t.rows(), t.cols());
  visit(0, 1.0, prev);
  if (max_degree < 2) return;
  const double nu = (n - 2) / 2.0;
  const bool chebyshev = n == 2;
  Eigen::ArrayXXd cur = chebyshev ? tc : Eigen::ArrayXXd((2.0 * nu) * tc);
  for (int k = 1; k < max_degree; ++k) {
    // prev <- C_{k+1}, computed in place
    if (chebyshev) {
      prev = 2.0 * tc * cur - prev;
    } else {
      const double a = 2.0 * (k + nu) / (k + 1.0);
      const double b = (k + 2.0 * nu - 1.0) / (k + 1.0);
      prev = a * tc * cur - b * prev;
    }
    prev.swap(cur);
    const int d = k + 1;
    if (d % 2 == 0) visit(d, chebyshev ? 2.0 : 1.0 + d / nu, cur);
  }
}

Index batch_rows(Index grid_size) {
  return std::max<Index>(1, (Index(1) << 19) / std::max<Index>(1, grid_size));
}

}  // namespace

double harmonic_dimension(int n, int d) {
  if (n < 2 || d < 0) throw InvalidArgument("harmonic_dimension: need n >= 2, d >= 0");
  if (n == 2) return d == 0 ? 1.0 : 2.0;
  return (2.0 * d + n - 2) / (n - 2) * binomial(d + n - 3, d);
}

double zonal_kernel(int n, int d, double t) {
  if (n < 2) throw InvalidArgument("zonal_kernel: need n >= 2");
  if (n == 2) return d == 0 ? 1.0 : 2.0 * gegenbauer(0.0, d, t);
  const double nu = (n - 2) / 2.0;
  return (1.0 + d / nu) * gegenbauer(nu, d, t);
}

double funk_multiplier(int n, int d) {
  if (d < 0 || d % 2 != 0) throw InvalidArgument("funk_multiplier: degree must be even and >= 0");
  if (n < 2) throw InvalidArgument("funk_multiplier: need n >= 2");
  const double nu = (n - 2) / 2.0;
  return gegenbauer(nu, d, 0.0) / gegenbauer(nu, d, 1.0);
}

SphereFunction project_band(const SphereFunction& f, int n, int d, const QuadratureRule& rule) {
  if (rule.dim() != n) throw InvalidArgument("project_band: rule dimension mismatch");
  Vector weighted(rule.size());
  for (Index i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes().col(i));
    if (!std::isfinite(v))
      throw NumericDomainError("non-finite integrand value at quadrature node " + std::to_string(i));
    weighted(i) = rule.weights()(i) * v;
  }
  Matrix nodes = rule.nodes();
  return [n, d, nodes = std::move(nodes), weighted = std::move(weighted)](const VecRef& theta) {
    const Vector t = nodes.transpose() * theta;
    double acc = 0.0;
    for (Index i = 0; i < t.size(); ++i)
      acc += weighted(i) * zonal_kernel(n, d, std::clamp(t(i), -1.0, 1.0));
    return acc;
  };
}

std::shared_ptr<const QuadratureRule> analysis_grid(int n, int max_degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, max_degree}];
  if (!slot) {
    const QuadratureRule full = sphere_rule_for_degree(n, 2 * max_degree);
    const Index half = full.size() / 2;
    Matrix nodes(n, half);
    Vector weights(half);
    for (Index i = 0; i < half; ++i) {
      nodes.col(i) = full.nodes().col(2 * i);
      weights(i) = 2.0 * full.weights()(2 * i);
    }
    slot = std::make_shared<const QuadratureRule>(std::move(nodes), std::move(weights),
                                                  RuleKind::product_gauss, false,
                                                  full.exact_degree());
  }
  return slot;
}

int default_bandlimit(int n) {
  if (n <= 3) return 16;
  if (n == 4) return 12;
  if (n == 5) return 8;
  return 6;
}

// ---------------------------------------------------------------------------

HarmonicExpansion::HarmonicExpansion(int dim, int max_degree,
                                     std::shared_ptr<const QuadratureRule> grid,
                                     Matrix band_values, double residual)
    : dim_(dim),
      max_degree_(max_degree),
      grid_(std::move(grid)),
      band_values_(std::move(band_values)),
      residual_(residual) {
  if (max_degree_ < 0 || max_degree_ % 2 != 0)
    throw InvalidArgument("harmonic expansion: max degree must be even and >= 0");
  if (!grid_ || grid_->dim() != dim_ || band_values_.rows() != grid_->size() ||
      band_values_.cols() != max_degree_ / 2 + 1)
    throw InvalidArgument("harmonic expansion: band table does not match the grid");
  refresh_weighted();
}

void HarmonicExpansion::refresh_weighted() {
  weighted_ = grid_->weights().asDiagonal() * band_values_;
}

Vector HarmonicExpansion::evaluate(const Matrix& thetas) const {
  const Index count = thetas.cols();
  Vector out(count);
  const Index step = batch_rows(grid_->size());
  for (Index start = 0; start < count; start += step) {
    const Index rows = std::min(step, count - start);
    const Eigen::ArrayXXd t = (thetas.middleCols(start, rows).transpose() * grid_->nodes()).array();
    Vector acc = Vector::Zero(rows);
    for_each_even_zonal(dim_, max_degree_, t, [&](int d, double factor, const Eigen::ArrayXXd& c) {
      acc.noalias() += factor * (c.matrix() * weighted_.col(d / 2));
    });
    out.segment(start, rows) = acc;
  }
  return out;
}

double HarmonicExpansion::operator()(const VecRef& theta) const {
  return evaluate(Matrix(theta))(0);
}

double HarmonicExpansion::band(int degree, const VecRef& theta) const {
  if (degree < 0 || degree > max_degree_ || degree % 2 != 0)
    throw InvalidArgument("harmonic expansion: no band of degree " + std::to_string(degree));
  const Vector t = grid_->nodes().transpose() * theta;
  double acc = 0.0;
  for (Index i = 0; i < t.size(); ++i)
    acc += weighted_(i, degree / 2) * zonal_kernel(dim_, degree, std::clamp(t(i), -1.0, 1.0));
  return acc;
}

double HarmonicExpansion::band_sup_norm(int degree) const {
  return band_values_.col(degree / 2).cwiseAbs().maxCoeff();
}

double HarmonicExpansion::sup_norm_on_grid() const {
  return band_values_.rowwise().sum().cwiseAbs().maxCoeff();
}

HarmonicExpansion HarmonicExpansion::with_band_factors(const std::vector<double>& factors) const {
  if (static_cast<int>(factors.size()) != band_count())
    throw InvalidArgument("with_band_factors: one factor per band required");
  Matrix scaled = band_values_;
  for (int b = 0; b < band_count(); ++b) scaled.col(b) *= factors[b];
  return HarmonicExpansion(dim_, max_degree_, grid_, std::move(scaled), residual_);
}

HarmonicExpansion HarmonicExpansion::scaled(double c) const {
  return HarmonicExpansion(dim_, max_degree_, grid_, c * band_values_, std::abs(c) * residual_);
}

Vector HarmonicExpansion::reprojected_band(int degree) const {
  const Index size = grid_->size();
  Vector out(size);
  const Index step = batch_rows(size);
  const Vector weighted = weighted_.col(degree / 2);
  for (Index start = 0; start < size; start += step) {
    const Index rows = std::min(step, size - start);
    const Eigen::ArrayXXd t =
        (grid_->nodes().middleCols(start, rows).transpose() * grid_->nodes()).array();
    for_each_even_zonal(dim_, degree, t, [&](int d, double factor, const Eigen::ArrayXXd& c) {
      if (d == degree) out.segment(start, rows) = factor * (c.matrix() * weighted);
    });
  }
  return out;
}

SphereFunction HarmonicExpansion::as_function() const {
  auto self = std::make_shared<const HarmonicExpansion>(*this);
  return [self](const VecRef& theta) { return (*self)(theta); };
}

HarmonicExpansion expand(const SphereFunction& f, int n, int max_degree) {
  return expand(f, n, max_degree, analysis_grid(n, max_degree));
}

HarmonicExpansion expand(const SphereFunction& f, int n, int max_degree,
                         std::shared_ptr<const QuadratureRule> rule) {
  if (n < 2) throw InvalidArgument("expand: need n >= 2");
  if (max_degree < 0 || max_degree % 2 != 0)
    throw InvalidArgument("expand: max degree must be even and >= 0");
  if (rule->antipodal_pairs()) {
    const Index half = rule->size() / 2;
    Matrix nodes(n, half);
    Vector weights(half);
    for (Index i = 0; i < half; ++i) {
      nodes.col(i) = rule->nodes().col(2 * i);
      weights(i) = rule->weights()(2 * i);
    }
    rule = std::make_shared<const QuadratureRule>(std::move(nodes), std::move(weights),
                                                  rule->kind(), false, rule->exact_degree());
  }
  const QuadratureRule& grid = *rule;
  const Index size = grid.size();
  Vector plus(size), minus(size);
  for (Index i = 0; i < size; ++i) {
    const Vector x = grid.nodes().col(i);
    plus(i) = f(x);
    minus(i) = f(-x);
    if (!std::isfinite(plus(i)) || !std::isfinite(minus(i)))
      throw NumericDomainError("expand: non-finite value at grid node " + std::to_string(i) + " " +
                               format_vector(x));
  }
  const Vector even = 0.5 * (plus + minus);
  const Vector weighted = grid.weights().cwiseProduct(even);
  const int bands = max_degree / 2 + 1;
  Matrix band_values(size, bands);
  const Index step = batch_rows(size);
  for (Index start = 0; start < size; start += step) {
    const Index rows = std::min(step, size - start);
    const Eigen::ArrayXXd t = (grid.nodes().middleCols(start, rows).transpose() * grid.nodes()).array();
    for_each_even_zonal(n, max_degree, t, [&](int d, double factor, const Eigen::ArrayXXd& c) {
      band_values.block(start, d / 2, rows, 1) = factor * (c.matrix() * weighted);
    });
  }
  const Vector synthesized = band_values.rowwise().sum();
  const double residual = std::max((plus - synthesized).cwiseAbs().maxCoeff(),
                                   (minus - synthesized).cwiseAbs().maxCoeff());
  return HarmonicExpansion(n, max_degree, std::move(rule), std::move(band_values), residual);
}

HarmonicExpansion funk_transform(const HarmonicExpansion& f) {
  std::vector<double> factors;
  for (int b = 0; b < f.band_count(); ++b) factors.push_back(funk_multiplier(f.dim(), 2 * b));
  return f.with_band_factors(factors);
}

HarmonicExpansion funk_inverse(const HarmonicExpansion& f, const InversionOptions& options) {
  std::vector<double> factors;
  for (int b = 0; b < f.band_count(); ++b) {
    const int d = 2 * b;
    const double lambda = funk_multiplier(f.dim(), d);
    if (std::abs(lambda) < options.multiplier_floor) {
      const double norm = f.band_sup_norm(d);
      if (norm > options.zero_band_tolerance) throw IllConditionedInversion(d, lambda, norm);
      factors.push_back(0.0);
    } else {
      factors.push_back(1.0 / lambda);
    }
  }
  return f.with_band_factors(factors);
}

// ---------------------------------------------------------------------------

HomogeneousPolynomial::HomogeneousPolynomial(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0) throw InvalidArgument("homogeneous polynomial: bad shape");
  std::vector<int> alpha(dim, 0);
  // enumerate compositions of `degree` into `dim` parts
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      alpha[pos] = remaining;
      exponents_.insert(exponents_.end(), alpha.begin(), alpha.end());
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      alpha[pos] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  rec(rec, 0, degree);
  coefficients_ = Vector::Zero(term_count());
}

void HomogeneousPolynomial::set_coefficients(Vector c) {
  if (c.size() != term_count()) throw InvalidArgument("homogeneous polynomial: wrong coefficient count");
  coefficients_ = std::move(c);
}

Vector HomogeneousPolynomial::monomials(const VecRef& x) const {
  Matrix powers(dim_, degree_ + 1);
  for (int i = 0; i < dim_; ++i) {
    powers(i, 0) = 1.0;
    for (int k = 1; k <= degree_; ++k) powers(i, k) = powers(i, k - 1) * x(i);
  }
  Vector out(term_count());
  const int* e = exponents_.data();
  for (Index t = 0; t < term_count(); ++t, e += dim_) {
    double v = powers(0, e[0]);
    for (int i = 1; i < dim_; ++i) v *= powers(i, e[i]);
    out(t) = v;
  }
  return out;
}

double HomogeneousPolynomial::operator()(const VecRef& x) const {
  double powers[16][65];
  if (dim_ > 16 || degree_ > 64) return monomials(x).dot(coefficients_);
  for (int i = 0; i < dim_; ++i) {
    powers[i][0] = 1.0;
    for (int k = 1; k <= degree_; ++k) powers[i][k] = powers[i][k - 1] * x(i);
  }
  double acc = 0.0;
  const int* e = exponents_.data();
  for (Index t = 0; t < term_count(); ++t, e += dim_) {
    double v = coefficients_(t);
    for (int i = 0; i < dim_; ++i) v *= powers[i][e[i]];
    acc += v;
  }
  return acc;
}

PolynomialFit fit_polynomial(const HarmonicExpansion& f, std::uint64_t seed) {
  HomogeneousPolynomial p(f.dim(), f.max_degree());
  const Index terms = p.term_count();
  const Index fit_points = 2 * terms + 64;
  const Index check_points = 512;
  const Matrix points = sample_sphere_uniform(f.dim(), fit_points + check_points,
                                              derive_seed(seed, stream::kSurrogate));
  const Vector values = f.evaluate(points);
  Matrix design(fit_points, terms);
  for (Index i = 0; i < fit_points; ++i) design.row(i) = p.monomials(points.col(i)).transpose();
  const Vector scale = design.colwise().norm().transpose().cwiseMax(1e-300);
  const Matrix scaled = design * scale.cwiseInverse().asDiagonal();
  Vector c = scaled.colPivHouseholderQr().solve(values.head(fit_points));
  p.set_coefficients(c.cwiseQuotient(scale));
  double err = 0.0;
  double norm = 0.0;
  for (Index i = fit_points; i < fit_points + check_points; ++i) {
    err = std::max(err, std::abs(p(points.col(i)) - values(i)));
    norm = std::max(norm, std::abs(values(i)));
  }
  return {std::move(p), norm > 0.0 ? err / norm : err};
}

}  // namespace geotomo
