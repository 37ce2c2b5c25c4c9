#include "geotomo/radon.hpp"

#include <cmath>

namespace geotomo {

GrassmannDensity::GrassmannDensity(int n, int m, SubspaceFunction generator, std::string description)
    : n_(n), m_(m), generator_(std::move(generator)), description_(std::move(description)) {
  if (n < 2 || m < 1 || m > n) throw InvalidArgument("GrassmannDensity: need 1 <= m <= n, n >= 2");
  if (!generator_) throw InvalidArgument("GrassmannDensity: empty generator");
}

double GrassmannDensity::operator()(const Subspace& e) const {
  if (e.ambient_dim() != n_ || e.dim() != m_)
    throw InvalidArgument("GrassmannDensity: subspace is not in G(" + std::to_string(n_) + ", " +
                          std::to_string(m_) + ")");
  const double v = generator_(e);
  if (!std::isfinite(v)) throw NumericDomainError("GrassmannDensity: non-finite value");
  return v;
}

void GrassmannDensity::sample(int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("GrassmannDensity::sample: count must be >= 1");
  subspaces_.clear();
  values_.clear();
  subspaces_.reserve(count);
  values_.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng gen = make_rng(seed, stream::kGrassmann, static_cast<std::uint64_t>(i));
    subspaces_.push_back(sample_grassmann_haar<double>(n_, m_, gen));
    values_.push_back((*this)(subspaces_.back()));
  }
}

MeanAccumulator GrassmannDensity::summary() const {
  MeanAccumulator acc;
  for (double v : values_) acc.add(v);
  return acc;
}

double radon_forward(const SphereFunction& f, const Subspace& e, int rule_size) {
  return integrate_sphere(f, subsphere_quadrature(e, rule_size));
}

Estimate radon_dual(const GrassmannDensity& g, const VecRef& theta, int mc_count, std::uint64_t seed) {
  if (mc_count < 1) throw InvalidArgument("radon_dual: mc_count must be >= 1");
  if (theta.size() != g.ambient_dim()) throw InvalidArgument("radon_dual: dimension mismatch");
  const Subspace line = line_through(Vector(theta));
  MeanAccumulator acc;
  for (int i = 0; i < mc_count; ++i) {
    Rng gen = make_rng(seed, stream::kContaining, static_cast<std::uint64_t>(i));
    acc.add(g(sample_subspace_containing(line, g.sub_dim(), gen)));
  }
  return acc.estimate();
}

double DualityEstimate::combined_standard_error() const {
  return std::hypot(sphere_side.standard_error, grassmann_side.standard_error);
}

DualityEstimate duality_check(const SphereFunction& f, const GrassmannDensity& g, int samples,
                              int rule_size, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("duality_check: need at least 2 samples");
  const int n = g.ambient_dim();
  const int m = g.sub_dim();
  MeanAccumulator sphere_side, grassmann_side;
  for (int i = 0; i < samples; ++i) {
    // theta uniform and E Haar among subspaces containing theta: one inner
    // sample gives an unbiased estimate of f(theta) R_m^* g(theta)
    Rng gen = make_rng(seed, stream::kSphere, static_cast<std::uint64_t>(i));
    const Vector theta = uniform_direction<double>(n, gen);
    const Subspace e = sample_subspace_containing(line_through(theta), m, gen);
    sphere_side.add(f(theta) * g(e));
  }
  for (int i = 0; i < samples; ++i) {
    Rng gen = make_rng(seed, stream::kGrassmann, static_cast<std::uint64_t>(i));
    const Subspace e = sample_grassmann_haar<double>(n, m, gen);
    grassmann_side.add(radon_forward(f, e, rule_size) * g(e));
  }
  return {sphere_side.estimate(), grassmann_side.estimate()};
}

HarmonicExpansion expand_body(const StarBody& k, int bandlimit, const BodyTransformOptions& options) {
  HarmonicExpansion e = expand(k.radial_function(), k.dim(), bandlimit);
  const double scale = k.radial_many(e.grid().nodes()).cwiseAbs().maxCoeff();
  if (e.residual() > options.residual_tolerance * scale)
    throw BandlimitInsufficient(bandlimit, e.residual() / scale, options.residual_tolerance);
  return e;
}

HarmonicExpansion funk_transform_body(const StarBody& k, int bandlimit, const BodyTransformOptions& options) {
  return funk_transform(expand_body(k, bandlimit, options));
}

HarmonicExpansion funk_inverse_body(const StarBody& k, int bandlimit, const BodyTransformOptions& options) {
  return funk_inverse(expand_body(k, bandlimit, options), options.inversion);
}

double fourier_radon_constant(int n) {
  if (n < 2) throw InvalidArgument("fourier_radon_constant: need n >= 2");
  return M_PI * (n - 1) * unit_ball_volume(n - 1);
}

double fourier_norm_power(const StarBody& l, const VecRef& theta, int rule_size) {
  const int n = l.dim();
  const SphereFunction rho = l.radial_function();
  const SphereFunction power = [rho, n](const VecRef& x) { return std::pow(rho(x), n - 1); };
  return fourier_radon_constant(n) * radon_forward(power, hyperplane_orthogonal_to(Vector(theta)), rule_size);
}

HarmonicExpansion fourier_inverse_norm(const StarBody& k, int bandlimit, const BodyTransformOptions& options) {
  const int n = k.dim();
  return funk_inverse_body(k, bandlimit, options).scaled(std::pow(2.0 * M_PI, n) / fourier_radon_constant(n));
}

}  // namespace geotomo
