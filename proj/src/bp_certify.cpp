#include "geotomo/bp_certify.hpp"

#include <chrono>
#include <cmath>
#include <cstring>

#include "geotomo/version.hpp"

namespace geotomo {

using nlohmann::json;

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::failed_positivity: return "failed_positivity";
    case Verdict::failed_reconstruction: return "failed_reconstruction";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(Implication v) {
  switch (v) {
    case Implication::consistent: return "consistent";
    case Implication::hypothesis_violated: return "hypothesis_violated";
    case Implication::conclusion_violated: return "CONCLUSION_VIOLATED";
  }
  return "?";
}

namespace {

int resolve_bandlimit(int n, const CertifyConfig& config) {
  return config.bandlimit > 0 ? config.bandlimit : default_bandlimit(n);
}

std::uint64_t frame_seed(const Matrix& frame) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (Index i = 0; i < frame.size(); ++i) {
    std::uint64_t bits;
    const double v = frame.data()[i];
    std::memcpy(&bits, &v, sizeof bits);
    h = mix64(h ^ bits);
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// CertificateDensities

CertificateDensities::CertificateDensities(const StarBody& k, const CertifyConfig& config)
    : CertificateDensities(expand_body(k, resolve_bandlimit(k.dim(), config), config.transform), k, config) {}

CertificateDensities::CertificateDensities(const HarmonicExpansion& rho, const StarBody& k,
                                           const CertifyConfig& config)
    : n_(k.dim()),
      u_(funk_inverse(rho, config.transform.inversion)),
      residual_(rho.residual() / k.radial_many(rho.grid().nodes()).cwiseAbs().maxCoeff()) {
  init(config);
}

CertificateDensities::CertificateDensities(HarmonicExpansion u, const CertifyConfig& config)
    : n_(u.dim()), u_(std::move(u)), residual_(u_.residual()) {
  init(config);
}

void CertificateDensities::init(const CertifyConfig& config) {
  if (n_ < 3) throw InvalidArgument("certificate densities need n >= 3");
  rule_size_ = config.rule_size;
  PolynomialFit fit = fit_polynomial(u_, derive_seed(config.seed, stream::kSurrogate));
  surrogate_error_ = fit.relative_error;
  if (fit.relative_error <= 1e-8) surrogate_.emplace(std::move(fit.polynomial));
  const int m = n_ - 3;
  if (m >= 3 && rule_size_ <= 0) {
    const QuadratureRule full = sphere_rule_for_degree(m, u_.max_degree());
    const Index half = full.size() / 2;
    base_nodes_.resize(m, half);
    base_weights_.resize(half);
    for (Index i = 0; i < half; ++i) {
      base_nodes_.col(i) = full.nodes().col(2 * i);
      base_weights_(i) = 2.0 * full.weights()(2 * i);
    }
  }
}

double CertificateDensities::u(const VecRef& x) const { return surrogate_ ? (*surrogate_)(x) : u_(x); }

double CertificateDensities::integrate_u(const Matrix& frame) const {
  const Index m = frame.cols();
  if (rule_size_ > 0) {
    const QuadratureRule rule = subsphere_quadrature(Subspace(frame), rule_size_);
    return integrate_sphere([this](const VecRef& x) { return u(x); }, rule);
  }
  if (m == 1) return u(frame.col(0));
  if (m == 2) {
    // u is even, so the 2M-point trapezoid rule needs only M evaluations;
    // exact for trigonometric degree < 2M = L + 2
    const int half = u_.max_degree() / 2 + 1;
    double acc = 0.0;
    Vector x(frame.rows());
    for (int k = 0; k < half; ++k) {
      const double phi = M_PI * k / half;
      x.noalias() = std::cos(phi) * frame.col(0) + std::sin(phi) * frame.col(1);
      acc += u(x);
    }
    return acc / half;
  }
  double acc = 0.0;
  Vector x(frame.rows());
  for (Index i = 0; i < base_nodes_.cols(); ++i) {
    x.noalias() = frame * base_nodes_.col(i);
    acc += base_weights_(i) * u(x);
  }
  return acc;
}

double CertificateDensities::g_from_perp(const Matrix& perp) const {
  if (perp.rows() != n_ || perp.cols() != n_ - 3)
    throw InvalidArgument("g: the complement must have dimension n - 3");
  return integrate_u(perp);
}

double CertificateDensities::g(const Subspace& f) const {
  if (f.ambient_dim() != n_ || f.dim() != 3) throw InvalidArgument("g: subspace must lie in G(n, 3)");
  if (n_ == 3) throw InvalidArgument("g: G(3, 3) has trivial complement");
  return g_from_perp(f.complement().frame());
}

Estimate CertificateDensities::h(const Subspace& j, int inner, Rng& gen) const {
  if (j.ambient_dim() != n_ || j.dim() != 2) throw InvalidArgument("h: subspace must lie in G(n, 2)");
  const Subspace perp = j.complement();
  if (n_ == 3) return {integrate_u(perp.frame()), 0.0, 1};
  if (inner < 1) throw InvalidArgument("h: inner sample count must be >= 1");
  MeanAccumulator acc;
  for (int i = 0; i < inner; ++i) acc.add(g_from_perp(sample_subspace_within(perp, n_ - 3, gen).frame()));
  return acc.estimate();
}

GrassmannDensity CertificateDensities::g_density() const {
  return GrassmannDensity(n_, 3, [this](const Subspace& f) { return g(f); },
                          "g(F) = integral of R^{-1}(rho_K) over the unit sphere of F^perp");
}

GrassmannDensity CertificateDensities::h_density(int inner) const {
  return GrassmannDensity(n_, 2, [this, inner](const Subspace& j) {
    Rng gen = make_rng(frame_seed(j.frame()), stream::kInner);
    return h(j, inner, gen).value;
  }, "h(J) = mean of g over F in G(n, 3) containing J");
}

// ---------------------------------------------------------------------------

Estimate whole_point_check(const CertificateDensities& densities, const Subspace& e) {
  if (e.ambient_dim() != densities.dim() || e.dim() != densities.dim() - 3)
    throw InvalidArgument("whole_point_check: E must lie in G(n, n - 3)");
  return {densities.integrate_u(e.frame()), 0.0, 1};
}

Estimate whole_point_check(const StarBody& k, const Subspace& e, int bandlimit, int rule_size) {
  if (k.dim() < 4) throw InvalidArgument("whole_point_check: need n >= 4");
  CertifyConfig config;
  config.bandlimit = bandlimit;
  config.rule_size = rule_size;
  return whole_point_check(CertificateDensities(k, config), e);
}

namespace {

DensityStats finish_stats(const MeanAccumulator& acc, double se_at_min, const CertifyConfig& config) {
  DensityStats s;
  s.count = acc.count();
  s.min = acc.min();
  s.max = acc.max();
  s.max_abs = std::max(std::abs(acc.min()), std::abs(acc.max()));
  s.mean = acc.mean();
  s.mean_standard_error = acc.standard_error();
  s.standard_error_at_min = se_at_min;
  s.threshold = config.strict ? -3.0 * se_at_min : -config.pos_tol * s.max_abs;
  s.passed = s.min >= s.threshold;
  return s;
}

}  // namespace

Certificate certify_low_codim(const StarBody& k, int a, const CertifyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const int n = k.dim();
  if (a != 2 && a != 3) throw InvalidArgument("certify_low_codim: a must be 2 or 3");
  if (a == 3 && n < 4) throw InvalidArgument("certify_low_codim: a = 3 needs n >= 4");
  if (n < 3) throw InvalidArgument("certify_low_codim: need n >= 3");
  if (config.n_g < 1 || config.n_rec < 1 || config.rec_samples < 2 || config.inner_samples < 1 ||
      config.rec_inner_samples < 1)
    throw InvalidArgument("certify_low_codim: sample counts must be positive");

  Certificate c;
  c.dim = n;
  c.a = a;
  c.config = config;
  c.config.bandlimit = resolve_bandlimit(n, config);
  auto finish = [&] {
    c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return c;
  };

  std::optional<CertificateDensities> d;
  try {
    d.emplace(k, c.config);
  } catch (const BandlimitInsufficient& e) {
    c.expansion_residual = e.residual();
    c.verdict = Verdict::inconclusive;
    c.diagnostics = e.what();
    return finish();
  } catch (const IllConditionedInversion& e) {
    c.verdict = Verdict::inconclusive;
    c.diagnostics = e.what();
    return finish();
  }
  c.expansion_residual = d->expansion_residual();
  c.surrogate_error = d->surrogate_error();
  c.surrogate_used = d->surrogate_used();
  const Vector u_grid = d->u_expansion().band_values().rowwise().sum();
  c.u_sup = u_grid.cwiseAbs().maxCoeff();
  c.u_min = u_grid.minCoeff();
  const double u_error = c.surrogate_used ? c.surrogate_error * c.u_sup : 0.0;

  // positivity of g on G(n, 3)
  if (n >= 4) {
    MeanAccumulator acc;
    for (int i = 0; i < config.n_g; ++i) {
      Rng gen = make_rng(config.seed, stream::kPositivity, static_cast<std::uint64_t>(i));
      acc.add(d->g_from_perp(sample_grassmann_haar<double>(n, n - 3, gen).frame()));
    }
    c.g = finish_stats(acc, u_error, config);
  } else {
    c.g.passed = true;
  }
  // positivity of h on G(n, 2)
  if (a == 2) {
    MeanAccumulator acc;
    double se_at_min = 0.0;
    for (int i = 0; i < config.n_g; ++i) {
      Rng gen = make_rng(config.seed, stream::kInner, static_cast<std::uint64_t>(i));
      const Subspace j = sample_grassmann_haar<double>(n, 2, gen);
      const Estimate e = d->h(j, config.inner_samples, gen);
      if (acc.count() == 0 || e.value < acc.min()) se_at_min = e.standard_error;
      acc.add(e.value);
    }
    c.h = finish_stats(acc, se_at_min + u_error, config);
  }

  // reconstruction rho_K = R_3^* g (a = 3) or R_2^* h (a = 2)
  ReconstructionStats& r = c.reconstruction;
  r.directions = static_cast<std::size_t>(config.n_rec);
  r.samples_per_direction = static_cast<std::size_t>(config.rec_samples);
  const Matrix directions = [&] {
    Matrix t(n, config.n_rec);
    for (int i = 0; i < config.n_rec; ++i) {
      Rng gen = make_rng(config.seed, stream::kTestDirections, static_cast<std::uint64_t>(i));
      t.col(i) = uniform_direction<double>(n, gen);
    }
    return t;
  }();
  const Vector rho = k.radial_many(directions);
  r.sup_rho = std::max(rho.maxCoeff(), k.radial_many(d->u_expansion().grid().nodes()).maxCoeff());
  double ratio_sum = 0.0;
  for (int i = 0; i < config.n_rec; ++i) {
    const Vector theta = directions.col(i);
    const Subspace perp = hyperplane_orthogonal_to(theta);
    const Subspace line = line_through(theta);
    Rng gen = make_rng(config.seed, stream::kReconstruction, static_cast<std::uint64_t>(i));
    MeanAccumulator acc;
    for (int s = 0; s < config.rec_samples; ++s) {
      if (a == 3) {
        acc.add(d->g_from_perp(sample_subspace_within(perp, n - 3, gen).frame()));
      } else {
        const Subspace j = sample_subspace_containing(line, 2, gen);
        acc.add(d->h(j, config.rec_inner_samples, gen).value);
      }
    }
    const double err = std::abs(rho(i) - acc.mean());
    if (i == 0 || err > r.sup_error) {
      r.sup_error = err;
      r.standard_error_at_sup = acc.standard_error();
      r.worst_direction = theta;
    }
    r.max_standard_error = std::max(r.max_standard_error, acc.standard_error());
    ratio_sum += rho(i) / acc.mean();
  }
  r.mean_ratio = ratio_sum / config.n_rec;
  r.tolerance = std::max(config.rec_rel_tol * r.sup_rho, 3.0 * r.max_standard_error);
  r.passed = r.sup_error <= r.tolerance;

  const bool positive = c.g.passed && (!c.h || c.h->passed);
  if (!positive) {
    c.verdict = Verdict::failed_positivity;
    c.diagnostics = "sampled density below the positivity threshold";
  } else if (!r.passed) {
    c.verdict = Verdict::failed_reconstruction;
    c.diagnostics = "reconstruction error above tolerance";
  } else {
    c.verdict = Verdict::certified;
  }
  if (!k.is_smooth()) c.diagnostics += (c.diagnostics.empty() ? "" : "; ") + std::string("body is not smooth");
  return finish();
}

// ---------------------------------------------------------------------------
// section comparisons

SectionReport section_dominance_check(const StarBody& k, const StarBody& l, const SectionConfig& config) {
  if (k.dim() != l.dim()) throw InvalidArgument("section_dominance_check: dimension mismatch");
  const int n = k.dim();
  if (config.m < 1 || config.m > n) throw InvalidArgument("section_dominance_check: need 1 <= m <= n");
  if (config.sections < 1) throw InvalidArgument("section_dominance_check: sections must be >= 1");
  SectionReport r;
  r.dim = n;
  r.m = config.m;
  r.sections = static_cast<std::size_t>(config.sections);
  std::size_t dominated = 0;
  for (int i = 0; i < config.sections; ++i) {
    Rng gen = make_rng(config.seed, stream::kSections, static_cast<std::uint64_t>(i));
    const Subspace e = sample_grassmann_haar<double>(n, config.m, gen);
    const QuadratureRule rule = subsphere_quadrature(e, config.rule_size);
    SectionRecord rec;
    rec.volume_k = section_volume(k, e, rule);
    rec.volume_l = section_volume(l, e, rule);
    rec.margin = rec.volume_l - rec.volume_k;
    dominated += rec.volume_k <= rec.volume_l;
    const double relative = rec.margin / rec.volume_l;
    if (i == 0 || rec.margin < r.worst_margin) r.worst_margin = rec.margin;
    if (i == 0 || relative < r.worst_relative_margin) r.worst_relative_margin = relative;
    r.records.push_back(rec);
  }
  r.fraction_dominated = static_cast<double>(dominated) / config.sections;
  const QuadratureRule rule = default_volume_rule(n);
  r.volume_k = volume(k, rule);
  r.volume_l = volume(l, rule);
  if (dominated < r.sections)
    r.implication = Implication::hypothesis_violated;
  else if (r.volume_k > r.volume_l * (1.0 + config.volume_tolerance))
    r.implication = Implication::conclusion_violated;
  else
    r.implication = Implication::consistent;
  return r;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

json stats_json(const DensityStats& s) {
  return {{"count", s.count},
          {"min", s.min},
          {"max", s.max},
          {"max_abs", s.max_abs},
          {"mean", s.mean},
          {"mean_standard_error", s.mean_standard_error},
          {"standard_error_at_min", s.standard_error_at_min},
          {"threshold", s.threshold},
          {"passed", s.passed}};
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

json certificate_to_json(const Certificate& c, const json& body_descriptor) {
  const CertifyConfig& cfg = c.config;
  json config = {{"bandlimit", cfg.bandlimit},
                 {"n_g", cfg.n_g},
                 {"n_rec", cfg.n_rec},
                 {"rec_samples", cfg.rec_samples},
                 {"rec_inner_samples", cfg.rec_inner_samples},
                 {"inner_samples", cfg.inner_samples},
                 {"rule_size", cfg.rule_size},
                 {"pos_tol", cfg.pos_tol},
                 {"strict", cfg.strict},
                 {"rec_rel_tol", cfg.rec_rel_tol},
                 {"residual_tolerance", cfg.transform.residual_tolerance},
                 {"multiplier_floor", cfg.transform.inversion.multiplier_floor},
                 {"zero_band_tolerance", cfg.transform.inversion.zero_band_tolerance}};
  const ReconstructionStats& r = c.reconstruction;
  json out = {{"kind", "certificate"},
              {"version", kVersion},
              {"body", body_descriptor},
              {"dim", c.dim},
              {"a", c.a},
              {"k", c.dim - c.a},
              {"bandlimit", cfg.bandlimit},
              {"seed", cfg.seed},
              {"config", config},
              {"convexity_attestation", cfg.convexity_attestation},
              {"expansion_residual", c.expansion_residual},
              {"surrogate", {{"used", c.surrogate_used}, {"relative_error", c.surrogate_error}}},
              {"u", {{"sup_norm", c.u_sup}, {"min_on_grid", c.u_min}}},
              {"g_stats", c.g.count ? stats_json(c.g) : json(nullptr)},
              {"h_stats", c.h ? stats_json(*c.h) : json(nullptr)},
              {"reconstruction",
               {{"test_directions", r.directions},
                {"samples_per_direction", r.samples_per_direction},
                {"sup_error", r.sup_error},
                {"standard_error_at_sup", r.standard_error_at_sup},
                {"max_standard_error", r.max_standard_error},
                {"sup_rho", r.sup_rho},
                {"tolerance", r.tolerance},
                {"mean_ratio", r.mean_ratio},
                {"worst_direction", vector_json(r.worst_direction)},
                {"passed", r.passed}}},
              {"verdict", to_string(c.verdict)},
              {"diagnostics", c.diagnostics},
              {"timing", {{"wall_seconds", c.wall_seconds}}}};
  return out;
}

json section_report_to_json(const SectionReport& r) {
  json records = json::array();
  for (const SectionRecord& s : r.records)
    records.push_back({{"volume_k", s.volume_k}, {"volume_l", s.volume_l}, {"margin", s.margin}});
  return {{"kind", "section_report"},
          {"version", kVersion},
          {"dim", r.dim},
          {"m", r.m},
          {"sections", r.sections},
          {"fraction_dominated", r.fraction_dominated},
          {"worst_margin", r.worst_margin},
          {"worst_relative_margin", r.worst_relative_margin},
          {"volume_k", r.volume_k},
          {"volume_l", r.volume_l},
          {"implication_verdict", to_string(r.implication)},
          {"records", records}};
}

std::string section_report_to_csv(const SectionReport& r) {
  std::string out = "index,volume_k,volume_l,margin\n";
  char line[160];
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const SectionRecord& s = r.records[i];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", i, s.volume_k, s.volume_l, s.margin);
    out += line;
  }
  return out;
}

}  // namespace geotomo
