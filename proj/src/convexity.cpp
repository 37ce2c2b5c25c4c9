#include "geotomo/convexity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "geotomo/version.hpp"

namespace geotomo {

using nlohmann::json;

const char* to_string(ConvexityMethod m) {
  return m == ConvexityMethod::midpoint_sampled ? "midpoint_sampled" : "curvature_n3";
}

const char* to_string(ConvexityVerdict v) {
  switch (v) {
    case ConvexityVerdict::convex_within_tolerance: return "convex_within_tolerance";
    case ConvexityVerdict::nonconvex_witness: return "nonconvex_witness";
    case ConvexityVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

Vector sphere_exp(const Vector& x, const Vector& v) {
  const double t = v.norm();
  if (t == 0.0) return x;
  return std::cos(t) * x + std::sin(t) / t * v;
}

Vector boundary_point(const StarBody& k, const Vector& theta) { return k.radial(theta) * theta; }

double midpoint_gauge(const StarBody& k, const Vector& x, const Vector& y) {
  return minkowski_functional(k, Vector(0.5 * (x + y)));
}

ConvexityVerdict classify_margin(double margin, double tol) {
  if (margin >= -tol) return ConvexityVerdict::convex_within_tolerance;
  if (margin < -10.0 * tol) return ConvexityVerdict::nonconvex_witness;
  return ConvexityVerdict::inconclusive;
}

}  // namespace

bool witness_violates(const StarBody& k, const MidpointWitness& w, double tol) {
  return midpoint_gauge(k, w.x, w.y) > 1.0 + tol;
}

ConvexityReport midpoint_convexity_check(const StarBody& k, const MidpointConfig& config) {
  if (config.pairs < 1) throw InvalidArgument("midpoint_convexity_check: pairs must be >= 1");
  if (!(config.tol >= 0.0)) throw InvalidArgument("midpoint_convexity_check: tol must be >= 0");
  if (!(config.local_min_step > 0.0 && config.local_max_step >= config.local_min_step))
    throw InvalidArgument("midpoint_convexity_check: bad local step range");
  const int n = k.dim();
  ConvexityReport r;
  r.method = ConvexityMethod::midpoint_sampled;
  r.samples = static_cast<std::size_t>(config.pairs);
  r.grid = std::to_string(config.pairs) + " pairs, local fraction " + std::to_string(config.local_fraction);
  r.tolerance = config.tol;
  std::uniform_real_distribution<double> unit_interval(0.0, 1.0);
  const double log_lo = std::log(config.local_min_step);
  const double log_hi = std::log(config.local_max_step);
  MidpointWitness worst;
  for (int i = 0; i < config.pairs; ++i) {
    Rng gen = make_rng(config.seed, stream::kConvexity, static_cast<std::uint64_t>(i));
    const Vector t1 = uniform_direction<double>(n, gen);
    Vector t2;
    if (unit_interval(gen) < config.local_fraction) {
      Vector v = gaussian_vector<double>(n, gen);
      v -= v.dot(t1) * t1;
      const double step = std::exp(log_lo + (log_hi - log_lo) * unit_interval(gen));
      t2 = sphere_exp(t1, step * v.normalized());
      t2.normalize();
    } else {
      t2 = uniform_direction<double>(n, gen);
    }
    const Vector x = boundary_point(k, t1);
    const Vector y = boundary_point(k, t2);
    const double gauge = midpoint_gauge(k, x, y);
    const double margin = 1.0 - gauge;
    if (i == 0 || margin < r.min_margin) {
      r.min_margin = margin;
      r.min_point = t1;
      worst = {x, y, gauge};
    }
  }
  r.verdict = classify_margin(r.min_margin, config.tol);
  if (r.verdict == ConvexityVerdict::nonconvex_witness) r.witness = worst;
  return r;
}

ConvexityReport midpoint_convexity_check(const StarBody& k, int pairs, std::uint64_t seed, double tol) {
  MidpointConfig c;
  c.pairs = pairs;
  c.seed = seed;
  c.tol = tol;
  return midpoint_convexity_check(k, c);
}

namespace {

// Fourth-order central stencils at offsets -2..2.
constexpr std::array<double, 5> kFirst = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr std::array<double, 5> kSecond = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};

struct SurfaceForms {
  Matrix first;   // 2 x 2
  Matrix second;  // 2 x 2, against the outward normal
  Matrix tangent; // 3 x 2 frame of theta^perp
  double curvature = 0.0;
};

SurfaceForms surface_forms(const StarBody& k, const Vector& theta, double h) {
  const Matrix t = hyperplane_orthogonal_to(theta).frame();
  double f[5][5];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const Vector v = h * ((i - 2) * t.col(0) + (j - 2) * t.col(1));
      Vector p = sphere_exp(theta, v);
      p.normalize();
      f[i][j] = k.radial(p);
    }
  const double rho = f[2][2];
  double r1 = 0.0, r2 = 0.0, r11 = 0.0, r22 = 0.0, r12 = 0.0;
  for (int i = 0; i < 5; ++i) {
    r1 += kFirst[i] * f[i][2];
    r2 += kFirst[i] * f[2][i];
    r11 += kSecond[i] * f[i][2];
    r22 += kSecond[i] * f[2][i];
    for (int j = 0; j < 5; ++j) r12 += kFirst[i] * kFirst[j] * f[i][j];
  }
  r1 /= h;
  r2 /= h;
  r11 /= h * h;
  r22 /= h * h;
  r12 /= h * h;
  const Eigen::Vector3d th = theta;
  const Eigen::Vector3d e1 = t.col(0), e2 = t.col(1);
  const Eigen::Vector3d x1 = r1 * th + rho * e1;
  const Eigen::Vector3d x2 = r2 * th + rho * e2;
  const Eigen::Vector3d x11 = r11 * th + 2.0 * r1 * e1 - rho * th;
  const Eigen::Vector3d x22 = r22 * th + 2.0 * r2 * e2 - rho * th;
  const Eigen::Vector3d x12 = r12 * th + r1 * e2 + r2 * e1;
  Eigen::Vector3d normal = x1.cross(x2).normalized();
  if (normal.dot(th) < 0.0) normal = -normal;
  SurfaceForms s;
  s.tangent = t;
  s.first.resize(2, 2);
  s.first << x1.dot(x1), x1.dot(x2), x1.dot(x2), x2.dot(x2);
  s.second.resize(2, 2);
  s.second << x11.dot(normal), x12.dot(normal), x12.dot(normal), x22.dot(normal);
  s.curvature = s.second.determinant() / s.first.determinant();
  return s;
}

// Looks for a midpoint witness near theta along the direction of largest
// normal curvature against the outward normal.
std::optional<MidpointWitness> local_witness(const StarBody& k, const Vector& theta, const SurfaceForms& s,
                                             double tol) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(s.second, s.first);
  if (es.info() != Eigen::Success || es.eigenvalues()(1) <= 0.0) return std::nullopt;
  const Vector w = (s.tangent * es.eigenvectors().col(1)).normalized();
  for (double delta : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002}) {
    Vector a = sphere_exp(theta, delta * w);
    Vector b = sphere_exp(theta, -delta * w);
    MidpointWitness m{boundary_point(k, a.normalized()), boundary_point(k, b.normalized()), 0.0};
    m.midpoint_gauge = midpoint_gauge(k, m.x, m.y);
    if (m.midpoint_gauge > 1.0 + tol) return m;
  }
  return std::nullopt;
}

}  // namespace

double gaussian_curvature(const StarBody& k, const VecRef& theta, double step) {
  if (k.dim() != 3) throw InvalidArgument("gaussian_curvature: need n = 3");
  if (!(step > 0.0)) throw InvalidArgument("gaussian_curvature: step must be positive");
  const Vector t = Vector(theta).normalized();
  return surface_forms(k, t, step).curvature;
}

ConvexityReport curvature_n3(const StarBody& k, const CurvatureConfig& config) {
  if (k.dim() != 3) throw InvalidArgument("curvature_n3: need n = 3");
  if (config.points < 0) throw InvalidArgument("curvature_n3: points must be >= 0");
  ConvexityReport r;
  r.method = ConvexityMethod::curvature_n3;
  r.tolerance = config.tol;
  Matrix dirs(3, config.points + 6);
  dirs.leftCols(3) = Matrix::Identity(3, 3);
  dirs.middleCols(3, 3) = -Matrix::Identity(3, 3);
  if (config.points > 0)
    dirs.rightCols(config.points) = sample_sphere_uniform(3, config.points, derive_seed(config.seed, stream::kConvexity));
  r.samples = static_cast<std::size_t>(dirs.cols());
  r.grid = std::to_string(config.points) + " uniform directions + 6 axes, step " + std::to_string(config.step);
  if (!k.is_smooth()) {
    r.verdict = ConvexityVerdict::inconclusive;
    r.note = "radial function is not twice differentiable";
    return r;
  }
  SurfaceForms worst;
  for (Index i = 0; i < dirs.cols(); ++i) {
    const Vector theta = dirs.col(i);
    SurfaceForms s = surface_forms(k, theta, config.step);
    if (i == 0 || s.curvature < r.min_margin) {
      r.min_margin = s.curvature;
      r.min_point = theta;
      worst = std::move(s);
    }
  }
  if (r.min_margin > config.tol) {
    r.verdict = ConvexityVerdict::convex_within_tolerance;
  } else if (r.min_margin < -config.tol) {
    r.witness = local_witness(k, r.min_point, worst, MidpointConfig{}.tol);
    if (r.witness) {
      r.verdict = ConvexityVerdict::nonconvex_witness;
    } else {
      r.verdict = ConvexityVerdict::inconclusive;
      r.note = "negative curvature without a midpoint witness";
    }
  } else {
    r.verdict = ConvexityVerdict::inconclusive;
    r.note = "minimum curvature inside the tolerance band";
  }
  return r;
}

// ---------------------------------------------------------------------------

int ThresholdReport::flips() const {
  std::vector<ThresholdStep> sorted = trace;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ThresholdStep& a, const ThresholdStep& b) { return a.eps < b.eps; });
  int count = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const bool prev = sorted[i - 1].verdict == ConvexityVerdict::convex_within_tolerance;
    const bool cur = sorted[i].verdict == ConvexityVerdict::convex_within_tolerance;
    count += prev != cur;
  }
  return count;
}

StarBody threshold_body(const Perturbation& phi, double eps, int a) {
  const int k = phi.dim() - a;
  if (k < 1) throw InvalidArgument("threshold_body: need n - a >= 1");
  const StarBody base = perturbed_ball(eps, phi);
  return k == 1 ? base : power_transform(base, static_cast<double>(k));
}

ThresholdReport convexity_threshold(const Perturbation& phi, int a, const ThresholdConfig& config) {
  const int n = phi.dim();
  if (a != 2 && a != 3) throw InvalidArgument("convexity_threshold: a must be 2 or 3");
  if (n - a < 1) throw InvalidArgument("convexity_threshold: need n - a >= 1");
  if (!(config.upper > 0.0 && config.upper < 1.0)) throw InvalidArgument("convexity_threshold: upper must lie in (0, 1)");
  if (!(config.bisection_tol > 0.0)) throw InvalidArgument("convexity_threshold: bisection_tol must be positive");
  if (config.scan_points < 1) throw InvalidArgument("convexity_threshold: scan_points must be >= 1");
  ThresholdReport r;
  r.dim = n;
  r.a = a;
  r.bounds = perturbation_bounds(phi, config.bound_grid, config.midpoint.seed);
  if (r.bounds.sup_value > 1.0 + 1e-12)
    throw InvalidArgument("phi: max |phi| = " + std::to_string(r.bounds.sup_value) + " exceeds 1");
  if (config.bound_m > 0.0 && r.bounds.M() > config.bound_m * (1.0 + 1e-12))
    throw InvalidArgument("phi: derivative bound " + std::to_string(r.bounds.M()) + " exceeds M = " +
                          std::to_string(config.bound_m));
  const bool curvature = config.use_curvature && n == 3;
  r.method = curvature ? ConvexityMethod::curvature_n3 : ConvexityMethod::midpoint_sampled;

  auto passes = [&](double eps) {
    const StarBody body = threshold_body(phi, eps, a);
    const ConvexityReport c = curvature ? curvature_n3(body, config.curvature)
                                        : midpoint_convexity_check(body, config.midpoint);
    r.trace.push_back({eps, c.min_margin, c.verdict});
    return c.verdict == ConvexityVerdict::convex_within_tolerance;
  };

  double lo = 0.0, hi = -1.0;
  for (int j = 0; j <= config.scan_points; ++j) {
    const double eps = config.upper * j / config.scan_points;
    if (passes(eps)) {
      lo = eps;
    } else {
      hi = eps;
      break;
    }
  }
  if (hi < 0.0) {
    r.eps_star = config.upper;
    return r;
  }
  while (hi - lo > config.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  r.eps_star = lo;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

json convexity_report_to_json(const ConvexityReport& r) {
  json out = {{"kind", "convexity_report"},
              {"version", kVersion},
              {"method", to_string(r.method)},
              {"samples", r.samples},
              {"grid", r.grid},
              {"tolerance", r.tolerance},
              {"min_margin", r.min_margin},
              {"min_point", vector_json(r.min_point)},
              {"verdict", to_string(r.verdict)},
              {"note", r.note}};
  if (r.witness)
    out["witness"] = {{"x", vector_json(r.witness->x)},
                      {"y", vector_json(r.witness->y)},
                      {"midpoint_gauge", r.witness->midpoint_gauge}};
  else
    out["witness"] = nullptr;
  return out;
}

json threshold_report_to_json(const ThresholdReport& r) {
  json trace = json::array();
  for (const ThresholdStep& s : r.trace)
    trace.push_back({{"eps", s.eps}, {"margin", s.margin}, {"verdict", to_string(s.verdict)}});
  return {{"kind", "threshold_report"},
          {"version", kVersion},
          {"dim", r.dim},
          {"a", r.a},
          {"exponent", r.dim - r.a},
          {"eps_star", r.eps_star},
          {"method", to_string(r.method)},
          {"bounds",
           {{"sup_value", r.bounds.sup_value},
            {"sup_first", r.bounds.sup_first},
            {"sup_second", r.bounds.sup_second},
            {"M", r.bounds.M()},
            {"grid_size", r.bounds.grid_size}}},
          {"flips", r.flips()},
          {"trace", trace}};
}

}  // namespace geotomo
