#include "geotomo/ellipsoid_fit.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "geotomo/descriptor.hpp"

namespace geotomo {

double EllipsoidSum::operator()(const VecRef& theta) const {
  double acc = 0.0;
  for (const Matrix& a : terms) acc += std::pow(theta.dot(a * theta), -0.5 * k_exponent);
  return raw_power ? acc : std::pow(acc, 1.0 / k_exponent);
}

StarBody EllipsoidSum::body() const {
  if (terms.empty()) throw InvalidArgument("EllipsoidSum: no terms");
  std::vector<StarBody> bodies;
  for (const Matrix& a : terms) bodies.push_back(ellipsoid(a));
  const StarBody sum = radial_sum_k(bodies, k_exponent);
  return raw_power ? power_transform(sum, k_exponent) : sum;
}

nlohmann::json ellipsoid_sum_to_json(const EllipsoidSum& s) {
  nlohmann::json matrices = nlohmann::json::array();
  for (const Matrix& a : s.terms) matrices.push_back(matrix_to_json(a));
  return {{"dim", s.dim},
          {"type", "ellipsoid_sum"},
          {"k", s.k_exponent},
          {"mode", s.raw_power ? "raw_power" : "radial_sum"},
          {"matrices", matrices}};
}

EllipsoidSum ellipsoid_sum_from_json(const nlohmann::json& j) {
  body_from_json(j);  // validation with path-named errors
  if (j.value("type", "") != "ellipsoid_sum") throw DescriptorError("type must be \"ellipsoid_sum\"");
  EllipsoidSum s;
  s.dim = j["dim"].get<int>();
  s.k_exponent = j["k"].get<double>();
  s.raw_power = j.value("mode", "raw_power") == "raw_power";
  for (std::size_t i = 0; i < j["matrices"].size(); ++i)
    s.terms.push_back(matrix_from_json(j["matrices"][i], s.dim, "ellipsoid_sum.matrices[" + std::to_string(i) + "]"));
  return s;
}

Matrix fit_grid(int n, int count, std::uint64_t seed) {
  if (count < 2) throw InvalidArgument("fit_grid: count must be >= 2");
  const Index half = count / 2;
  const Matrix base = sample_sphere_uniform(n, half, derive_seed(seed, stream::kFit));
  Matrix grid(n, 2 * half);
  grid << base, -base;
  return grid;
}

int parameters_per_term(int n) { return n * (n + 1) / 2; }

namespace {

Matrix factor_from(int n, const double* p, double floor) {
  Matrix l = Matrix::Zero(n, n);
  int idx = 0;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r, ++idx) l(r, c) = r == c ? floor + std::exp(p[idx]) : p[idx];
  return l;
}

void check_params(int n, const Vector& params) {
  const int per = parameters_per_term(n);
  if (params.size() == 0 || params.size() % per != 0)
    throw InvalidArgument("ellipsoid fit: parameter count is not a multiple of n(n+1)/2");
  if (!params.allFinite()) throw NumericDomainError("ellipsoid fit: non-finite parameters");
}

// Residuals model - target and, optionally, the Jacobian.
Vector residuals(const Matrix& grid, const Vector& target, double k, const Vector& params, double floor,
                 Matrix* jacobian) {
  const int n = static_cast<int>(grid.rows());
  check_params(n, params);
  const int per = parameters_per_term(n);
  const int terms = static_cast<int>(params.size() / per);
  const Index count = grid.cols();
  Vector model = Vector::Zero(count);
  if (jacobian) jacobian->resize(count, params.size());
  for (int t = 0; t < terms; ++t) {
    const double* p = params.data() + t * per;
    const Matrix l = factor_from(n, p, floor);
    const Matrix w = l.transpose() * grid;  // column i: L^T theta_i
    const Vector q = w.colwise().squaredNorm().transpose();
    for (Index i = 0; i < count; ++i) {
      const double value = std::pow(q(i), -0.5 * k);
      model(i) += value;
      if (!jacobian) continue;
      // d(q^{-k/2}) / dq = -(k/2) q^{-k/2 - 1};  dq / dL_rc = 2 w_c theta_r
      const double dq = -0.5 * k * value / q(i);
      int idx = 0;
      for (int c = 0; c < n; ++c)
        for (int r = c; r < n; ++r, ++idx) {
          double d = dq * 2.0 * w(c, i) * grid(r, i);
          if (r == c) d *= std::exp(p[idx]);
          (*jacobian)(i, t * per + idx) = d;
        }
    }
  }
  if (!model.allFinite()) throw NumericDomainError("ellipsoid fit: non-finite model values");
  return model - target;
}

struct LocalFit {
  Vector params;
  double objective = 0.0;
  double initial_objective = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt with diagonal scaling; a step is accepted only if the
// objective decreases.
LocalFit levenberg_marquardt(const Matrix& grid, const Vector& target, double k, Vector params,
                             const FitConfig& config) {
  LocalFit out;
  Matrix jac;
  Vector r = residuals(grid, target, k, params, config.floor, &jac);
  double f = r.squaredNorm();
  out.initial_objective = f;
  out.trace.push_back(f);
  double lambda = config.initial_damping;
  const double scale = target.squaredNorm();
  for (int it = 0; it < config.max_iters; ++it) {
    out.iterations = it + 1;
    if (f <= 1e-30 * scale) {
      out.converged = true;
      break;
    }
    const Matrix jtj = jac.transpose() * jac;
    const Vector grad = jac.transpose() * r;
    const Vector diag = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));
    bool accepted = false;
    while (lambda < 1e16) {
      Matrix system = jtj;
      system.diagonal() += lambda * diag;
      const Vector step = system.ldlt().solve(-grad);
      const Vector candidate = params + step;
      double fc = std::numeric_limits<double>::infinity();
      Vector rc;
      if (candidate.allFinite()) {
        try {
          rc = residuals(grid, target, k, candidate, config.floor, nullptr);
          fc = rc.squaredNorm();
        } catch (const NumericDomainError&) {
        }
      }
      if (fc < f) {
        const double decrease = f - fc;
        params = candidate;
        r = residuals(grid, target, k, params, config.floor, &jac);
        f = r.squaredNorm();
        out.trace.push_back(f);
        lambda = std::max(lambda / config.damping_down, 1e-15);
        accepted = true;
        if (decrease <= 1e-15 * f) out.converged = true;
        break;
      }
      lambda *= config.damping_up;
    }
    if (!accepted || out.converged) {
      out.converged = true;
      break;
    }
  }
  out.params = std::move(params);
  out.objective = f;
  return out;
}

double mean_target(const Vector& target) { return target.mean(); }

Vector term_parameters(const Matrix& l, double floor) {
  const int n = static_cast<int>(l.rows());
  Vector p(parameters_per_term(n));
  int idx = 0;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r, ++idx) {
      if (r == c) {
        const double d = l(r, c) - floor;
        if (!(d > 0.0)) throw InvalidArgument("ellipsoid fit: factor diagonal below the floor");
        p(idx) = std::log(d);
      } else {
        p(idx) = l(r, c);
      }
    }
  return p;
}

// A term whose k-th power radial function is about `level`, perturbed.
Vector random_term(int n, double k, double level, double spread, double floor, Rng& gen) {
  const double q = std::pow(level, -2.0 / k);
  std::normal_distribution<double> normal(0.0, spread);
  Matrix l = Matrix::Zero(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r) l(r, c) = r == c ? std::sqrt(q) * std::exp(normal(gen)) : std::sqrt(q) * normal(gen);
  return term_parameters(l, floor);
}

int exponent_for(const StarBody& k, int a) {
  if (a != 2 && a != 3) throw InvalidArgument("ellipsoid fit: a must be 2 or 3");
  if (k.dim() - a < 1) throw InvalidArgument("ellipsoid fit: need n - a >= 1");
  return k.dim() - a;
}

struct Problem {
  Matrix grid;
  Vector target;
};

Problem make_problem(const StarBody& k, const FitConfig& config) {
  const int n = k.dim();
  const int count = config.grid_size > 0 ? config.grid_size : (n == 3 ? 1000 : 6000);
  Problem p;
  p.grid = fit_grid(n, count, config.seed);
  p.target = k.radial_many(p.grid);
  return p;
}

FitReport finish(const Problem& p, double k, const LocalFit& best, int best_restart, bool failure,
                 const FitConfig& config) {
  FitReport r;
  r.sum = ellipsoid_sum_from_parameters(static_cast<int>(p.grid.rows()), k, best.params, config.floor);
  r.objective = best.objective;
  const Vector res = residuals(p.grid, p.target, k, best.params, config.floor, nullptr);
  r.radial_distance = res.cwiseAbs().maxCoeff();
  r.trace = best.trace;
  r.iterations = best.iterations;
  r.best_restart = best_restart;
  r.converged = best.converged;
  r.convergence_failure = failure;
  r.grid_size = static_cast<std::size_t>(p.grid.cols());
  return r;
}

void validate_config(const FitConfig& config) {
  if (config.max_iters < 1 || config.restarts < 1) throw InvalidArgument("ellipsoid fit: max_iters and restarts must be >= 1");
  if (!(config.floor > 0.0)) throw InvalidArgument("ellipsoid fit: floor must be positive");
}

}  // namespace

Vector ellipsoid_sum_parameters(const EllipsoidSum& s, double floor) {
  if (s.terms.empty()) throw InvalidArgument("EllipsoidSum: no terms");
  const int per = parameters_per_term(s.dim);
  Vector p(per * static_cast<Index>(s.terms.size()));
  for (std::size_t t = 0; t < s.terms.size(); ++t) {
    const Eigen::LLT<Matrix> llt(s.terms[t]);
    if (llt.info() != Eigen::Success) throw InvalidBody("EllipsoidSum: term is not positive definite");
    p.segment(static_cast<Index>(t) * per, per) = term_parameters(llt.matrixL(), floor);
  }
  return p;
}

EllipsoidSum ellipsoid_sum_from_parameters(int n, double k, const Vector& params, double floor) {
  check_params(n, params);
  const int per = parameters_per_term(n);
  EllipsoidSum s;
  s.dim = n;
  s.k_exponent = k;
  for (Index t = 0; t < params.size() / per; ++t) {
    const Matrix l = factor_from(n, params.data() + t * per, floor);
    s.terms.push_back(l * l.transpose());
  }
  return s;
}

double fit_objective(const Matrix& grid, const Vector& target, double k, const Vector& params, Vector* gradient,
                     double floor) {
  if (target.size() != grid.cols()) throw InvalidArgument("fit_objective: target size mismatch");
  Matrix jac;
  const Vector r = residuals(grid, target, k, params, floor, gradient ? &jac : nullptr);
  if (gradient) *gradient = 2.0 * jac.transpose() * r;
  return r.squaredNorm();
}

FitReport fit_ellipsoid_sum(const StarBody& k, int a, int num_terms, const FitConfig& config) {
  const int exponent = exponent_for(k, a);
  if (num_terms < 1) throw InvalidArgument("fit_ellipsoid_sum: num_terms must be >= 1");
  validate_config(config);
  const int n = k.dim();
  const Problem p = make_problem(k, config);
  const double level = mean_target(p.target) / num_terms;
  LocalFit best;
  int best_restart = -1;
  bool any_decrease = false;
  for (int restart = 0; restart < config.restarts; ++restart) {
    Rng gen = make_rng(config.seed, stream::kFit, static_cast<std::uint64_t>(restart));
    Vector start(parameters_per_term(n) * num_terms);
    for (int t = 0; t < num_terms; ++t)
      start.segment(t * parameters_per_term(n), parameters_per_term(n)) =
          random_term(n, exponent, level, config.init_spread, config.floor, gen);
    LocalFit fit = levenberg_marquardt(p.grid, p.target, exponent, start, config);
    any_decrease = any_decrease || fit.objective < fit.initial_objective;
    if (best_restart < 0 || fit.objective < best.objective) {
      best = std::move(fit);
      best_restart = restart;
    }
  }
  return finish(p, exponent, best, best_restart, !any_decrease, config);
}

FitReport fit_ellipsoid_sum_from(const StarBody& k, int a, const EllipsoidSum& start, const FitConfig& config) {
  const int exponent = exponent_for(k, a);
  validate_config(config);
  if (start.dim != k.dim()) throw InvalidArgument("fit_ellipsoid_sum_from: dimension mismatch");
  const Problem p = make_problem(k, config);
  const LocalFit fit =
      levenberg_marquardt(p.grid, p.target, exponent, ellipsoid_sum_parameters(start, config.floor), config);
  return finish(p, exponent, fit, 0, !(fit.objective < fit.initial_objective) && fit.objective > 0.0, config);
}

std::vector<FitCurvePoint> fit_error_curve(const StarBody& k, int a, int max_terms, const FitConfig& config) {
  const int exponent = exponent_for(k, a);
  if (max_terms < 1) throw InvalidArgument("fit_error_curve: max_terms must be >= 1");
  validate_config(config);
  const int n = k.dim();
  const Problem p = make_problem(k, config);
  std::vector<FitCurvePoint> curve;
  std::optional<FitReport> previous;
  double running = std::numeric_limits<double>::infinity();
  for (int terms = 1; terms <= max_terms; ++terms) {
    FitReport best = fit_ellipsoid_sum(k, a, terms, config);
    if (previous) {
      // warm start: previous terms plus a small new one
      EllipsoidSum start = previous->sum;
      Rng gen = make_rng(config.seed, stream::kFit, 1000000 + static_cast<std::uint64_t>(terms));
      const Vector extra = random_term(n, exponent, 1e-3 * mean_target(p.target), config.init_spread, config.floor, gen);
      start.terms.push_back(ellipsoid_sum_from_parameters(n, exponent, extra, config.floor).terms.front());
      FitReport w = fit_ellipsoid_sum_from(k, a, start, config);
      if (w.objective < best.objective) best = std::move(w);
    }
    running = std::min(running, best.radial_distance);
    curve.push_back({terms, running, best.radial_distance});
    previous = std::move(best);
  }
  return curve;
}

}  // namespace geotomo
