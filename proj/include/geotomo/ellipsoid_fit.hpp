#pragma once

// Least-squares approximation of a radial function by sums of powers of
// ellipsoid radial functions, rho_K ~ sum_j rho_{E_j}^k with k = n - a.
//
// Each E_j = {x : x^T A_j x <= 1} with A_j = L_j L_j^T, L_j lower triangular
// with diagonal floor + exp(p). Parameters of a term are its lower triangle
// in column-major order, diagonal entries replaced by p.

#include <vector>

#include "json.hpp"

#include "geotomo/star_bodies.hpp"

namespace geotomo {

struct EllipsoidSum {
  int dim = 0;
  double k_exponent = 1.0;
  std::vector<Matrix> terms;
  bool raw_power = true;  // sum_j rho_j^k; otherwise (sum_j rho_j^k)^(1/k)

  double operator()(const VecRef& theta) const;
  StarBody body() const;
};

nlohmann::json ellipsoid_sum_to_json(const EllipsoidSum& s);
/// Accepts the same `ellipsoid_sum` descriptor that body_from_json loads.
EllipsoidSum ellipsoid_sum_from_json(const nlohmann::json& j);

struct FitConfig {
  int max_iters = 200;
  int restarts = 10;
  double initial_damping = 1e-3;
  double damping_up = 4.0;
  double damping_down = 3.0;
  double floor = 1e-9;       // lower bound on the diagonal of each factor
  double init_spread = 0.3;  // relative size of random factor perturbations
  int grid_size = 0;         // 0: 1000 for n = 3, 6000 otherwise (half are antipodes)
  std::uint64_t seed = 0;
};

struct FitReport {
  EllipsoidSum sum;
  double objective = 0.0;        // sum over the grid of squared residuals
  double radial_distance = 0.0;  // max over the grid of |rho_K - fit|
  std::vector<double> trace;     // objective after each accepted step of the best restart
  int iterations = 0;
  int best_restart = 0;
  bool converged = false;
  bool convergence_failure = false;  // no restart decreased its objective
  std::size_t grid_size = 0;
};

/// Symmetric grid: `count / 2` uniform directions and their antipodes.
Matrix fit_grid(int n, int count, std::uint64_t seed);

int parameters_per_term(int n);
Vector ellipsoid_sum_parameters(const EllipsoidSum& s, double floor = 1e-9);
EllipsoidSum ellipsoid_sum_from_parameters(int n, double k, const Vector& params, double floor = 1e-9);

/// Sum over grid columns of (model - target)^2 and, if requested, its
/// gradient with respect to the parameters.
double fit_objective(const Matrix& grid, const Vector& target, double k, const Vector& params,
                     Vector* gradient = nullptr, double floor = 1e-9);

FitReport fit_ellipsoid_sum(const StarBody& k, int a, int num_terms, const FitConfig& config = {});
/// Fit from given starting terms only (no random restarts).
FitReport fit_ellipsoid_sum_from(const StarBody& k, int a, const EllipsoidSum& start, const FitConfig& config = {});

struct FitCurvePoint {
  int num_terms = 0;
  double radial_distance = 0.0;  // running minimum over term counts
  double fit_radial_distance = 0.0;  // this term count's own best
};

/// Best d_r for 1..max_terms terms; each count is warm-started from the
/// previous solution plus a new small term, alongside random restarts.
std::vector<FitCurvePoint> fit_error_curve(const StarBody& k, int a, int max_terms, const FitConfig& config = {});

}  // namespace geotomo
