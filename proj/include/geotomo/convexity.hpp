#pragma once

// Convexity tests for star bodies: a sampled midpoint test on the gauge for
// any n, Gaussian curvature of the radial graph for n = 3, and an empirical
// convexity threshold for the perturbed bodies with radial (1 + eps phi)^k.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "geotomo/star_bodies.hpp"

namespace geotomo {

enum class ConvexityMethod { midpoint_sampled, curvature_n3 };
enum class ConvexityVerdict { convex_within_tolerance, nonconvex_witness, inconclusive };
const char* to_string(ConvexityMethod m);
const char* to_string(ConvexityVerdict v);

/// Boundary points x, y of K with ||(x + y) / 2||_K > 1 + tolerance.
struct MidpointWitness {
  Vector x;
  Vector y;
  double midpoint_gauge = 0.0;
};

struct ConvexityReport {
  ConvexityMethod method = ConvexityMethod::midpoint_sampled;
  std::size_t samples = 0;
  std::string grid;
  double tolerance = 0.0;
  /// midpoint: min over pairs of 1 - ||(x + y) / 2||_K; curvature: min Gaussian curvature
  double min_margin = 0.0;
  Vector min_point;  // direction attaining min_margin (x for midpoint pairs)
  ConvexityVerdict verdict = ConvexityVerdict::inconclusive;
  std::optional<MidpointWitness> witness;
  std::string note;
};

struct MidpointConfig {
  int pairs = 20000;
  double tol = 1e-9;
  double local_fraction = 0.5;  // share of pairs with nearby directions
  double local_min_step = 1e-3;  // geodesic separation range of local pairs
  double local_max_step = 0.3;
  std::uint64_t seed = 0;
};

/// Samples pairs of boundary points and checks the midpoint gauge. Margins
/// >= -tol pass; margins in [-10 tol, -tol) are inconclusive.
ConvexityReport midpoint_convexity_check(const StarBody& k, const MidpointConfig& config = {});
ConvexityReport midpoint_convexity_check(const StarBody& k, int pairs, std::uint64_t seed, double tol = 1e-9);

/// Re-evaluates the midpoint gauge of a witness; true if it exceeds 1 + tol.
bool witness_violates(const StarBody& k, const MidpointWitness& w, double tol);

struct CurvatureConfig {
  int points = 4000;      // random directions; the six coordinate directions are added
  double step = 2e-3;     // finite-difference step in normal coordinates
  double tol = 1e-6;      // curvatures within [-tol, tol] are inconclusive
  std::uint64_t seed = 0;
};

/// Gaussian curvature of the surface theta -> rho(theta) theta at theta, with
/// rho differentiated by fourth-order differences in geodesic normal
/// coordinates.
double gaussian_curvature(const StarBody& k, const VecRef& theta, double step = 2e-3);

ConvexityReport curvature_n3(const StarBody& k, const CurvatureConfig& config = {});

struct ThresholdStep {
  double eps = 0.0;
  double margin = 0.0;
  ConvexityVerdict verdict = ConvexityVerdict::inconclusive;
};

struct ThresholdConfig {
  double bound_m = 0.0;         // derivative bound M; 0 accepts the measured one
  double bisection_tol = 1e-3;
  double upper = 0.999;         // bracket [0, upper]
  int scan_points = 8;          // uniform scan before bisection
  int bound_grid = 4000;
  bool use_curvature = true;    // n = 3 only; otherwise midpoint
  MidpointConfig midpoint;
  CurvatureConfig curvature;
};

struct ThresholdReport {
  int dim = 0;
  int a = 0;
  double eps_star = 0.0;
  PerturbationBounds bounds;
  ConvexityMethod method = ConvexityMethod::midpoint_sampled;
  std::vector<ThresholdStep> trace;  // in evaluation order
  /// Number of verdict changes along the trace sorted by eps.
  int flips() const;
};

/// Body with radial (1 + eps phi)^(n - a).
StarBody threshold_body(const Perturbation& phi, double eps, int a);

/// Largest eps in [0, upper] (to bisection_tol) for which the body with
/// radial (1 + eps phi)^(n - a) passes the convexity check.
ThresholdReport convexity_threshold(const Perturbation& phi, int a, const ThresholdConfig& config = {});

nlohmann::json convexity_report_to_json(const ConvexityReport& r);
nlohmann::json threshold_report_to_json(const ThresholdReport& r);

}  // namespace geotomo
