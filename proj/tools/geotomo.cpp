// geotomo command-line front end.
//
//   geotomo certify|sections|fit|threshold|transform --body FILE [--body2 FILE]
//           --a {2,3} --bandlimit L --seed S --out FILE [--n-g N] [--n-rec N]
//           [--rule-size N] [--format json|csv]
//
// Exit codes: 0 success (certified / consistent), 1 usage or IO error,
// 2 inconclusive, 3 failed, 4 hypothesis violated, 5 conclusion violated.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "geotomo/bp_certify.hpp"
#include "geotomo/convexity.hpp"
#include "geotomo/descriptor.hpp"
#include "geotomo/ellipsoid_fit.hpp"
#include "geotomo/radon.hpp"
#include "geotomo/version.hpp"

using namespace geotomo;

namespace {

struct Options {
  std::string body;
  std::string body2;
  std::string phi;
  std::string out;
  std::string format = "json";
  int a = 3;
  int bandlimit = 0;
  std::uint64_t seed = 0;
  int n_g = 2000;
  int n_rec = 200;
  int rec_samples = 4000;
  int inner_samples = 64;
  int rule_size = 0;
  double pos_tol = 1e-3;
  double rec_rel_tol = 1e-2;
  double residual_tol = 1e-3;
  bool strict = false;
  std::string attestation = "caller";
  int m = 3;
  int sections = 500;
  int terms = 1;
  int restarts = 10;
  int max_iters = 200;
  int grid_size = 0;
  bool curve = false;
  double bisection_tol = 1e-3;
  double upper = 0.999;
  int pairs = 20000;
  std::string op;
  double alpha = 1.0;
  double k = 1.0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json run_info(const std::string& command, const Options& o, const Json& config) {
  return {{"command", command}, {"version", kVersion}, {"seed", o.seed}, {"config", config}};
}

Json timing(std::chrono::steady_clock::time_point start) {
  return {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void write_json(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

int cmd_certify(const Options& o) {
  require(o.body, "--body");
  require(o.out, "--out");
  const auto start = std::chrono::steady_clock::now();
  const Json descriptor = read_json_file(o.body);
  const StarBody k = body_from_json(descriptor);
  CertifyConfig c;
  c.bandlimit = o.bandlimit;
  c.n_g = o.n_g;
  c.n_rec = o.n_rec;
  c.rec_samples = o.rec_samples;
  c.inner_samples = o.inner_samples;
  c.rule_size = o.rule_size;
  c.pos_tol = o.pos_tol;
  c.rec_rel_tol = o.rec_rel_tol;
  c.strict = o.strict;
  c.transform.residual_tolerance = o.residual_tol;
  c.convexity_attestation = o.attestation;
  c.seed = o.seed;
  const Certificate cert = certify_low_codim(k, o.a, c);
  Json out = certificate_to_json(cert, descriptor);
  out["run"] = run_info("certify", o, out["config"]);
  out["timing"] = timing(start);
  write_json(o.out, out);
  std::printf("certify n=%d a=%d L=%d: %s (g min %.6g, reconstruction %.3g / %.3g)\n", cert.dim, cert.a,
              cert.config.bandlimit, to_string(cert.verdict), cert.g.min, cert.reconstruction.sup_error,
              cert.reconstruction.tolerance);
  switch (cert.verdict) {
    case Verdict::certified: return 0;
    case Verdict::inconclusive: return 2;
    default: return 3;
  }
}

int cmd_sections(const Options& o) {
  require(o.body, "--body");
  require(o.body2, "--body2");
  require(o.out, "--out");
  const auto start = std::chrono::steady_clock::now();
  const StarBody k = load_body(o.body);
  const StarBody l = load_body(o.body2);
  if (k.dim() != l.dim()) throw UsageError("--body and --body2 have different dimensions");
  SectionConfig c;
  c.m = o.m;
  c.sections = o.sections;
  c.rule_size = o.rule_size > 0 ? o.rule_size : 4096;
  c.seed = o.seed;
  const SectionReport r = section_dominance_check(k, l, c);
  const Json config = {{"m", c.m}, {"sections", c.sections}, {"rule_size", c.rule_size},
                       {"volume_tolerance", c.volume_tolerance}};
  if (o.format == "csv") {
    std::string header = "# geotomo " + std::string(kVersion) + " sections seed=" + std::to_string(o.seed) +
                         " m=" + std::to_string(c.m) + " sections=" + std::to_string(c.sections) +
                         " rule_size=" + std::to_string(c.rule_size) + " implication=" + to_string(r.implication) + "\n";
    write_text_file(o.out, header + section_report_to_csv(r));
  } else {
    Json out = section_report_to_json(r);
    out["run"] = run_info("sections", o, config);
    out["timing"] = timing(start);
    write_json(o.out, out);
  }
  std::printf("sections n=%d m=%d: %s (dominated %.4f, worst margin %.6g, Vol K %.6g, Vol L %.6g)\n", r.dim, r.m,
              to_string(r.implication), r.fraction_dominated, r.worst_margin, r.volume_k, r.volume_l);
  switch (r.implication) {
    case Implication::consistent: return 0;
    case Implication::hypothesis_violated: return 4;
    case Implication::conclusion_violated: return 5;
  }
  return 1;
}

int cmd_fit(const Options& o) {
  require(o.body, "--body");
  require(o.out, "--out");
  const auto start = std::chrono::steady_clock::now();
  const StarBody k = load_body(o.body);
  FitConfig c;
  c.restarts = o.restarts;
  c.max_iters = o.max_iters;
  c.grid_size = o.grid_size;
  c.seed = o.seed;
  const Json config = {{"a", o.a}, {"terms", o.terms}, {"restarts", c.restarts}, {"max_iters", c.max_iters},
                       {"grid_size", c.grid_size}, {"curve", o.curve}};
  const FitReport r = fit_ellipsoid_sum(k, o.a, o.terms, c);
  Json out = ellipsoid_sum_to_json(r.sum);
  out["fit"] = {{"objective", r.objective},
                {"radial_distance", r.radial_distance},
                {"iterations", r.iterations},
                {"best_restart", r.best_restart},
                {"converged", r.converged},
                {"convergence_failure", r.convergence_failure},
                {"grid_size", r.grid_size},
                {"trace", r.trace}};
  if (o.curve) {
    Json curve = Json::array();
    for (const FitCurvePoint& p : fit_error_curve(k, o.a, o.terms, c))
      curve.push_back({{"num_terms", p.num_terms}, {"radial_distance", p.radial_distance},
                       {"fit_radial_distance", p.fit_radial_distance}});
    out["error_curve"] = curve;
  }
  out["run"] = run_info("fit", o, config);
  out["timing"] = timing(start);
  write_json(o.out, out);
  std::printf("fit n=%d a=%d terms=%d: d_r %.6g%s\n", k.dim(), o.a, o.terms, r.radial_distance,
              r.convergence_failure ? " (convergence failure)" : "");
  return r.convergence_failure ? 3 : 0;
}

int cmd_threshold(const Options& o) {
  require(o.out, "--out");
  const auto start = std::chrono::steady_clock::now();
  Perturbation phi;
  if (!o.phi.empty()) {
    const Json j = read_json_file(o.phi);
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw DescriptorError("perturbation.dim missing");
    phi = perturbation_from_json(j, j["dim"].get<int>());
  } else {
    require(o.body, "--body or --phi");
    const StarBody k = load_body(o.body);
    if (k.kind() != BodyKind::perturbed_ball) throw UsageError("--body must be a perturbed_ball descriptor");
    phi = k.perturbation();
  }
  ThresholdConfig c;
  c.bisection_tol = o.bisection_tol;
  c.upper = o.upper;
  c.midpoint.pairs = o.pairs;
  c.midpoint.seed = o.seed;
  c.curvature.seed = o.seed;
  const ThresholdReport r = convexity_threshold(phi, o.a, c);
  Json out = threshold_report_to_json(r);
  out["perturbation"] = perturbation_to_json(phi);
  out["run"] = run_info("threshold", o,
                        {{"a", o.a}, {"bisection_tol", c.bisection_tol}, {"upper", c.upper},
                         {"pairs", c.midpoint.pairs}, {"curvature_points", c.curvature.points}});
  out["timing"] = timing(start);
  write_json(o.out, out);
  std::printf("threshold n=%d a=%d: eps* = %.6g (%s, %zu evaluations, %d flip%s)\n", r.dim, r.a, r.eps_star,
              to_string(r.method), r.trace.size(), r.flips(), r.flips() == 1 ? "" : "s");
  return 0;
}

// Powers and dilations of balls stay balls.
std::optional<double> ball_radius(const StarBody& k) {
  if (k.kind() == BodyKind::ball) return 1.0;
  if (k.kind() == BodyKind::dilate) {
    if (auto r = ball_radius(k.children().front())) return *r * k.factor();
  }
  return std::nullopt;
}

Json ball_json(int n, double radius) {
  Json j = {{"dim", n}, {"type", "ball"}};
  if (radius != 1.0) j["radius"] = radius;
  return j;
}

int cmd_transform(const Options& o) {
  require(o.body, "--body");
  require(o.out, "--out");
  require(o.op, "--op");
  const auto start = std::chrono::steady_clock::now();
  const StarBody k = load_body(o.body);
  const int bandlimit = o.bandlimit > 0 ? o.bandlimit : default_bandlimit(k.dim());
  BodyTransformOptions options;
  options.residual_tolerance = o.residual_tol;
  Json out;
  Json config = {{"op", o.op}};
  if (o.op == "funk" || o.op == "funk_inverse") {
    const HarmonicExpansion e =
        o.op == "funk" ? funk_transform_body(k, bandlimit, options) : funk_inverse_body(k, bandlimit, options);
    out = body_to_json(from_expansion(e));
    config["bandlimit"] = bandlimit;
    config["residual_tolerance"] = options.residual_tolerance;
  } else if (o.op == "power") {
    if (auto r = ball_radius(k))
      out = ball_json(k.dim(), std::pow(*r, o.alpha));
    else
      out = body_to_json(power_transform(k, o.alpha));
    config["alpha"] = o.alpha;
  } else if (o.op == "radial_sum") {
    require(o.body2, "--body2");
    const StarBody l = load_body(o.body2);
    if (k.dim() != l.dim()) throw UsageError("--body and --body2 have different dimensions");
    out = body_to_json(radial_sum_k({k, l}, o.k));
    config["k"] = o.k;
  } else {
    throw UsageError("--op must be funk, funk_inverse, power or radial_sum");
  }
  out["run"] = run_info("transform", o, config);
  out["timing"] = timing(start);
  write_json(o.out, out);
  std::printf("transform %s n=%d: wrote %s (%s)\n", o.op.c_str(), k.dim(), o.out.c_str(),
              out["type"].get<std::string>().c_str());
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--body", o.body, "body descriptor JSON");
  cmd->add_option("--body2", o.body2, "second body descriptor JSON");
  cmd->add_option("--a", o.a, "codimension a")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--bandlimit", o.bandlimit, "harmonic bandlimit L (0: default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output file");
  cmd->add_option("--n-g", o.n_g, "positivity samples")->check(CLI::PositiveNumber);
  cmd->add_option("--n-rec", o.n_rec, "reconstruction test directions")->check(CLI::PositiveNumber);
  cmd->add_option("--rule-size", o.rule_size, "subsphere quadrature size (0: exact)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geotomo: geometric tomography toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  CLI::App* certify = app.add_subcommand("certify", "positivity certificate for rho_K^(1/(n-a))");
  add_common(certify, o);
  certify->add_option("--rec-samples", o.rec_samples, "Monte Carlo samples per test direction")->check(CLI::PositiveNumber);
  certify->add_option("--inner-samples", o.inner_samples, "inner samples of h")->check(CLI::PositiveNumber);
  certify->add_option("--pos-tol", o.pos_tol, "relative positivity tolerance");
  certify->add_option("--rec-rel-tol", o.rec_rel_tol, "relative reconstruction tolerance");
  certify->add_option("--residual-tol", o.residual_tol, "expansion residual tolerance");
  certify->add_option("--attestation", o.attestation, "convexity attestation recorded in the certificate");
  certify->add_flag("--strict", o.strict, "demand min >= -3 SE");

  CLI::App* sections = app.add_subcommand("sections", "compare section volumes of two bodies");
  add_common(sections, o);
  sections->add_option("--m", o.m, "section dimension")->check(CLI::PositiveNumber);
  sections->add_option("--sections", o.sections, "number of Haar sections")->check(CLI::PositiveNumber);

  CLI::App* fit = app.add_subcommand("fit", "fit a sum of ellipsoid powers");
  add_common(fit, o);
  fit->add_option("--terms", o.terms, "number of terms")->check(CLI::PositiveNumber);
  fit->add_option("--restarts", o.restarts, "random restarts")->check(CLI::PositiveNumber);
  fit->add_option("--max-iters", o.max_iters, "iterations per restart")->check(CLI::PositiveNumber);
  fit->add_option("--grid-size", o.grid_size, "objective grid size (0: default)")->check(CLI::NonNegativeNumber);
  fit->add_flag("--curve", o.curve, "also report the error curve for 1..terms");

  CLI::App* threshold = app.add_subcommand("threshold", "empirical convexity threshold of 1 + eps phi");
  add_common(threshold, o);
  threshold->add_option("--phi", o.phi, "perturbation JSON with a dim field");
  threshold->add_option("--bisection-tol", o.bisection_tol, "bisection tolerance")->check(CLI::PositiveNumber);
  threshold->add_option("--upper", o.upper, "upper end of the eps bracket");
  threshold->add_option("--pairs", o.pairs, "midpoint pairs (n >= 4)")->check(CLI::PositiveNumber);

  CLI::App* transform = app.add_subcommand("transform", "funk, funk_inverse, power or radial_sum");
  add_common(transform, o);
  transform->add_option("--op", o.op, "transform")->check(CLI::IsMember({"funk", "funk_inverse", "power", "radial_sum"}));
  transform->add_option("--alpha", o.alpha, "power exponent")->check(CLI::PositiveNumber);
  transform->add_option("--k", o.k, "radial sum exponent")->check(CLI::PositiveNumber);
  transform->add_option("--residual-tol", o.residual_tol, "expansion residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*certify) return cmd_certify(o);
    if (*sections) return cmd_sections(o);
    if (*fit) return cmd_fit(o);
    if (*threshold) return cmd_threshold(o);
    if (*transform) return cmd_transform(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
