#pragma once

// Positivity-and-reconstruction certificates for the bodies K_a with
// rho_{K_a} = rho_K^{1/(n-a)}, a = 2, 3, and sampled section/volume
// comparisons between two bodies.
//
// Pipeline for a body K in R^n:
//   u    = R^{-1}(rho_K)                           (spectral, bandlimit L)
//   g(F) = \int_{S^{n-1} ∩ F^perp} u               F in G(n, 3)
//   h(J) = mean of g over F in G(n, 3) with J ⊂ F  J in G(n, 2), a = 2 only
// and the certificate checks g >= 0 (h >= 0) on Haar samples and
// rho_K = R_3^* g (rho_K = R_2^* h) at Haar test directions.

#include <optional>
#include <string>

#include "json.hpp"

#include "geotomo/radon.hpp"
#include "geotomo/star_bodies.hpp"

namespace geotomo {

struct CertifyConfig {
  int bandlimit = 0;          // 0: default_bandlimit(n)
  int n_g = 2000;             // positivity samples
  int n_rec = 200;            // reconstruction test directions
  int rec_samples = 4000;     // Monte Carlo samples of R_m^* per test direction
  int rec_inner_samples = 1;  // inner samples of h per outer plane (a = 2)
  int inner_samples = 64;     // inner samples of h at positivity planes (a = 2)
  int rule_size = 0;          // subsphere rule for g; 0: exact for degree L
  double pos_tol = 1e-3;
  bool strict = false;        // demand min >= -3 SE instead of the relative tolerance
  double rec_rel_tol = 1e-2;
  BodyTransformOptions transform;
  std::string convexity_attestation = "caller";
  std::uint64_t seed = 0;
};

struct DensityStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double max_abs = 0.0;
  double mean = 0.0;
  double mean_standard_error = 0.0;
  double standard_error_at_min = 0.0;
  double threshold = 0.0;  // smallest accepted min
  bool passed = false;
};

struct ReconstructionStats {
  std::size_t directions = 0;
  std::size_t samples_per_direction = 0;
  double sup_error = 0.0;
  double standard_error_at_sup = 0.0;
  double max_standard_error = 0.0;
  double sup_rho = 0.0;
  double tolerance = 0.0;
  double mean_ratio = 0.0;  // mean of rho_K / R_m^*(density); should be 1
  Vector worst_direction;
  bool passed = false;
};

enum class Verdict { certified, failed_positivity, failed_reconstruction, inconclusive };
const char* to_string(Verdict v);

struct Certificate {
  int dim = 0;
  int a = 3;
  CertifyConfig config;
  double expansion_residual = 0.0;  // relative to sup rho_K
  double surrogate_error = 0.0;     // relative error of the polynomial evaluator of u
  bool surrogate_used = false;
  double u_sup = 0.0;
  double u_min = 0.0;
  DensityStats g;
  std::optional<DensityStats> h;
  ReconstructionStats reconstruction;
  Verdict verdict = Verdict::inconclusive;
  std::string diagnostics;
  double wall_seconds = 0.0;
};

/// u = R^{-1}(rho_K) with a fast evaluator, and the densities g, h built from it.
class CertificateDensities {
 public:
  CertificateDensities(const StarBody& k, const CertifyConfig& config);
  /// From an already inverted expansion.
  CertificateDensities(HarmonicExpansion u, const CertifyConfig& config);

  int dim() const { return n_; }
  int bandlimit() const { return u_.max_degree(); }
  const HarmonicExpansion& u_expansion() const { return u_; }
  double expansion_residual() const { return residual_; }
  bool surrogate_used() const { return surrogate_.has_value(); }
  double surrogate_error() const { return surrogate_error_; }

  double u(const VecRef& x) const;
  /// \int_{S^{n-1} ∩ E} u dsigma for E given by an orthonormal n x m frame.
  double integrate_u(const Matrix& frame) const;
  /// g(F) for F in G(n, 3).
  double g(const Subspace& f) const;
  /// g(F) given F^perp.
  double g_from_perp(const Matrix& perp) const;
  /// h(J) for J in G(n, 2): mean of g over `inner` Haar F containing J.
  Estimate h(const Subspace& j, int inner, Rng& gen) const;

  GrassmannDensity g_density() const;
  /// Inner samples are seeded from the plane's frame, so the density is a
  /// deterministic function of J.
  GrassmannDensity h_density(int inner) const;

 private:
  CertificateDensities(const HarmonicExpansion& rho, const StarBody& k, const CertifyConfig& config);
  void init(const CertifyConfig& config);

  int n_;
  HarmonicExpansion u_;
  double residual_ = 0.0;
  std::optional<HomogeneousPolynomial> surrogate_;
  double surrogate_error_ = 0.0;
  int rule_size_ = 0;
  Matrix base_nodes_;  // m = n - 3 >= 3: hemisphere half of a product rule on S^{m-1}
  Vector base_weights_;
};

/// \int_{S^{n-1} ∩ E} R^{-1}(rho_K) dsigma for E in G(n, n-3); exact
/// quadrature, so the standard error is zero.
Estimate whole_point_check(const StarBody& k, const Subspace& e, int bandlimit = 0,
                           int rule_size = 0);
Estimate whole_point_check(const CertificateDensities& densities, const Subspace& e);

Certificate certify_low_codim(const StarBody& k, int a, const CertifyConfig& config);

enum class Implication { consistent, hypothesis_violated, conclusion_violated };
const char* to_string(Implication v);

struct SectionRecord {
  double volume_k = 0.0;
  double volume_l = 0.0;
  double margin = 0.0;  // volume_l - volume_k
};

struct SectionReport {
  int dim = 0;
  int m = 0;
  std::size_t sections = 0;
  double fraction_dominated = 0.0;  // share of E with Vol(K ∩ E) <= Vol(L ∩ E)
  double worst_margin = 0.0;        // min over E of Vol(L ∩ E) - Vol(K ∩ E)
  double worst_relative_margin = 0.0;
  double volume_k = 0.0;
  double volume_l = 0.0;
  Implication implication = Implication::consistent;
  std::vector<SectionRecord> records;
};

struct SectionConfig {
  int m = 3;
  int sections = 500;
  int rule_size = 4096;
  double volume_tolerance = 1e-9;  // relative slack on Vol(K) <= Vol(L)
  std::uint64_t seed = 0;
};

SectionReport section_dominance_check(const StarBody& k, const StarBody& l, const SectionConfig& config);

nlohmann::json certificate_to_json(const Certificate& c, const nlohmann::json& body_descriptor);
nlohmann::json section_report_to_json(const SectionReport& r);
std::string section_report_to_csv(const SectionReport& r);

}  // namespace geotomo
