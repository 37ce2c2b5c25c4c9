#include "geotomo/star_bodies.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace geotomo {

namespace {

struct IntersectionCache {
  std::mutex mutex;
  std::unordered_map<std::string, double> values;
};

std::string key_of(const VecRef& theta) {
  std::string key(sizeof(double) * static_cast<std::size_t>(theta.size()), '\0');
  for (Index i = 0; i < theta.size(); ++i) {
    const double v = theta(i);
    std::memcpy(key.data() + sizeof(double) * i, &v, sizeof(double));
  }
  return key;
}

double checked(double v, const VecRef& theta, BodyKind kind) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidBody(std::string("non-positive radial value ") + std::to_string(v) + " of " +
                      to_string(kind) + " body at " + format_vector(theta));
  return v;
}

// Value, first and second derivative of the normalized zonal profile
// t -> C_d^nu(t) / C_d^nu(1).
void zonal_profile(int n, int d, double t, double& value, double& first, double& second) {
  const double nu = (n - 2) / 2.0;
  const double norm = gegenbauer(nu, d, 1.0);
  t = std::clamp(t, -1.0, 1.0);
  value = gegenbauer(nu, d, t) / norm;
  // d/dt C_d^nu = 2 nu C_{d-1}^{nu+1}; for nu = 0, d/dt T_d = d C_{d-1}^1.
  const double c1 = nu == 0.0 ? d : 2.0 * nu;
  const double c2 = nu == 0.0 ? 2.0 * d : 4.0 * nu * (nu + 1.0);
  first = d >= 1 ? c1 * gegenbauer(nu + 1.0, d - 1, t) / norm : 0.0;
  second = d >= 2 ? c2 * gegenbauer(nu + 2.0, d - 2, t) / norm : 0.0;
}

}  // namespace

struct BodyNode {
  BodyKind kind = BodyKind::ball;
  int dim = 0;
  Matrix matrix;
  double p = 2.0;
  double epsilon = 0.0;
  Perturbation phi;
  std::shared_ptr<const HarmonicExpansion> expansion;
  SphereFunction function;
  std::string label;
  bool smooth = true;
  double exponent = 1.0;
  double factor = 1.0;
  std::vector<StarBody> children;
  int rule_size = 0;
  std::shared_ptr<IntersectionCache> cache;

  double radial(const VecRef& theta) const;
  Vector radial_many(const Matrix& thetas) const;
};

double unit_ball_volume(int m) {
  if (m < 0) throw InvalidArgument("unit_ball_volume: negative dimension");
  return std::pow(M_PI, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

const char* to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::lp: return "lp";
    case BodyKind::perturbed_ball: return "perturbed_ball";
    case BodyKind::expansion: return "expansion";
    case BodyKind::function: return "function";
    case BodyKind::power: return "power";
    case BodyKind::radial_sum: return "radial_sum";
    case BodyKind::dilate: return "dilate";
    case BodyKind::intersection_body: return "intersection_body";
  }
  return "?";
}

const char* to_string(Perturbation::Kind kind) {
  switch (kind) {
    case Perturbation::Kind::zero: return "zero";
    case Perturbation::Kind::zonal: return "zonal";
    case Perturbation::Kind::quadratic: return "quadratic";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Perturbation

Perturbation Perturbation::zero(int n) {
  if (n < 2) throw InvalidArgument("zero perturbation: dimension must be >= 2");
  Perturbation phi;
  phi.axis = Vector::Zero(n);
  return phi;
}

Perturbation Perturbation::zonal(int degree, Vector axis, double scale) {
  if (degree < 0 || degree % 2 != 0) throw InvalidArgument("zonal perturbation: degree must be even");
  if (axis.size() < 2) throw InvalidArgument("zonal perturbation: axis dimension must be >= 2");
  const double norm = axis.norm();
  if (!(norm > 0.0)) throw InvalidArgument("zonal perturbation: zero axis");
  Perturbation phi;
  phi.kind = Kind::zonal;
  phi.degree = degree;
  phi.axis = axis / norm;
  phi.scale = scale;
  return phi;
}

Perturbation Perturbation::quadratic(Matrix b, double scale) {
  if (b.rows() != b.cols() || b.rows() < 2)
    throw InvalidArgument("quadratic perturbation: matrix must be square, dimension >= 2");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("quadratic perturbation: matrix not symmetric");
  Perturbation phi;
  phi.kind = Kind::quadratic;
  phi.matrix = 0.5 * (b + b.transpose());
  phi.scale = scale;
  return phi;
}

int Perturbation::dim() const {
  switch (kind) {
    case Kind::zero:
    case Kind::zonal: return static_cast<int>(axis.size());
    case Kind::quadratic: return static_cast<int>(matrix.rows());
  }
  return 0;
}

double Perturbation::operator()(const VecRef& x) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::zonal: {
      const double nu = (x.size() - 2) / 2.0;
      const double t = std::clamp(axis.dot(x), -1.0, 1.0);
      return scale * gegenbauer(nu, degree, t) / gegenbauer(nu, degree, 1.0);
    }
    case Kind::quadratic: return scale * x.dot(matrix * x);
  }
  return 0.0;
}

Perturbation Perturbation::scaled(double f) const {
  Perturbation out = *this;
  out.scale *= f;
  return out;
}

void Perturbation::normal_derivatives(const VecRef& x, Vector& gradient, Matrix& hessian) const {
  const Index n = x.size();
  const Matrix tangent = hyperplane_orthogonal_to(Vector(x)).frame();
  Vector ambient_gradient = Vector::Zero(n);
  Matrix ambient_hessian = Matrix::Zero(n, n);
  switch (kind) {
    case Kind::zero: break;
    case Kind::zonal: {
      double value, first, second;
      zonal_profile(static_cast<int>(n), degree, axis.dot(x), value, first, second);
      ambient_gradient = scale * first * axis;
      ambient_hessian = scale * second * axis * axis.transpose();
      break;
    }
    case Kind::quadratic:
      ambient_gradient = 2.0 * scale * matrix * x;
      ambient_hessian = 2.0 * scale * matrix;
      break;
  }
  // exp_x(v) = x cos|v| + v sin|v| / |v| = x + v - |v|^2 x / 2 + O(|v|^3)
  gradient = tangent.transpose() * ambient_gradient;
  hessian = tangent.transpose() * ambient_hessian * tangent;
  hessian.diagonal().array() -= x.dot(ambient_gradient);
}

PerturbationBounds perturbation_bounds(const Perturbation& phi, const Matrix& directions) {
  PerturbationBounds b;
  b.grid_size = static_cast<std::size_t>(directions.cols());
  Vector g;
  Matrix h;
  for (Index i = 0; i < directions.cols(); ++i) {
    const VecRef x = directions.col(i);
    b.sup_value = std::max(b.sup_value, std::abs(phi(x)));
    phi.normal_derivatives(x, g, h);
    b.sup_first = std::max(b.sup_first, g.cwiseAbs().maxCoeff());
    b.sup_second = std::max(b.sup_second, h.cwiseAbs().maxCoeff());
  }
  return b;
}

PerturbationBounds perturbation_bounds(const Perturbation& phi, int count, std::uint64_t seed) {
  Matrix directions = sample_sphere_uniform(phi.dim(), count, seed);
  if (phi.kind == Perturbation::Kind::zonal) {
    directions.conservativeResize(Eigen::NoChange, count + 1);
    directions.col(count) = phi.axis;
  }
  return perturbation_bounds(phi, directions);
}

// ---------------------------------------------------------------------------
// Evaluation

double BodyNode::radial(const VecRef& theta) const {
  double v = 0.0;
  switch (kind) {
    case BodyKind::ball: v = 1.0; break;
    case BodyKind::ellipsoid: v = 1.0 / std::sqrt(theta.dot(matrix * theta)); break;
    case BodyKind::lp: {
      double s = 0.0;
      for (Index i = 0; i < theta.size(); ++i) s += std::pow(std::abs(theta(i)), p);
      v = std::pow(s, -1.0 / p);
      break;
    }
    case BodyKind::perturbed_ball: v = 1.0 + epsilon * phi(theta); break;
    case BodyKind::expansion: v = (*expansion)(theta); break;
    case BodyKind::function: v = function(theta); break;
    case BodyKind::power: v = std::pow(children[0].radial(theta), exponent); break;
    case BodyKind::radial_sum: {
      double s = 0.0;
      for (const StarBody& c : children) s += std::pow(c.radial(theta), exponent);
      v = std::pow(s, 1.0 / exponent);
      break;
    }
    case BodyKind::dilate: v = factor * children[0].radial(theta); break;
    case BodyKind::intersection_body: {
      const std::string key = key_of(theta);
      {
        std::lock_guard<std::mutex> lock(cache->mutex);
        auto it = cache->values.find(key);
        if (it != cache->values.end()) return it->second;
      }
      v = section_volume(children[0], hyperplane_orthogonal_to(Vector(theta)), rule_size);
      std::lock_guard<std::mutex> lock(cache->mutex);
      if (cache->values.size() > 200000) cache->values.clear();
      cache->values.emplace(key, v);
      break;
    }
  }
  return checked(v, theta, kind);
}

Vector BodyNode::radial_many(const Matrix& thetas) const {
  const Index count = thetas.cols();
  Vector out(count);
  switch (kind) {
    case BodyKind::expansion: out = expansion->evaluate(thetas); break;
    case BodyKind::power:
      out = children[0].radial_many(thetas).array().pow(exponent).matrix();
      break;
    case BodyKind::radial_sum: {
      Eigen::ArrayXd s = Eigen::ArrayXd::Zero(count);
      for (const StarBody& c : children) s += c.radial_many(thetas).array().pow(exponent);
      out = s.pow(1.0 / exponent).matrix();
      break;
    }
    case BodyKind::dilate: out = factor * children[0].radial_many(thetas); break;
    default:
      for (Index i = 0; i < count; ++i) out(i) = radial(thetas.col(i));
      return out;
  }
  for (Index i = 0; i < count; ++i) checked(out(i), thetas.col(i), kind);
  return out;
}

// ---------------------------------------------------------------------------
// StarBody

StarBody::StarBody(std::shared_ptr<const BodyNode> node) : node_(std::move(node)) {
  if (!node_) throw InvalidArgument("StarBody: null node");
}

int StarBody::dim() const { return node_->dim; }
BodyKind StarBody::kind() const { return node_->kind; }
double StarBody::radial(const VecRef& theta) const {
  if (theta.size() != node_->dim)
    throw InvalidArgument("radial: direction of dimension " + std::to_string(theta.size()) +
                          " for a body in R^" + std::to_string(node_->dim));
  return node_->radial(theta);
}
Vector StarBody::radial_many(const Matrix& thetas) const {
  if (thetas.rows() != node_->dim) throw InvalidArgument("radial: dimension mismatch");
  return node_->radial_many(thetas);
}

SphereFunction StarBody::radial_function() const {
  return [node = node_](const VecRef& theta) { return node->radial(theta); };
}

bool StarBody::is_smooth() const {
  switch (node_->kind) {
    case BodyKind::lp: return node_->p >= 2.0;
    case BodyKind::function: return node_->smooth;
    case BodyKind::power:
    case BodyKind::radial_sum:
    case BodyKind::dilate:
    case BodyKind::intersection_body:
      for (const StarBody& c : node_->children)
        if (!c.is_smooth()) return false;
      return true;
    default: return true;
  }
}

namespace {
void require(const BodyNode& node, std::initializer_list<BodyKind> kinds, const char* what) {
  for (BodyKind k : kinds)
    if (node.kind == k) return;
  throw InvalidArgument(std::string(what) + " is not defined for a " + to_string(node.kind) + " body");
}
}  // namespace

const Matrix& StarBody::matrix() const {
  require(*node_, {BodyKind::ellipsoid}, "matrix");
  return node_->matrix;
}
double StarBody::p() const {
  require(*node_, {BodyKind::lp}, "p");
  return node_->p;
}
double StarBody::epsilon() const {
  require(*node_, {BodyKind::perturbed_ball}, "epsilon");
  return node_->epsilon;
}
const Perturbation& StarBody::perturbation() const {
  require(*node_, {BodyKind::perturbed_ball}, "perturbation");
  return node_->phi;
}
const HarmonicExpansion& StarBody::expansion() const {
  require(*node_, {BodyKind::expansion}, "expansion");
  return *node_->expansion;
}
double StarBody::exponent() const {
  require(*node_, {BodyKind::power, BodyKind::radial_sum}, "exponent");
  return node_->exponent;
}
double StarBody::factor() const {
  require(*node_, {BodyKind::dilate}, "factor");
  return node_->factor;
}
const std::vector<StarBody>& StarBody::children() const { return node_->children; }
int StarBody::rule_size() const {
  require(*node_, {BodyKind::intersection_body}, "rule_size");
  return node_->rule_size;
}
const std::string& StarBody::label() const {
  require(*node_, {BodyKind::function}, "label");
  return node_->label;
}

// ---------------------------------------------------------------------------
// Constructors

namespace {
std::shared_ptr<BodyNode> make_node(BodyKind kind, int n) {
  if (n < 2) throw InvalidArgument(std::string(to_string(kind)) + ": dimension must be >= 2");
  auto node = std::make_shared<BodyNode>();
  node->kind = kind;
  node->dim = n;
  return node;
}
}  // namespace

StarBody ball(int n) { return StarBody(make_node(BodyKind::ball, n)); }

StarBody ellipsoid(Matrix a, double eigenvalue_floor) {
  if (a.rows() != a.cols()) throw InvalidArgument("ellipsoid: matrix must be square");
  if (!a.allFinite()) throw InvalidBody("ellipsoid: matrix has non-finite entries");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw InvalidBody("ellipsoid: matrix not symmetric");
  const double smallest =
      Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (!(smallest >= eigenvalue_floor) || !(smallest > 0.0))
    throw InvalidBody("ellipsoid: matrix not positive definite (smallest eigenvalue " +
                      std::to_string(smallest) + ")");
  auto node = make_node(BodyKind::ellipsoid, static_cast<int>(a.rows()));
  node->matrix = std::move(a);
  return StarBody(node);
}

StarBody ellipsoid_axes(const Vector& semi_axes) {
  if ((semi_axes.array() <= 0.0).any()) throw InvalidBody("ellipsoid: semi-axes must be positive");
  return ellipsoid(Matrix(semi_axes.array().square().inverse().matrix().asDiagonal()));
}

StarBody lp_ball(int n, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("lp_ball: p must be positive and finite");
  auto node = make_node(BodyKind::lp, n);
  node->p = p;
  return StarBody(node);
}

StarBody perturbed_ball(double eps, const Perturbation& phi) {
  if (!std::isfinite(eps)) throw InvalidArgument("perturbed_ball: non-finite epsilon");
  auto node = make_node(BodyKind::perturbed_ball, phi.dim());
  node->epsilon = eps;
  node->phi = phi;
  StarBody body(node);
  validate_body(body);
  return body;
}

StarBody from_expansion(HarmonicExpansion expansion) {
  auto node = make_node(BodyKind::expansion, expansion.dim());
  node->expansion = std::make_shared<const HarmonicExpansion>(std::move(expansion));
  return StarBody(node);
}

StarBody from_function(int n, SphereFunction rho, std::string label, bool smooth) {
  if (!rho) throw InvalidArgument("from_function: empty function");
  auto node = make_node(BodyKind::function, n);
  node->function = std::move(rho);
  node->label = std::move(label);
  node->smooth = smooth;
  return StarBody(node);
}

StarBody power_transform(const StarBody& k, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidArgument("power_transform: alpha must be positive");
  auto node = make_node(BodyKind::power, k.dim());
  node->exponent = alpha;
  node->children = {k};
  return StarBody(node);
}

StarBody radial_sum_k(const std::vector<StarBody>& bodies, double k) {
  if (bodies.empty()) throw InvalidArgument("radial_sum_k: empty body list");
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("radial_sum_k: k must be positive");
  for (const StarBody& b : bodies)
    if (b.dim() != bodies.front().dim()) throw InvalidArgument("radial_sum_k: dimension mismatch");
  auto node = make_node(BodyKind::radial_sum, bodies.front().dim());
  node->exponent = k;
  node->children = bodies;
  return StarBody(node);
}

StarBody dilate(const StarBody& k, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("dilate: factor must be positive");
  auto node = make_node(BodyKind::dilate, k.dim());
  node->factor = c;
  node->children = {k};
  return StarBody(node);
}

StarBody intersection_body_of(const StarBody& l, int rule_size) {
  if (rule_size < 2) throw InvalidArgument("intersection_body_of: rule_size must be >= 2");
  auto node = make_node(BodyKind::intersection_body, l.dim());
  node->children = {l};
  node->rule_size = rule_size;
  node->cache = std::make_shared<IntersectionCache>();
  return StarBody(node);
}

// ---------------------------------------------------------------------------
// Functionals

double minkowski_functional(const StarBody& k, const VecRef& x) {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return r / k.radial(Vector(x / r));
}

QuadratureRule default_volume_rule(int n) {
  if (n < 2) throw InvalidArgument("default_volume_rule: need n >= 2");
  int q = 1;
  while (product_rule_size(n, q + 1) <= 30000) ++q;
  return sphere_product_rule(n, q);
}

namespace {
double integrate_power(const StarBody& k, const QuadratureRule& rule, int power) {
  const Vector rho = k.radial_many(rule.nodes());
  return integrate_values(Vector(rho.array().pow(power).matrix()), rule);
}
}  // namespace

double volume(const StarBody& k, const QuadratureRule& rule) {
  if (rule.dim() != k.dim()) throw InvalidArgument("volume: rule dimension mismatch");
  return unit_ball_volume(k.dim()) * integrate_power(k, rule, k.dim());
}

double volume(const StarBody& k) { return volume(k, default_volume_rule(k.dim())); }

double section_volume(const StarBody& k, const Subspace& e, const QuadratureRule& rule) {
  if (e.ambient_dim() != k.dim() || rule.dim() != k.dim())
    throw InvalidArgument("section_volume: dimension mismatch");
  const int m = static_cast<int>(e.dim());
  return unit_ball_volume(m) * integrate_power(k, rule, m);
}

double section_volume(const StarBody& k, const Subspace& e, int rule_size) {
  return section_volume(k, e, subsphere_quadrature(e, rule_size));
}

RadialDistance radial_distance(const StarBody& k, const StarBody& l, const Matrix& grid) {
  if (k.dim() != l.dim() || grid.rows() != k.dim())
    throw InvalidArgument("radial_distance: dimension mismatch");
  const Vector diff = k.radial_many(grid) - l.radial_many(grid);
  return {grid.cols() ? diff.cwiseAbs().maxCoeff() : 0.0, static_cast<std::size_t>(grid.cols())};
}

RadialDistance radial_distance(const StarBody& k, const StarBody& l, int count, std::uint64_t seed) {
  return radial_distance(k, l, sample_sphere_uniform(k.dim(), count, seed));
}

void validate_body(const StarBody& k, int count, std::uint64_t seed) {
  const Matrix grid = sample_sphere_uniform(k.dim(), count, seed);
  const Vector plus = k.radial_many(grid);
  const Vector minus = k.radial_many(Matrix(-grid));
  for (Index i = 0; i < grid.cols(); ++i) {
    if (std::abs(plus(i) - minus(i)) > 1e-12 * std::max(1.0, std::abs(plus(i))))
      throw InvalidBody(std::string(to_string(k.kind())) + " body is not even at " +
                        format_vector(grid.col(i)));
  }
}

}  // namespace geotomo
