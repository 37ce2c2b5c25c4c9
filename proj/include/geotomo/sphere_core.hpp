#pragma once

// Vectors, spheres, subspaces, Haar sampling and quadrature on S^{n-1}.
//
// Every measure here is probability-normalized: integrating the constant 1
// against any rule gives 1, and Haar samplers draw from the unique
// rotation-invariant probability measure on the sphere / Grassmannian.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "geotomo/errors.hpp"
#include "geotomo/rng.hpp"

namespace geotomo {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using VecRef = Eigen::Ref<const Vector>;

template <typename Derived>
std::string format_vector(const Eigen::MatrixBase<Derived>& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Direction

template <typename Scalar>
class DirectionT {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  explicit DirectionT(VectorX<Scalar> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2 || !(std::abs(coords_.norm() - Scalar(1)) <= Scalar(kUnitTolerance)))
      throw InvalidArgument("direction is not a unit vector: " + format_vector(coords_));
  }

  template <typename Derived>
  static DirectionT normalized(const Eigen::MatrixBase<Derived>& v) {
    const Scalar norm = v.norm();
    if (!(norm > Scalar(0)) || !std::isfinite(static_cast<double>(norm)))
      throw InvalidArgument("cannot normalize a zero or non-finite vector");
    return DirectionT(VectorX<Scalar>(v / norm));
  }

  static DirectionT axis(Index n, Index i) {
    VectorX<Scalar> e = VectorX<Scalar>::Zero(n);
    e(i) = Scalar(1);
    return DirectionT(std::move(e));
  }

  const VectorX<Scalar>& coords() const { return coords_; }
  Index dim() const { return coords_.size(); }
  Scalar operator()(Index i) const { return coords_(i); }
  operator const VectorX<Scalar>&() const { return coords_; }  // NOLINT
  DirectionT operator-() const { return DirectionT(VectorX<Scalar>(-coords_)); }

 private:
  VectorX<Scalar> coords_;
};

using Direction = DirectionT<double>;

// ---------------------------------------------------------------------------
// Subspace

/// Orthonormalizes the columns of `a` by Householder QR with the sign of each
/// column fixed so that the triangular factor has a positive diagonal.
template <typename Derived>
MatrixX<typename Derived::Scalar> orthonormal_frame(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  const Index m = a.cols();
  if (m < 1 || m > n) throw InvalidArgument("orthonormal_frame: need 1 <= columns <= rows");
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(a);
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(n, m);
  const Scalar scale = a.cwiseAbs().maxCoeff();
  for (Index j = 0; j < m; ++j) {
    const Scalar r = qr.matrixQR()(j, j);
    if (!(std::abs(r) > Scalar(1e-13) * scale))
      throw InvalidArgument("orthonormal_frame: columns are linearly dependent");
    if (r < Scalar(0)) q.col(j) = -q.col(j);
  }
  return q;
}

template <typename Scalar>
class SubspaceT {
 public:
  static constexpr double kOrthonormalTolerance = 1e-10;

  explicit SubspaceT(MatrixX<Scalar> frame) : frame_(std::move(frame)) {
    if (frame_.rows() < 1 || frame_.cols() < 1 || frame_.cols() > frame_.rows())
      throw InvalidArgument("subspace frame must be n x m with 1 <= m <= n");
    const MatrixX<Scalar> gram = frame_.transpose() * frame_;
    const MatrixX<Scalar> defect = gram - MatrixX<Scalar>::Identity(dim(), dim());
    if (!(defect.cwiseAbs().maxCoeff() <= Scalar(kOrthonormalTolerance)))
      throw InvalidArgument("subspace frame is not orthonormal");
  }

  /// Span of the columns of `vectors` (must be linearly independent).
  template <typename Derived>
  static SubspaceT span(const Eigen::MatrixBase<Derived>& vectors) {
    return SubspaceT(orthonormal_frame(vectors));
  }

  /// span(e_{axes[0]}, e_{axes[1]}, ...) in R^n.
  static SubspaceT coordinate(Index n, std::initializer_list<Index> axes) {
    MatrixX<Scalar> f = MatrixX<Scalar>::Zero(n, static_cast<Index>(axes.size()));
    Index j = 0;
    for (Index a : axes) {
      if (a < 0 || a >= n) throw InvalidArgument("coordinate subspace axis out of range");
      f(a, j++) = Scalar(1);
    }
    return SubspaceT(std::move(f));
  }

  Index ambient_dim() const { return frame_.rows(); }
  Index dim() const { return frame_.cols(); }
  const MatrixX<Scalar>& frame() const { return frame_; }
  MatrixX<Scalar> projector() const { return frame_ * frame_.transpose(); }

  /// Orthonormal frame of the orthogonal complement; throws when dim() == n.
  SubspaceT complement() const {
    const Index n = ambient_dim();
    const Index m = dim();
    if (m == n) throw InvalidArgument("complement of the full space is trivial");
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(frame_);
    MatrixX<Scalar> full = qr.householderQ() * MatrixX<Scalar>::Identity(n, n);
    return SubspaceT(MatrixX<Scalar>(full.rightCols(n - m)));
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& v, Scalar tol = Scalar(1e-10)) const {
    const VectorX<Scalar> residual = v - frame_ * (frame_.transpose() * v);
    return residual.norm() <= tol * std::max(Scalar(1), Scalar(v.norm()));
  }

 private:
  MatrixX<Scalar> frame_;
};

using Subspace = SubspaceT<double>;

/// The line spanned by a direction.
template <typename Derived>
SubspaceT<typename Derived::Scalar> line_through(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  return SubspaceT<Scalar>(MatrixX<Scalar>(v / v.norm()));
}

/// The hyperplane v^perp.
template <typename Derived>
SubspaceT<typename Derived::Scalar> hyperplane_orthogonal_to(const Eigen::MatrixBase<Derived>& v) {
  return line_through(v).complement();
}

// ---------------------------------------------------------------------------
// Quadrature rules

enum class RuleKind { monte_carlo, product_gauss, symmetrized };

inline const char* to_string(RuleKind k) {
  switch (k) {
    case RuleKind::monte_carlo: return "monte_carlo";
    case RuleKind::product_gauss: return "product_gauss";
    case RuleKind::symmetrized: return "symmetrized";
  }
  return "unknown";
}

/// Nodes (one per column) and positive weights summing to one. When
/// `antipodal_pairs` is set, node 2i+1 is exactly -node 2i and both carry the
/// same weight, so odd integrands cancel pair by pair.
template <typename Scalar>
class QuadratureRuleT {
 public:
  QuadratureRuleT(MatrixX<Scalar> nodes, VectorX<Scalar> weights, RuleKind kind,
                  bool antipodal_pairs, int exact_degree = -1)
      : nodes_(std::move(nodes)),
        weights_(std::move(weights)),
        kind_(kind),
        antipodal_pairs_(antipodal_pairs),
        exact_degree_(exact_degree) {
    if (nodes_.cols() < 1 || nodes_.cols() != weights_.size())
      throw InvalidArgument("quadrature rule needs matching non-empty nodes and weights");
    if (!(weights_.minCoeff() > Scalar(0)))
      throw InvalidArgument("quadrature weights must be positive");
    weights_ /= weights_.sum();
    if (antipodal_pairs_) {
      if (nodes_.cols() % 2 != 0) throw InvalidArgument("antipodal rule needs an even node count");
      for (Index i = 0; i < nodes_.cols(); i += 2) {
        if (nodes_.col(i + 1) != -nodes_.col(i))
          throw InvalidArgument("antipodal rule nodes are not paired");
        weights_(i + 1) = weights_(i);
      }
      weights_ /= weights_.sum();
    }
  }

  const MatrixX<Scalar>& nodes() const { return nodes_; }
  const VectorX<Scalar>& weights() const { return weights_; }
  RuleKind kind() const { return kind_; }
  bool antipodal_pairs() const { return antipodal_pairs_; }
  /// Polynomial degree integrated exactly, -1 for Monte Carlo rules.
  int exact_degree() const { return exact_degree_; }
  Index size() const { return nodes_.cols(); }
  Index dim() const { return nodes_.rows(); }

  /// Pushes the rule forward through an orthonormal frame (dim() == frame.cols()).
  QuadratureRuleT mapped(const MatrixX<Scalar>& frame) const {
    if (frame.cols() != dim()) throw InvalidArgument("frame does not match rule dimension");
    return QuadratureRuleT(MatrixX<Scalar>(frame * nodes_), weights_, kind_, antipodal_pairs_,
                           exact_degree_);
  }

 private:
  MatrixX<Scalar> nodes_;
  VectorX<Scalar> weights_;
  RuleKind kind_;
  bool antipodal_pairs_;
  int exact_degree_;
};

using QuadratureRule = QuadratureRuleT<double>;

/// Sum of w_i v_i for values v_i already computed at the rule's nodes.
/// Values are accumulated relative to the first node's value so a constant
/// integrand is reproduced exactly.
template <typename Scalar>
Scalar integrate_values(const VectorX<Scalar>& values, const QuadratureRuleT<Scalar>& rule) {
  if (values.size() != rule.size()) throw InvalidArgument("integrate_values: size mismatch");
  const auto& nodes = rule.nodes();
  const auto& w = rule.weights();
  for (Index i = 0; i < values.size(); ++i)
    if (!std::isfinite(static_cast<double>(values(i))))
      throw NumericDomainError("non-finite integrand value at quadrature node " +
                               std::to_string(i) + " " + format_vector(nodes.col(i)));
  Scalar acc = 0;
  if (rule.antipodal_pairs()) {
    // pair averages vanish exactly for odd f
    auto pair_at = [&](Index i) { return (values(i) + values(i + 1)) / 2; };
    const Scalar h0 = pair_at(0);
    for (Index i = 2; i < rule.size(); i += 2) acc += 2 * w(i) * (pair_at(i) - h0);
    return h0 + acc;
  }
  const Scalar f0 = values(0);
  for (Index i = 1; i < rule.size(); ++i) acc += w(i) * (values(i) - f0);
  return f0 + acc;
}

/// Sum of w_i f(node_i).
template <typename Scalar, typename F>
Scalar integrate_sphere(F&& f, const QuadratureRuleT<Scalar>& rule) {
  VectorX<Scalar> values(rule.size());
  for (Index i = 0; i < rule.size(); ++i) values(i) = f(rule.nodes().col(i));
  return integrate_values(values, rule);
}

/// Gauss rule on [-1, 1] for the weight (1 - t^2)^(lambda - 1/2), lambda > 0,
/// via Golub-Welsch. Weights are normalized to sum to one; nodes are exactly
/// symmetric about zero.
template <typename Scalar = double>
std::pair<VectorX<Scalar>, VectorX<Scalar>> gauss_gegenbauer(int q, Scalar lambda) {
  if (q < 1) throw InvalidArgument("gauss_gegenbauer: need at least one node");
  if (!(lambda > Scalar(0))) throw InvalidArgument("gauss_gegenbauer: lambda must be positive");
  MatrixX<Scalar> jacobi = MatrixX<Scalar>::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const Scalar kk = k;
    const Scalar b = std::sqrt(kk * (kk + 2 * lambda - 1) /
                               (4 * (kk + lambda) * (kk + lambda - 1)));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(jacobi);
  VectorX<Scalar> t = eig.eigenvalues();
  VectorX<Scalar> w = eig.eigenvectors().row(0).transpose().array().square();
  VectorX<Scalar> ts(q), ws(q);
  for (int i = 0; i < q; ++i) {
    ts(i) = (t(i) - t(q - 1 - i)) / 2;
    ws(i) = (w(i) + w(q - 1 - i)) / 2;
  }
  if (q % 2 == 1) ts(q / 2) = Scalar(0);
  ws /= ws.sum();
  return {ts, ws};
}

/// Product Gauss rule on S^{m-1} in R^m: Gauss-Gegenbauer in each polar angle
/// cosine and the trapezoid rule (2q points) in the azimuth. Exact for
/// polynomials of degree <= 2q - 1. For m == 2 this is the 2q-point
/// trapezoid rule on the circle.
template <typename Scalar = double>
QuadratureRuleT<Scalar> sphere_product_rule(int m, int q) {
  if (m < 2) throw InvalidArgument("sphere_product_rule: need m >= 2");
  if (q < 1) throw InvalidArgument("sphere_product_rule: need q >= 1");
  const int polar = m - 2;
  std::vector<std::pair<VectorX<Scalar>, VectorX<Scalar>>> factors;
  for (int i = 1; i <= polar; ++i) factors.push_back(gauss_gegenbauer<Scalar>(q, Scalar(m - i - 1) / 2));
  Index half = q;
  for (int i = 0; i < polar; ++i) half *= q;
  MatrixX<Scalar> nodes(m, 2 * half);
  VectorX<Scalar> weights(2 * half);
  std::vector<int> idx(polar, 0);
  const Scalar pi = std::acos(Scalar(-1));
  Index col = 0;
  for (Index combo = 0; combo < half / q; ++combo) {
    Index rest = combo;
    for (int i = polar - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rest % q);
      rest /= q;
    }
    VectorX<Scalar> x(m);
    Scalar s = 1;
    Scalar w = 1;
    for (int i = 0; i < polar; ++i) {
      const Scalar t = factors[i].first(idx[i]);
      x(i) = s * t;
      s *= std::sqrt(std::max(Scalar(0), 1 - t * t));
      w *= factors[i].second(idx[i]);
    }
    for (int k = 0; k < q; ++k) {
      const Scalar psi = pi * k / q;
      x(m - 2) = s * std::cos(psi);
      x(m - 1) = s * std::sin(psi);
      const VectorX<Scalar> node = x / x.norm();
      nodes.col(col) = node;
      nodes.col(col + 1) = -node;
      weights(col) = w;
      weights(col + 1) = w;
      col += 2;
    }
  }
  return QuadratureRuleT<Scalar>(std::move(nodes), std::move(weights), RuleKind::product_gauss, true,
                                 2 * q - 1);
}

/// Smallest product rule on S^{m-1} exact for polynomials of degree <= `degree`.
template <typename Scalar = double>
QuadratureRuleT<Scalar> sphere_rule_for_degree(int m, int degree) {
  return sphere_product_rule<Scalar>(m, std::max(1, (degree + 2) / 2));
}

/// Equally weighted trapezoid rule on the unit circle (count rounded up to even).
template <typename Scalar = double>
QuadratureRuleT<Scalar> circle_rule(int count) {
  if (count < 2) throw InvalidArgument("circle_rule: need at least 2 nodes");
  return sphere_product_rule<Scalar>(2, (count + 1) / 2);
}

/// Number of nodes of sphere_product_rule(m, q).
inline Index product_rule_size(int m, int q) {
  Index s = 2;
  for (int i = 0; i < m - 1; ++i) s *= q;
  return s;
}

template <typename Scalar, typename Gen>
VectorX<Scalar> gaussian_vector(Index n, Gen& gen) {
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  VectorX<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

template <typename Scalar, typename Gen>
VectorX<Scalar> uniform_direction(Index n, Gen& gen) {
  for (;;) {
    VectorX<Scalar> v = gaussian_vector<Scalar>(n, gen);
    const Scalar norm = v.norm();
    if (norm > Scalar(1e-30)) return v / norm;
  }
}

/// Monte Carlo rule with i.i.d. uniform nodes; with `symmetrized` the nodes
/// come in antipodal pairs (count rounded up to even).
template <typename Scalar = double>
QuadratureRuleT<Scalar> sphere_monte_carlo_rule(int m, int count, std::uint64_t seed,
                                                bool symmetrized = true) {
  if (m < 1) throw InvalidArgument("sphere_monte_carlo_rule: need m >= 1");
  if (count < 2) throw InvalidArgument("sphere_monte_carlo_rule: need at least 2 nodes");
  Rng gen = make_rng(seed, stream::kRule);
  if (symmetrized) {
    const Index pairs = (count + 1) / 2;
    MatrixX<Scalar> nodes(m, 2 * pairs);
    for (Index i = 0; i < pairs; ++i) {
      const VectorX<Scalar> v = uniform_direction<Scalar>(m, gen);
      nodes.col(2 * i) = v;
      nodes.col(2 * i + 1) = -v;
    }
    return QuadratureRuleT<Scalar>(std::move(nodes), VectorX<Scalar>::Ones(2 * pairs),
                                   RuleKind::symmetrized, true);
  }
  MatrixX<Scalar> nodes(m, count);
  for (Index i = 0; i < count; ++i) nodes.col(i) = uniform_direction<Scalar>(m, gen);
  return QuadratureRuleT<Scalar>(std::move(nodes), VectorX<Scalar>::Ones(count),
                                 RuleKind::monte_carlo, false);
}

/// Rule on S^{n-1} ∩ E. m = 1: the antipodal pair; m = 2: the `rule_size`
/// point trapezoid rule; m >= 3: the largest product Gauss rule with at most
/// `rule_size` nodes.
template <typename Scalar>
QuadratureRuleT<Scalar> subsphere_quadrature(const SubspaceT<Scalar>& e, int rule_size) {
  if (rule_size < 2) throw InvalidArgument("subsphere_quadrature: rule_size must be >= 2");
  const int m = static_cast<int>(e.dim());
  if (m == 1) {
    MatrixX<Scalar> nodes(e.ambient_dim(), 2);
    nodes.col(0) = e.frame().col(0);
    nodes.col(1) = -e.frame().col(0);
    return QuadratureRuleT<Scalar>(std::move(nodes), VectorX<Scalar>::Ones(2),
                                   RuleKind::product_gauss, true, 1 << 20);
  }
  if (m == 2) return circle_rule<Scalar>(rule_size).mapped(e.frame());
  int q = 1;
  while (product_rule_size(m, q + 1) <= rule_size) ++q;
  return sphere_product_rule<Scalar>(m, q).mapped(e.frame());
}

/// Product rule on S^{n-1} ∩ E exact to the given polynomial degree.
template <typename Scalar>
QuadratureRuleT<Scalar> subsphere_exact_rule(const SubspaceT<Scalar>& e, int degree) {
  if (e.dim() == 1) return subsphere_quadrature(e, 2);
  return sphere_rule_for_degree<Scalar>(static_cast<int>(e.dim()), degree).mapped(e.frame());
}

/// Symmetrized Monte Carlo rule on S^{n-1} ∩ E.
template <typename Scalar>
QuadratureRuleT<Scalar> subsphere_monte_carlo(const SubspaceT<Scalar>& e, int count,
                                              std::uint64_t seed) {
  if (count < 2) throw InvalidArgument("subsphere_monte_carlo: count must be >= 2");
  return sphere_monte_carlo_rule<Scalar>(static_cast<int>(e.dim()), count, seed).mapped(e.frame());
}

// ---------------------------------------------------------------------------
// Haar sampling

/// `count` i.i.d. uniform directions on S^{n-1}, one per column.
template <typename Scalar = double>
MatrixX<Scalar> sample_sphere_uniform(Index n, Index count, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("sample_sphere_uniform: need n >= 2");
  if (count < 1) throw InvalidArgument("sample_sphere_uniform: need count >= 1");
  Rng gen = make_rng(seed, stream::kSphere);
  MatrixX<Scalar> out(n, count);
  for (Index i = 0; i < count; ++i) out.col(i) = uniform_direction<Scalar>(n, gen);
  return out;
}

template <typename Scalar = double, typename Gen>
SubspaceT<Scalar> sample_grassmann_haar(Index n, Index m, Gen& gen) {
  if (m < 1 || m > n) throw InvalidArgument("sample_grassmann_haar: need 1 <= m <= n");
  MatrixX<Scalar> g(n, m);
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = normal(gen);
  return SubspaceT<Scalar>(orthonormal_frame(g));
}

/// Haar-distributed m-dimensional subspace of R^n.
template <typename Scalar = double>
SubspaceT<Scalar> sample_grassmann_haar(Index n, Index m, std::uint64_t seed) {
  Rng gen = make_rng(seed, stream::kGrassmann);
  return sample_grassmann_haar<Scalar>(n, m, gen);
}

/// Uniform m-dimensional subspace containing `anchor`: the anchor frame is
/// kept as the leading columns and completed by a Haar frame of its
/// orthogonal complement.
template <typename Scalar, typename Gen>
SubspaceT<Scalar> sample_subspace_containing(const SubspaceT<Scalar>& anchor, Index m, Gen& gen) {
  const Index n = anchor.ambient_dim();
  const Index j = anchor.dim();
  if (m < j || m > n) throw InvalidArgument("sample_subspace_containing: need dim(anchor) <= m <= n");
  if (m == j) return anchor;
  const SubspaceT<Scalar> comp = anchor.complement();
  const SubspaceT<Scalar> inner = sample_grassmann_haar<Scalar>(n - j, m - j, gen);
  MatrixX<Scalar> frame(n, m);
  frame.leftCols(j) = anchor.frame();
  frame.rightCols(m - j) = comp.frame() * inner.frame();
  return SubspaceT<Scalar>(std::move(frame));
}

template <typename Scalar>
SubspaceT<Scalar> sample_subspace_containing(const SubspaceT<Scalar>& anchor, Index m,
                                             std::uint64_t seed) {
  Rng gen = make_rng(seed, stream::kContaining);
  return sample_subspace_containing(anchor, m, gen);
}

/// Uniform m-dimensional subspace contained in `anchor`.
template <typename Scalar, typename Gen>
SubspaceT<Scalar> sample_subspace_within(const SubspaceT<Scalar>& anchor, Index m, Gen& gen) {
  const Index j = anchor.dim();
  if (m < 1 || m > j) throw InvalidArgument("sample_subspace_within: need 1 <= m <= dim(anchor)");
  if (m == j) return anchor;
  const SubspaceT<Scalar> inner = sample_grassmann_haar<Scalar>(j, m, gen);
  return SubspaceT<Scalar>(MatrixX<Scalar>(anchor.frame() * inner.frame()));
}

template <typename Scalar>
SubspaceT<Scalar> sample_subspace_within(const SubspaceT<Scalar>& anchor, Index m,
                                         std::uint64_t seed) {
  Rng gen = make_rng(seed, stream::kContaining);
  return sample_subspace_within(anchor, m, gen);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates

/// Sample mean with its standard error.
struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Welford accumulator.
class MeanAccumulator {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
    min_ = count_ == 1 ? x : std::min(min_, x);
    max_ = count_ == 1 ? x : std::max(max_, x);
  }
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double standard_error() const {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }
  double min() const { return min_; }
  double max() const { return max_; }
  Estimate estimate() const { return {mean_, standard_error(), count_}; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

}  // namespace geotomo
