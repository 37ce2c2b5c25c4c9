#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "geotomo/sphere_core.hpp"

using namespace geotomo;

namespace {

// E[prod x_i^{2 k_i}] for x uniform on S^{n-1}.
double sphere_moment(const std::vector<int>& half_powers) {
  const double n = static_cast<double>(half_powers.size());
  const int total = std::accumulate(half_powers.begin(), half_powers.end(), 0);
  double log_value = std::lgamma(n / 2) - std::lgamma(n / 2 + total);
  for (int k : half_powers) log_value += std::lgamma(k + 0.5) - std::lgamma(0.5);
  return std::exp(log_value);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(sphere_core, uniform_sampling_is_centered) {
  const Matrix x = sample_sphere_uniform(3, 100000, 11);
  EXPECT_LE(x.rowwise().mean().norm(), 0.02);
  for (Index i = 0; i < x.cols(); ++i) ASSERT_NEAR(x.col(i).norm(), 1.0, 1e-12);
}

TEST(sphere_core, uniform_sampling_second_moment) {
  const Matrix x = sample_sphere_uniform(5, 100000, 12);
  EXPECT_NEAR(x.row(0).array().square().mean(), 0.2, 0.01);
}

TEST(sphere_core, uniform_sampling_is_deterministic) {
  EXPECT_EQ(sample_sphere_uniform(3, 4, 7), sample_sphere_uniform(3, 4, 7));
  EXPECT_NE(sample_sphere_uniform(3, 4, 7), sample_sphere_uniform(3, 4, 8));
}

TEST(sphere_core, uniform_sampling_rejects_bad_arguments) {
  EXPECT_THROW(sample_sphere_uniform(1, 4, 0), InvalidArgument);
  EXPECT_THROW(sample_sphere_uniform(3, 0, 0), InvalidArgument);
}

TEST(sphere_core, grassmann_frame_is_orthonormal) {
  const Subspace e = sample_grassmann_haar(5, 3, 1);
  EXPECT_LE(max_abs(e.frame().transpose() * e.frame() - Matrix::Identity(3, 3)), 1e-10);
}

TEST(sphere_core, grassmann_full_space) {
  const Subspace e = sample_grassmann_haar(4, 4, 2);
  EXPECT_LE(max_abs(e.projector() - Matrix::Identity(4, 4)), 1e-12);
}

TEST(sphere_core, grassmann_rejects_m_greater_than_n) {
  EXPECT_THROW(sample_grassmann_haar(3, 4, 0), InvalidArgument);
}

TEST(sphere_core, grassmann_mean_projector) {
  // E[P] = (m/n) I by rotation invariance; oracle is the direct average.
  Rng gen = make_rng(3);
  Matrix mean = Matrix::Zero(5, 5);
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) mean += sample_grassmann_haar(5, 2, gen).projector();
  mean /= samples;
  EXPECT_LE(max_abs(mean - 0.4 * Matrix::Identity(5, 5)), 0.02);
}

TEST(sphere_core, grassmann_haar_invariance) {
  // Mean projectors of P and Q P Q^T agree within 3 standard errors entrywise.
  const Matrix q = sample_grassmann_haar(4, 4, 99).frame();
  Rng gen_a = make_rng(5);
  Rng gen_b = make_rng(6);
  const int samples = 4000;
  std::vector<MeanAccumulator> a(16), b(16);
  for (int s = 0; s < samples; ++s) {
    const Matrix pa = sample_grassmann_haar(4, 2, gen_a).projector();
    const Matrix pb = q * sample_grassmann_haar(4, 2, gen_b).projector() * q.transpose();
    for (int k = 0; k < 16; ++k) {
      a[k].add(pa(k % 4, k / 4));
      b[k].add(pb(k % 4, k / 4));
    }
  }
  for (int k = 0; k < 16; ++k) {
    const double se = std::hypot(a[k].standard_error(), b[k].standard_error());
    EXPECT_LE(std::abs(a[k].mean() - b[k].mean()), 3.0 * se + 1e-12) << "entry " << k;
  }
}

TEST(sphere_core, containing_keeps_anchor_columns) {
  const Subspace anchor = Subspace::coordinate(5, {0});
  const Subspace f = sample_subspace_containing(anchor, 3, std::uint64_t{4});
  EXPECT_EQ(f.dim(), 3);
  EXPECT_EQ(f.frame().col(0), anchor.frame().col(0));
  EXPECT_LE(f.frame().block(0, 1, 1, 2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(max_abs(f.frame().transpose() * f.frame() - Matrix::Identity(3, 3)), 1e-10);
}

TEST(sphere_core, containing_same_dimension_returns_anchor) {
  const Subspace anchor = Subspace::coordinate(5, {0, 1});
  EXPECT_EQ(sample_subspace_containing(anchor, 2, std::uint64_t{1}).frame(), anchor.frame());
  EXPECT_THROW(sample_subspace_containing(anchor, 1, std::uint64_t{1}), InvalidArgument);
  EXPECT_THROW(sample_subspace_containing(anchor, 6, std::uint64_t{1}), InvalidArgument);
}

TEST(sphere_core, containing_is_uniform_on_complement) {
  // Projector onto the free part, restricted to e1^perp, averages to (2/4) I.
  const Subspace anchor = Subspace::coordinate(5, {0});
  Rng gen = make_rng(8);
  Matrix mean = Matrix::Zero(5, 5);
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    const Subspace f = sample_subspace_containing(anchor, 3, gen);
    mean += f.projector();
  }
  mean /= samples;
  EXPECT_NEAR(mean(0, 0), 1.0, 1e-12);
  EXPECT_LE(max_abs(mean.bottomRightCorner(4, 4) - 0.5 * Matrix::Identity(4, 4)), 0.03);
}

TEST(sphere_core, within_stays_inside_anchor) {
  const Subspace h = hyperplane_orthogonal_to(Vector::Unit(5, 4));
  Rng gen = make_rng(9);
  for (int s = 0; s < 20; ++s) {
    const Subspace e = sample_subspace_within(h, 2, gen);
    for (Index j = 0; j < 2; ++j) EXPECT_TRUE(h.contains(e.frame().col(j)));
  }
}

TEST(sphere_core, circle_rule_constant_and_moment) {
  const Subspace e = Subspace::coordinate(3, {0, 1});
  const QuadratureRule rule = subsphere_quadrature(e, 64);
  EXPECT_EQ(integrate_sphere([](const VecRef&) { return 1.0; }, rule), 1.0);
  EXPECT_NEAR(integrate_sphere([](const VecRef& x) { return x(0) * x(0); }, rule), 0.5, 1e-12);
  for (Index i = 0; i < rule.size(); ++i) ASSERT_NEAR(rule.nodes()(2, i), 0.0, 0.0);
}

TEST(sphere_core, subsphere_rule_squared_coordinate) {
  // (v . theta)^2 over S^{n-1} ∩ E has mean 1/m for a unit v in E.
  const Subspace e = sample_grassmann_haar(5, 3, 21);
  const Vector v = e.frame() * Vector::Unit(3, 1);
  auto f = [&](const VecRef& x) { return std::pow(v.dot(x), 2); };
  const QuadratureRule exact = subsphere_quadrature(e, 10000);
  EXPECT_NEAR(integrate_sphere(f, exact), 1.0 / 3.0, 1e-12);
  const QuadratureRule mc = subsphere_monte_carlo(e, 10000, 3);
  EXPECT_NEAR(integrate_sphere(f, mc), 1.0 / 3.0, 0.02);
  for (Index i = 0; i < mc.size(); ++i) ASSERT_TRUE(e.contains(mc.nodes().col(i)));
}

TEST(sphere_core, subsphere_line_is_antipodal_pair) {
  const Subspace e = Subspace::coordinate(4, {2});
  const QuadratureRule rule = subsphere_quadrature(e, 2);
  ASSERT_EQ(rule.size(), 2);
  EXPECT_EQ(Vector(rule.nodes().col(0)), Vector::Unit(4, 2));
  EXPECT_EQ(Vector(rule.nodes().col(1)), -Vector::Unit(4, 2));
  EXPECT_THROW(subsphere_quadrature(e, 1), InvalidArgument);
}

TEST(sphere_core, integrate_constant_exactly) {
  const QuadratureRule mc = sphere_monte_carlo_rule(4, 1001, 5, false);
  const QuadratureRule sym = sphere_monte_carlo_rule(4, 1000, 5);
  const QuadratureRule prod = sphere_product_rule(4, 7);
  for (double c : {1.0, 0.1, -3.7, 1e10 / 3}) {
    auto f = [c](const VecRef&) { return c; };
    EXPECT_EQ(integrate_sphere(f, mc), c);
    EXPECT_EQ(integrate_sphere(f, sym), c);
    EXPECT_EQ(integrate_sphere(f, prod), c);
  }
}

TEST(sphere_core, odd_integrand_cancels_on_symmetric_rule) {
  const QuadratureRule sym = sphere_monte_carlo_rule(5, 4000, 2);
  auto f = [](const VecRef& x) { return x(0) * x(0) * x(0) + 2.0 * x(1) * x(2) * x(3) + x(4); };
  EXPECT_LE(std::abs(integrate_sphere(f, sym)), 1e-14);
}

TEST(sphere_core, integrate_non_finite_names_node) {
  const QuadratureRule rule = sphere_product_rule(3, 3);
  try {
    integrate_sphere([](const VecRef& x) { return x(0) > 0.5 ? std::nan("") : 1.0; }, rule);
    FAIL() << "expected NumericDomainError";
  } catch (const NumericDomainError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(sphere_core, fourth_moment_on_s2) {
  const QuadratureRule rule = sphere_product_rule(3, 4);
  const double oracle = sphere_moment({2, 0, 0});
  EXPECT_NEAR(oracle, 0.2, 1e-15);
  EXPECT_NEAR(integrate_sphere([](const VecRef& x) { return std::pow(x(0), 4); }, rule), oracle, 1e-10);
}

TEST(sphere_core, product_rules_are_exact_for_even_polynomials) {
  for (int m = 2; m <= 6; ++m) {
    for (int q = 1; q <= 6; ++q) {
      const QuadratureRule rule = sphere_product_rule(m, q);
      ASSERT_EQ(rule.size(), product_rule_size(m, q));
      ASSERT_NEAR(rule.weights().sum(), 1.0, 1e-12);
      const int degree = 2 * q - 1;
      Rng gen = make_rng(static_cast<std::uint64_t>(m * 100 + q));
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> k(m, 0);
        int remaining = (degree / 2) - static_cast<int>(gen() % (degree / 2 + 1));
        while (remaining-- > 0) ++k[gen() % m];
        auto f = [&](const VecRef& x) {
          double v = 1.0;
          for (int i = 0; i < m; ++i) v *= std::pow(x(i), 2 * k[i]);
          return v;
        };
        EXPECT_NEAR(integrate_sphere(f, rule), sphere_moment(k), 1e-12) << "m=" << m << " q=" << q;
      }
    }
  }
}

TEST(sphere_core, gauss_gegenbauer_is_symmetric) {
  const auto [t, w] = gauss_gegenbauer(7, 1.5);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(t(i), -t(6 - i));
    EXPECT_EQ(w(i), w(6 - i));
  }
}

TEST(sphere_core, direction_and_subspace_validation) {
  EXPECT_THROW(Direction(Vector::Ones(3)), InvalidArgument);
  EXPECT_NO_THROW(Direction::normalized(Vector::Ones(3)));
  Matrix bad(3, 2);
  bad << 1, 1, 0, 0, 0, 0;
  EXPECT_THROW(Subspace{bad}, InvalidArgument);
  EXPECT_THROW(Subspace::span(bad), InvalidArgument);
  const Subspace h = hyperplane_orthogonal_to(Vector::Unit(3, 2));
  EXPECT_LE(max_abs(h.projector() - Vector(Vector::Ones(3) - Vector::Unit(3, 2)).asDiagonal().toDenseMatrix()), 1e-14);
}
