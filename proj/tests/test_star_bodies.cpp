#include <gtest/gtest.h>

#include <cmath>

#include "geotomo/descriptor.hpp"
#include "geotomo/star_bodies.hpp"
#include "test_support.hpp"

using namespace geotomo;

namespace {

Vector unit(int n, int i) { return Vector::Unit(n, i); }

Matrix random_spd(int n, Rng& gen, double lo = 0.5, double hi = 2.0) {
  const Subspace q = sample_grassmann_haar(n, n, gen);
  std::uniform_real_distribution<double> eig(lo, hi);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = eig(gen);
  return q.frame() * d.asDiagonal() * q.frame().transpose();
}

// exp_x(v) on the sphere, v tangent at x.
Vector sphere_exp(const Vector& x, const Vector& v) {
  const double t = v.norm();
  if (t == 0.0) return x;
  return std::cos(t) * x + std::sin(t) / t * v;
}

}  // namespace

TEST(radial, primitive_examples) {
  EXPECT_EQ(ball(3).radial(unit(3, 1)), 1.0);
  Matrix a = Vector{{1.0, 0.25}}.asDiagonal();
  EXPECT_NEAR(ellipsoid(a).radial(unit(2, 1)), 2.0, 1e-15);
  Vector d = Vector::Ones(5);
  d(4) = 1.0 / 16.0;
  const StarBody k = power_transform(ellipsoid(Matrix(d.asDiagonal())), 0.5);
  EXPECT_NEAR(k.radial(unit(5, 4)), 2.0, 1e-15);
}

TEST(radial, rejects_nonpositive_values) {
  const StarBody bad = from_function(3, [](const VecRef& x) { return x(0) * x(0) - 0.5; }, "bad", true);
  EXPECT_THROW(bad.radial(unit(3, 1)), InvalidBody);
  EXPECT_THROW(ellipsoid(Matrix(Vector{{1.0, -1.0}}.asDiagonal())), InvalidBody);
  EXPECT_THROW(perturbed_ball(2.5, Perturbation::zonal(2, unit(3, 2))), InvalidBody);
}

TEST(radial, lp_ball_matches_direct_formula) {
  const StarBody k = lp_ball(3, 4.0);
  Vector x{{1.0, 2.0, -2.0}};
  x.normalize();
  const double direct = 1.0 / std::pow(std::pow(x(0), 4) + std::pow(x(1), 4) + std::pow(x(2), 4), 0.25);
  EXPECT_NEAR(k.radial(x), direct, 1e-15);
  EXPECT_TRUE(k.is_smooth());
  EXPECT_FALSE(lp_ball(3, 1.0).is_smooth());
}

TEST(radial, bodies_are_even_and_positive_on_test_grid) {
  Rng gen = make_rng(3);
  const StarBody e = ellipsoid(random_spd(4, gen));
  const std::vector<StarBody> zoo = {
      ball(4), e, lp_ball(4, 3.0), perturbed_ball(0.2, Perturbation::zonal(4, unit(4, 0))),
      power_transform(e, 0.5), radial_sum_k({e, ball(4)}, 2.0), dilate(e, 1.7)};
  for (const StarBody& k : zoo) EXPECT_NO_THROW(validate_body(k)) << to_string(k.kind());
}

TEST(minkowski_functional, examples) {
  EXPECT_NEAR(minkowski_functional(ball(3), Vector{{3.0, 4.0, 0.0}}), 5.0, 1e-15);
  Rng gen = make_rng(4);
  const StarBody k = ellipsoid(random_spd(3, gen));
  EXPECT_EQ(minkowski_functional(k, Vector::Zero(3)), 0.0);
  for (int i = 0; i < 20; ++i) {
    const Vector x = gaussian_vector<double>(3, gen);
    EXPECT_NEAR(minkowski_functional(k, 2.0 * x), 2.0 * minkowski_functional(k, x), 1e-14);
    // the ellipsoid gauge is sqrt(x^T A x)
    EXPECT_NEAR(minkowski_functional(k, x), std::sqrt(x.dot(k.matrix() * x)), 1e-14);
  }
}

TEST(volume, unit_ball_in_three_dimensions) {
  EXPECT_NEAR(volume(ball(3)), 4.0 * M_PI / 3.0, 1e-10);
  EXPECT_NEAR(unit_ball_volume(2), M_PI, 1e-15);
  EXPECT_NEAR(unit_ball_volume(5), 8.0 * M_PI * M_PI / 15.0, 1e-14);
}

TEST(volume, ellipsoid_matches_determinant_and_rejection_sampling) {
  const StarBody k = ellipsoid_axes(Vector{{1.0, 2.0, 3.0}});
  const double v = volume(k);
  EXPECT_NEAR(v / (8.0 * M_PI), 1.0, 5e-3);
  // rejection sampling in the bounding box [-1,1]x[-2,2]x[-3,3]
  Rng gen = make_rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int count = 400000;
  int inside = 0;
  for (int i = 0; i < count; ++i) {
    const double x = u(gen), y = 2.0 * u(gen), z = 3.0 * u(gen);
    inside += x * x + y * y / 4.0 + z * z / 9.0 <= 1.0;
  }
  const double oracle = 48.0 * inside / count;
  EXPECT_NEAR(v / oracle, 1.0, 5e-3);
}

TEST(volume, dilation_scales_by_power_of_dimension) {
  Rng gen = make_rng(5);
  for (int n : {3, 5}) {
    const StarBody k = ellipsoid(random_spd(n, gen));
    const double c = 1.3;
    EXPECT_NEAR(volume(dilate(k, c)) / volume(k), std::pow(c, n), 1e-12 * std::pow(c, n));
    EXPECT_NEAR(volume(power_transform(k, 1.0)), volume(k), 1e-12 * volume(k));
  }
}

TEST(section_volume, examples) {
  Rng gen = make_rng(6);
  const Subspace e = sample_grassmann_haar(5, 3, gen);
  EXPECT_NEAR(section_volume(ball(5), e), 4.0 * M_PI / 3.0, 1e-12);
  const StarBody k = ellipsoid(Matrix(Vector{{1.0, 1.0, 0.25}}.asDiagonal()));
  EXPECT_NEAR(section_volume(k, Subspace::coordinate(3, {0, 1})), M_PI, 1e-12);
  // m = 1: the chord through the origin
  EXPECT_NEAR(section_volume(k, line_through(unit(3, 2))), 4.0, 1e-14);
}

TEST(section_volume, restricted_quadratic_form_oracle) {
  Rng gen = make_rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const StarBody k = ellipsoid(random_spd(5, gen));
    for (int m : {2, 3}) {
      const Subspace e = sample_grassmann_haar(5, m, gen);
      const Matrix restricted = e.frame().transpose() * k.matrix() * e.frame();
      const double oracle = unit_ball_volume(m) / std::sqrt(restricted.determinant());
      EXPECT_NEAR(section_volume(k, e) / oracle, 1.0, 1e-8);
    }
  }
}

TEST(section_volume, full_dimension_equals_volume) {
  Rng gen = make_rng(8);
  const StarBody k = ellipsoid(random_spd(3, gen));
  const Subspace full = Subspace::coordinate(3, {0, 1, 2});
  const double v = volume(k);
  EXPECT_NEAR(section_volume(k, full, 30000) / v, 1.0, 1e-10);
}

TEST(section_volume, dilation_monotonicity) {
  Rng gen = make_rng(9);
  const StarBody k = ellipsoid(random_spd(5, gen));
  const double c = 1.2;
  const StarBody l = dilate(k, c);
  for (int i = 0; i < 10; ++i) {
    const Subspace e = sample_grassmann_haar(5, 3, gen);
    const double sk = section_volume(k, e), sl = section_volume(l, e);
    EXPECT_GE(sl, sk);
    EXPECT_NEAR(sl / sk, c * c * c, 1e-10 * c * c * c);
  }
  EXPECT_GE(volume(l), volume(k));
}

TEST(section_volume, subsphere_averages_inside_hyperplane_reproduce_hyperplane_integral) {
  // averaging S^{n-1} ∩ E integrals over E in G^H(n, n-3) inside a fixed H
  // reproduces the S^{n-1} ∩ H integral
  const int n = 5;
  const auto f = geotomo::testing::random_bandlimited(n, 4, 21);
  Rng axis_gen = make_rng(1);
  const Subspace h = hyperplane_orthogonal_to(uniform_direction<double>(n, axis_gen));
  const double direct = integrate_sphere(f, subsphere_exact_rule(h, 8));
  MeanAccumulator acc;
  Rng gen = make_rng(22);
  for (int i = 0; i < 4000; ++i) {
    const Subspace e = sample_subspace_within(h, n - 3, gen);
    acc.add(integrate_sphere(f, subsphere_quadrature(e, 64)));
  }
  EXPECT_NEAR(acc.mean(), direct, 3.0 * acc.standard_error() + 1e-12);
}

TEST(radial_sum, examples) {
  const Vector x = unit(3, 0);
  EXPECT_NEAR(radial_sum_k({ball(3), ball(3)}, 2.0).radial(x), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(radial_sum_k({ball(3), ball(3)}, 1.0).radial(x), 2.0, 1e-15);
  const StarBody a = ellipsoid(Matrix(Vector{{1.0, 4.0}}.asDiagonal()));
  const StarBody b = ellipsoid(Matrix(Vector{{4.0, 1.0}}.asDiagonal()));
  EXPECT_NEAR(radial_sum_k({a, b}, 1.0).radial(unit(2, 0)), 1.5, 1e-15);
  EXPECT_THROW(radial_sum_k({}, 1.0), InvalidArgument);
}

TEST(power_transform, examples) {
  Rng gen = make_rng(10);
  const Vector x = uniform_direction<double>(4, gen);
  EXPECT_NEAR(power_transform(ball(4), 0.3).radial(x), 1.0, 1e-15);
  EXPECT_NEAR(power_transform(dilate(ball(4), 4.0), 0.5).radial(x), 2.0, 1e-15);
  const StarBody k = ellipsoid(random_spd(4, gen));
  for (int i = 0; i < 100; ++i) {
    const Vector t = uniform_direction<double>(4, gen);
    EXPECT_NEAR(power_transform(power_transform(k, 0.7), 1.9).radial(t),
                power_transform(k, 0.7 * 1.9).radial(t), 1e-13);
    EXPECT_NEAR(power_transform(k, 1.0).radial(t), k.radial(t), 1e-15);
  }
}

TEST(radial_distance, metric_examples) {
  Rng gen = make_rng(12);
  const StarBody k = ellipsoid(random_spd(3, gen));
  EXPECT_EQ(radial_distance(k, k).distance, 0.0);
  const auto d = radial_distance(ball(4), dilate(ball(4), 2.0));
  EXPECT_NEAR(d.distance, 1.0, 1e-15);
  EXPECT_EQ(d.grid_size, 10000u);
  const Matrix grid = sample_sphere_uniform(3, 2000, 3);
  for (int i = 0; i < 10; ++i) {
    const StarBody a = ellipsoid(random_spd(3, gen)), b = ellipsoid(random_spd(3, gen)),
                   c = ellipsoid(random_spd(3, gen));
    EXPECT_LE(radial_distance(a, c, grid).distance,
              radial_distance(a, b, grid).distance + radial_distance(b, c, grid).distance + 1e-12);
  }
}

TEST(intersection_body, examples) {
  Rng gen = make_rng(13);
  const Vector x = uniform_direction<double>(3, gen);
  EXPECT_NEAR(intersection_body_of(ball(3)).radial(x), M_PI, 1e-12);
  for (int n : {4, 5}) {
    const Vector y = uniform_direction<double>(n, gen);
    EXPECT_NEAR(intersection_body_of(ball(n)).radial(y), unit_ball_volume(n - 1), 1e-12);
  }
  const StarBody l = ellipsoid(Matrix(Vector{{1.0, 1.0, 0.25}}.asDiagonal()));
  const StarBody i = intersection_body_of(l);
  EXPECT_NEAR(i.radial(unit(3, 2)), M_PI, 1e-12);
  // cached value is returned for a repeated direction
  EXPECT_EQ(i.radial(unit(3, 2)), i.radial(unit(3, 2)));
}

TEST(perturbed_ball, examples) {
  EXPECT_EQ(perturbed_ball(0.0, Perturbation::zonal(2, unit(3, 2))).radial(unit(3, 0)), 1.0);
  const StarBody k = perturbed_ball(0.1, Perturbation::zonal(2, unit(3, 2)));
  EXPECT_NEAR(k.radial(unit(3, 2)), 1.1, 1e-15);
  // P_2(0) = -1/2
  EXPECT_NEAR(k.radial(unit(3, 0)), 0.95, 1e-15);
  Rng gen = make_rng(14);
  for (int i = 0; i < 100; ++i) {
    const Vector t = uniform_direction<double>(3, gen);
    EXPECT_EQ(k.radial(t), k.radial(Vector(-t)));
  }
  EXPECT_EQ(k.epsilon(), 0.1);
}

TEST(perturbation, normal_derivatives_match_finite_differences_of_exponential_map) {
  Rng gen = make_rng(15);
  const Matrix b = random_spd(4, gen, -1.0, 1.0);
  for (const Perturbation& phi :
       {Perturbation::zonal(4, uniform_direction<double>(4, gen), 0.8), Perturbation::quadratic(b, 0.5)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = uniform_direction<double>(4, gen);
      Vector g;
      Matrix h;
      phi.normal_derivatives(x, g, h);
      const Matrix tangent = hyperplane_orthogonal_to(x).frame();
      auto f = [&](const Vector& v) { return phi(sphere_exp(x, tangent * v)); };
      for (int i = 0; i < 3; ++i) {
        const Vector di = Vector::Unit(3, i) * 1e-5;
        EXPECT_NEAR(g(i), (f(di) - f(-di)) / 2e-5, 1e-6);
        const double step = 2e-4;
        const Vector ei = Vector::Unit(3, i) * step;
        for (int j = 0; j < 3; ++j) {
          const Vector ej = Vector::Unit(3, j) * step;
          const double fd = (f(ei + ej) - f(ei - ej) - f(-ei + ej) + f(-ei - ej)) / (4 * step * step);
          EXPECT_NEAR(h(i, j), fd, 1e-5);
        }
      }
    }
  }
}

TEST(perturbation, bounds_of_zonal_harmonic) {
  const auto bounds = perturbation_bounds(Perturbation::zonal(2, unit(3, 2)));
  EXPECT_NEAR(bounds.sup_value, 1.0, 1e-15);
  // P_2(cos s) = (3 cos^2 s - 1) / 2: first derivative 3/2 sin 2s, second 3 cos 2s (at most 3)
  EXPECT_NEAR(bounds.sup_first, 1.5, 1e-3);
  EXPECT_NEAR(bounds.sup_second, 3.0, 1e-12);
  EXPECT_EQ(perturbation_bounds(Perturbation::zero(3)).M(), 0.0);
}

// ---------------------------------------------------------------------------
// descriptors

TEST(descriptor, round_trip_preserves_radial_function) {
  Rng gen = make_rng(16);
  const StarBody e = ellipsoid(random_spd(5, gen));
  const std::vector<StarBody> zoo = {
      ball(5), e, lp_ball(5, 4.0), perturbed_ball(0.1, Perturbation::zonal(2, unit(5, 1))),
      power_transform(e, 0.5), radial_sum_k({e, dilate(ball(5), 0.5)}, 2.0),
      perturbed_ball(0.05, Perturbation::quadratic(random_spd(5, gen, -1.0, 1.0)))};
  for (const StarBody& k : zoo) {
    const Json j = body_to_json(k);
    const StarBody back = body_from_json(Json::parse(j.dump()));
    EXPECT_EQ(body_to_json(back).dump(), j.dump());
    for (int i = 0; i < 20; ++i) {
      const Vector t = uniform_direction<double>(5, gen);
      EXPECT_EQ(back.radial(t), k.radial(t));
    }
  }
}

TEST(descriptor, matrix_is_row_major) {
  const Json j = Json::parse(R"({"dim":2,"type":"ellipsoid","matrix":[2.0,0.5,0.5,1.0]})");
  const StarBody k = body_from_json(j);
  EXPECT_EQ(k.matrix()(0, 1), 0.5);
  EXPECT_EQ(k.matrix()(0, 0), 2.0);
  const Json rows = Json::parse(R"({"dim":2,"type":"ellipsoid","matrix":[[2.0,0.5],[0.5,1.0]]})");
  EXPECT_EQ(body_from_json(rows).matrix(), k.matrix());
}

TEST(descriptor, errors_name_json_path) {
  auto message = [](const char* text) {
    try {
      body_from_json(Json::parse(text));
    } catch (const DescriptorError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(R"({"dim":2,"type":"ellipsoid","matrix":[1,0,0,-1]})"),
            "ellipsoid.matrix not positive definite");
  EXPECT_EQ(message(R"({"dim":2,"type":"ellipsoid","matrix":[1,0.5,0,1]})"),
            "ellipsoid.matrix not symmetric");
  EXPECT_EQ(message(R"({"dim":3,"type":"power","alpha":0.5,"body":{"type":"ellipsoid","matrix":[1,0,0,0,1,0,0,0,0]}})"),
            "power.body.ellipsoid.matrix not positive definite");
  EXPECT_EQ(message(R"({"dim":3,"type":"radial_sum","k":1,"bodies":[{"type":"ball"},{"type":"lp"}]})"),
            "radial_sum.bodies[1].lp.p missing");
  EXPECT_EQ(message(R"({"type":"ball"})"), "ball.dim missing");
  EXPECT_EQ(message(R"({"dim":3,"type":"cube"})"), "type unknown body type \"cube\"");
  EXPECT_EQ(message(R"({"dim":3,"type":"dilate","factor":-1,"body":{"type":"ball"}})"),
            "dilate.factor must be positive");
}

TEST(descriptor, ellipsoid_sum_modes) {
  const Json j = Json::parse(R"({"dim":2,"type":"ellipsoid_sum","k":2,
      "matrices":[[1,0,0,4],[4,0,0,1]]})");
  const StarBody raw = body_from_json(j);
  // raw power: rho = rho_1^2 + rho_2^2 = 1 + 1/4 at e1
  EXPECT_NEAR(raw.radial(unit(2, 0)), 1.25, 1e-15);
  Json k = j;
  k["mode"] = "radial_sum";
  EXPECT_NEAR(body_from_json(k).radial(unit(2, 0)), std::sqrt(1.25), 1e-15);
}

TEST(descriptor, expansion_round_trip) {
  const StarBody e = ellipsoid_axes(Vector{{1.0, 1.1, 0.9}});
  const StarBody k = from_expansion(expand(e.radial_function(), 3, 8));
  const StarBody back = body_from_json(Json::parse(body_to_json(k).dump()));
  const Vector t = Vector{{0.6, 0.0, 0.8}};
  EXPECT_EQ(back.radial(t), k.radial(t));
  EXPECT_THROW(body_to_json(intersection_body_of(ball(3))), InvalidArgument);
}
