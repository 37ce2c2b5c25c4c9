#include "geotomo/descriptor.hpp"

#include <Eigen/Eigenvalues>

#include <fstream>
#include <sstream>

namespace geotomo {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw DescriptorError(path + " " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  return v.get<double>();
}

double positive_number(const Json& j, const std::string& key, const std::string& path) {
  const double v = number(j, key, path);
  if (!(v > 0.0) || !std::isfinite(v)) fail(path + "." + key, "must be positive");
  return v;
}

int integer(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
  return v.get<int>();
}

Vector vector_from_json(const Json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(path, "must be an array of " + std::to_string(n) + " numbers");
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "must be a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string type_of(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  const Json& t = field(j, "type", path);
  if (!t.is_string()) fail(path + ".type", "must be a string");
  return t.get<std::string>();
}

StarBody parse(const Json& j, int parent_dim, const std::string& where);

Matrix spd_matrix(const Json& j, int n, const std::string& path) {
  Matrix a = matrix_from_json(j, n, path);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    fail(path, "not symmetric");
  const double smallest =
      Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly)
          .eigenvalues()(0);
  if (!(smallest > 0.0)) fail(path, "not positive definite");
  return a;
}

StarBody parse(const Json& j, int parent_dim, const std::string& where) {
  const std::string type = type_of(j, where);
  const std::string path = where.empty() ? type : where + "." + type;
  int n = parent_dim;
  if (j.contains("dim")) {
    n = integer(j, "dim", path);
    if (n < 2) fail(path + ".dim", "must be >= 2");
    if (parent_dim > 0 && n != parent_dim)
      fail(path + ".dim", "mismatch: " + std::to_string(n) + " inside a body of dimension " +
                              std::to_string(parent_dim));
  } else if (parent_dim <= 0) {
    fail(path + ".dim", "missing");
  }

  try {
    if (type == "ball") {
      StarBody b = ball(n);
      if (j.contains("radius")) b = dilate(b, positive_number(j, "radius", path));
      return b;
    }
    if (type == "ellipsoid") return ellipsoid(spd_matrix(field(j, "matrix", path), n, path + ".matrix"));
    if (type == "lp") return lp_ball(n, positive_number(j, "p", path));
    if (type == "perturbed_ball") {
      const double eps = number(j, "epsilon", path);
      return perturbed_ball(eps, perturbation_from_json(field(j, "perturbation", path), n,
                                                        path + ".perturbation"));
    }
    if (type == "power")
      return power_transform(parse(field(j, "body", path), n, path + ".body"),
                             positive_number(j, "alpha", path));
    if (type == "dilate")
      return dilate(parse(field(j, "body", path), n, path + ".body"),
                    positive_number(j, "factor", path));
    if (type == "radial_sum") {
      const Json& list = field(j, "bodies", path);
      if (!list.is_array() || list.empty()) fail(path + ".bodies", "must be a non-empty array");
      std::vector<StarBody> bodies;
      for (std::size_t i = 0; i < list.size(); ++i)
        bodies.push_back(parse(list[i], n, path + ".bodies[" + std::to_string(i) + "]"));
      return radial_sum_k(bodies, positive_number(j, "k", path));
    }
    if (type == "ellipsoid_sum") {
      const double k = positive_number(j, "k", path);
      const Json& list = field(j, "matrices", path);
      if (!list.is_array() || list.empty()) fail(path + ".matrices", "must be a non-empty array");
      std::vector<StarBody> terms;
      for (std::size_t i = 0; i < list.size(); ++i)
        terms.push_back(ellipsoid(spd_matrix(list[i], n, path + ".matrices[" + std::to_string(i) + "]")));
      std::string mode = "raw_power";
      if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail(path + ".mode", "must be a string");
        mode = j["mode"].get<std::string>();
      }
      const StarBody sum = radial_sum_k(terms, k);
      if (mode == "radial_sum") return sum;
      if (mode == "raw_power") return power_transform(sum, k);
      fail(path + ".mode", "must be \"raw_power\" or \"radial_sum\"");
    }
    if (type == "expansion") {
      const int degree = integer(j, "max_degree", path);
      if (degree < 0 || degree % 2 != 0) fail(path + ".max_degree", "must be even and >= 0");
      auto grid = analysis_grid(n, degree);
      const Json& bands = field(j, "band_values", path);
      const int count = degree / 2 + 1;
      if (!bands.is_array() || static_cast<int>(bands.size()) != count)
        fail(path + ".band_values", "must hold " + std::to_string(count) + " bands");
      Matrix values(grid->size(), count);
      for (int b = 0; b < count; ++b)
        values.col(b) = vector_from_json(bands[b], static_cast<int>(grid->size()),
                                         path + ".band_values[" + std::to_string(b) + "]");
      const double residual = j.contains("residual") ? number(j, "residual", path) : 0.0;
      return from_expansion(HarmonicExpansion(n, degree, grid, std::move(values), residual));
    }
  } catch (const InvalidBody& e) {
    fail(path, std::string("invalid body: ") + e.what());
  } catch (const InvalidArgument& e) {
    fail(path, std::string("invalid argument: ") + e.what());
  }
  fail(where.empty() ? std::string("type") : where + ".type", "unknown body type \"" + type + "\"");
}

}  // namespace

Json matrix_to_json(const Matrix& a) {
  Json out = Json::array();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) out.push_back(a(r, c));
  return out;
}

Matrix matrix_from_json(const Json& j, int n, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array");
  Matrix a(n, n);
  if (static_cast<int>(j.size()) == n * n && (j.empty() || !j[0].is_array())) {
    for (int i = 0; i < n * n; ++i) {
      if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "must be a number");
      a(i / n, i % n) = j[i].get<double>();
    }
    return a;
  }
  if (static_cast<int>(j.size()) == n && j[0].is_array()) {
    for (int r = 0; r < n; ++r)
      a.row(r) = vector_from_json(j[r], n, path + "[" + std::to_string(r) + "]").transpose();
    return a;
  }
  fail(path, "must hold " + std::to_string(n * n) + " numbers (row-major)");
}

Perturbation perturbation_from_json(const Json& j, int n, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  const Json& k = field(j, "kind", path);
  if (!k.is_string()) fail(path + ".kind", "must be a string");
  const std::string kind = k.get<std::string>();
  const double scale = j.contains("scale") ? number(j, "scale", path) : 1.0;
  try {
    if (kind == "zero") return Perturbation::zero(n);
    if (kind == "zonal") {
      const int degree = integer(j, "degree", path);
      if (degree < 0 || degree % 2 != 0) fail(path + ".degree", "must be even and >= 0");
      Vector axis = vector_from_json(field(j, "axis", path), n, path + ".axis");
      if (!(axis.norm() > 0.0)) fail(path + ".axis", "must be non-zero");
      return Perturbation::zonal(degree, axis, scale);
    }
    if (kind == "quadratic") {
      const Matrix b = matrix_from_json(field(j, "matrix", path), n, path + ".matrix");
      if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(path + ".matrix", "not symmetric");
      return Perturbation::quadratic(b, scale);
    }
  } catch (const InvalidArgument& e) {
    fail(path, std::string("invalid argument: ") + e.what());
  }
  fail(path + ".kind", "unknown perturbation kind \"" + kind + "\"");
}

Json perturbation_to_json(const Perturbation& phi) {
  Json out;
  out["kind"] = to_string(phi.kind);
  switch (phi.kind) {
    case Perturbation::Kind::zero: break;
    case Perturbation::Kind::zonal:
      out["degree"] = phi.degree;
      out["axis"] = vector_to_json(phi.axis);
      break;
    case Perturbation::Kind::quadratic: out["matrix"] = matrix_to_json(phi.matrix); break;
  }
  out["scale"] = phi.scale;
  return out;
}

StarBody body_from_json(const Json& j) { return parse(j, 0, ""); }

Json body_to_json(const StarBody& k) {
  Json out;
  out["dim"] = k.dim();
  out["type"] = to_string(k.kind());
  switch (k.kind()) {
    case BodyKind::ball: break;
    case BodyKind::ellipsoid: out["matrix"] = matrix_to_json(k.matrix()); break;
    case BodyKind::lp: out["p"] = k.p(); break;
    case BodyKind::perturbed_ball:
      out["epsilon"] = k.epsilon();
      out["perturbation"] = perturbation_to_json(k.perturbation());
      break;
    case BodyKind::power:
      out["alpha"] = k.exponent();
      out["body"] = body_to_json(k.children()[0]);
      break;
    case BodyKind::dilate:
      out["factor"] = k.factor();
      out["body"] = body_to_json(k.children()[0]);
      break;
    case BodyKind::radial_sum: {
      out["k"] = k.exponent();
      Json list = Json::array();
      for (const StarBody& c : k.children()) list.push_back(body_to_json(c));
      out["bodies"] = list;
      break;
    }
    case BodyKind::expansion: {
      const HarmonicExpansion& e = k.expansion();
      if (e.grid_ptr() != analysis_grid(e.dim(), e.max_degree()))
        throw InvalidArgument("body_to_json: expansion is not stored on the default analysis grid");
      out["max_degree"] = e.max_degree();
      out["residual"] = e.residual();
      Json bands = Json::array();
      for (int b = 0; b < e.band_count(); ++b) bands.push_back(vector_to_json(e.band_values().col(b)));
      out["band_values"] = bands;
      break;
    }
    case BodyKind::function:
    case BodyKind::intersection_body:
      throw InvalidArgument(std::string("body_to_json: a ") + to_string(k.kind()) +
                            " body has no descriptor form");
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DescriptorError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DescriptorError(path + ": malformed JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DescriptorError("cannot write " + path);
  out << text;
  if (!out) throw DescriptorError("write failed for " + path);
}

StarBody load_body(const std::string& path) { return body_from_json(read_json_file(path)); }

}  // namespace geotomo
