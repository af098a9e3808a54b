#include "pso/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pso/errors.hpp"
#include "pso/rng.hpp"

namespace pso {

namespace {

using std::numbers::pi;

double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v) + 10.0;
  return s;
}

double ackley(std::span<const double> x) {
  double sq = 0, cs = 0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * pi * v);
  }
  const double n = static_cast<double>(x.size());
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

double griewank(std::span<const double> x) {
  double s = 0, p = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * x[i] / 4000.0;
    p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return s - p + 1.0;
}

double schwefel_2_26(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * std::sin(std::sqrt(std::fabs(v)));
  return 418.98288727243369 * static_cast<double>(x.size()) - s;
}

double schwefel_1_2(std::span<const double> x) {
  double s = 0, run = 0;
  for (double v : x) {
    run += v;
    s += run * run;
  }
  return s;
}

double schwefel_2_21(std::span<const double> x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

double schwefel_2_22(std::span<const double> x) {
  double s = 0, p = 1;
  for (double v : x) {
    s += std::fabs(v);
    p *= std::fabs(v);
  }
  return s + p;
}

double step(std::span<const double> x) {
  double s = 0;
  for (double v : x) {
    const double f = std::floor(v + 0.5);
    s += f * f;
  }
  return s;
}

double quartic(std::span<const double> x) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i + 1) * std::pow(x[i], 4);
  return s;
}

struct WeierstrassTerms {
  static constexpr int kMax = 20;
  double a[kMax + 1];
  double freq[kMax + 1];  // 2 pi b^k
  double offset = 0;      // sum_k a^k cos(pi b^k)
  WeierstrassTerms() {
    for (int k = 0; k <= kMax; ++k) {
      a[k] = std::pow(0.5, k);
      freq[k] = 2.0 * pi * std::pow(3.0, k);
    }
    offset = at(0.0);
  }
  double at(double v) const {
    double s = 0;
    for (int k = 0; k <= kMax; ++k) s += a[k] * std::cos(freq[k] * (v + 0.5));
    return s;
  }
};

double weierstrass(std::span<const double> x) {
  static const WeierstrassTerms terms;
  double s = 0;
  for (double v : x) s += terms.at(v) - terms.offset;
  return s;
}

double penalty_u(double v, double a, double k, double m) {
  if (v > a) return k * std::pow(v - a, m);
  if (v < -a) return k * std::pow(-v - a, m);
  return 0.0;
}

double penalized_1(std::span<const double> x) {
  const std::size_t n = x.size();
  auto y = [&](std::size_t i) { return 1.0 + (x[i] + 1.0) / 4.0; };
  const double s0 = std::sin(pi * y(0));
  double s = 10.0 * s0 * s0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = std::sin(pi * y(i + 1));
    s += (y(i) - 1.0) * (y(i) - 1.0) * (1.0 + 10.0 * si * si);
  }
  s += (y(n - 1) - 1.0) * (y(n - 1) - 1.0);
  double pen = 0;
  for (double v : x) pen += penalty_u(v, 10.0, 100.0, 4.0);
  return pi / static_cast<double>(n) * s + pen;
}

}  // namespace

const std::vector<BenchmarkFunction>& function_catalog() {
  static const std::vector<BenchmarkFunction> catalog{
      {"sphere", sphere, -100, 100, 0, 0.0, 1},
      {"rosenbrock", rosenbrock, -30, 30, 0, 1.0, 2},
      {"rastrigin", rastrigin, -5.12, 5.12, 0, 0.0, 1},
      {"ackley", ackley, -32, 32, 0, 0.0, 1},
      {"griewank", griewank, -600, 600, 0, 0.0, 1},
      {"schwefel_2_26", schwefel_2_26, -500, 500, 0, std::nullopt, 1},
      {"schwefel_1_2", schwefel_1_2, -100, 100, 0, 0.0, 1},
      {"schwefel_2_21", schwefel_2_21, -100, 100, 0, 0.0, 1},
      {"schwefel_2_22", schwefel_2_22, -10, 10, 0, 0.0, 1},
      {"step", step, -100, 100, 0, 0.0, 1},
      {"quartic_noise-free", quartic, -1.28, 1.28, 0, 0.0, 1},
      {"weierstrass", weierstrass, -0.5, 0.5, 0, 0.0, 1},
      {"penalized_1", penalized_1, -50, 50, 0, -1.0, 1},
  };
  return catalog;
}

const BenchmarkFunction& find_function(std::string_view name) {
  for (const auto& f : function_catalog()) {
    if (f.name == name) return f;
  }
  std::string known;
  for (const auto& f : function_catalog()) known += (known.empty() ? "" : ", ") + f.name;
  throw ConfigError("unknown function '" + std::string(name) + "' (known: " + known + ")");
}

double eval_function(std::string_view name, std::span<const double> x) {
  const auto& f = find_function(name);
  if (x.size() < f.min_dim) {
    throw ConfigError(f.name + " needs at least " + std::to_string(f.min_dim) + " dimensions");
  }
  return f.eval(x);
}

std::optional<Vec> function_x_star(std::string_view name, std::size_t dim) {
  const auto& f = find_function(name);
  if (!f.x_star) return std::nullopt;
  return Vec(dim, *f.x_star);
}

Problem make_problem(std::string_view name, std::size_t dim) {
  const auto& f = find_function(name);
  if (dim < f.min_dim) {
    throw ConfigError(f.name + " needs at least " + std::to_string(f.min_dim) + " dimensions");
  }
  return {f.name, dim, Vec(dim, f.lower), Vec(dim, f.upper), f.eval, f.f_star};
}

std::vector<std::string> suite_functions(std::string_view suite) {
  if (suite == "classical") {
    std::vector<std::string> names;
    for (const auto& f : function_catalog()) names.push_back(f.name);
    return names;
  }
  throw ConfigError("unknown suite '" + std::string(suite) + "' (known: classical)");
}

Vec random_rotation(std::size_t dim, std::uint64_t seed) {
  RngStream rng(seed);
  // Columns of a Gaussian matrix, orthonormalized by modified Gram-Schmidt.
  std::vector<Vec> cols(dim, Vec(dim));
  for (auto& c : cols) {
    for (auto& v : c) v = rng.normal();
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0;
        for (std::size_t r = 0; r < dim; ++r) dot += cols[j][r] * cols[k][r];
        for (std::size_t r = 0; r < dim; ++r) cols[j][r] -= dot * cols[k][r];
      }
      double norm = 0;
      for (double v : cols[j]) norm += v * v;
      norm = std::sqrt(norm);
      for (auto& v : cols[j]) v /= norm;
    }
  }
  Vec out(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) out[r * dim + c] = cols[c][r];
  }
  return out;
}

bool is_orthogonal(std::span<const double> m, std::size_t dim, double tol) {
  if (m.size() != dim * dim) return false;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      double dot = 0;
      for (std::size_t r = 0; r < dim; ++r) dot += m[r * dim + i] * m[r * dim + j];
      if (std::fabs(dot - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

namespace {

Problem compose(const BenchmarkFunction& base, std::string name, std::size_t dim, Vec lower,
                Vec upper, const TransformSpec& spec, std::optional<double> f_star) {
  if (!spec.shift.empty() && spec.shift.size() != dim) {
    throw ConfigError("shift must have " + std::to_string(dim) + " entries");
  }
  if (!spec.rotation.empty() && !is_orthogonal(spec.rotation, dim)) {
    throw ConfigError("rotation is not a " + std::to_string(dim) + "x" + std::to_string(dim) +
                      " orthogonal matrix (tolerance 1e-10)");
  }
  auto eval = base.eval;
  auto shift = std::make_shared<const Vec>(spec.shift.empty() ? Vec(dim, 0.0) : spec.shift);
  auto rot = std::make_shared<const Vec>(spec.rotation);
  const double bias = spec.bias;
  Objective objective = [eval, shift, rot, bias, dim](std::span<const double> x) {
    Vec z(dim);
    for (std::size_t d = 0; d < dim; ++d) z[d] = x[d] - (*shift)[d];
    if (!rot->empty()) {
      Vec y(dim, 0.0);
      for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) y[r] += (*rot)[r * dim + c] * z[c];
      }
      z = std::move(y);
    }
    return eval(z) + bias;
  };
  return {std::move(name), dim, std::move(lower), std::move(upper), std::move(objective), f_star};
}

}  // namespace

TransformedProblem make_transformed(std::string_view base_name, std::size_t dim,
                                    const TransformSpec& spec) {
  const auto& base = find_function(base_name);
  if (dim < base.min_dim) throw ConfigError(base.name + ": dimension too small");
  TransformedProblem out{compose(base, base.name + "_transformed", dim, Vec(dim, base.lower),
                                 Vec(dim, base.upper), spec, base.f_star + spec.bias),
                         std::nullopt};
  if (base.x_star) {
    Vec xs(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      double v = spec.shift.empty() ? 0.0 : spec.shift[d];
      for (std::size_t r = 0; r < dim; ++r) {
        const double rt = spec.rotation.empty() ? (r == d ? 1.0 : 0.0)
                                                : spec.rotation[r * dim + d];
        v += rt * *base.x_star;
      }
      xs[d] = v;
    }
    out.x_star = std::move(xs);
  }
  return out;
}

namespace {

using nlohmann::json;

constexpr const char* kRequired[] = {"name",  "dim",      "bounds", "base_function",
                                     "shift", "rotation", "bias",   "f_star"};

const json& field(const json& obj, const char* key, const std::string& where = "") {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError("external problem: missing field '" + where + key + "'");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError("external problem: field '" + what + "' must be a number");
  return v.get<double>();
}

Vec vector_field(const json& v, std::size_t dim, const std::string& what) {
  if (v.is_number()) return Vec(dim, v.get<double>());
  if (!v.is_array()) throw ParseError("external problem: field '" + what + "' must be an array");
  Vec out;
  for (const auto& e : v) {
    if (e.is_array()) {
      for (const auto& inner : e) out.push_back(number(inner, what));
    } else {
      out.push_back(number(e, what));
    }
  }
  return out;
}

}  // namespace

Problem parse_external_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string missing;
    for (const char* key : kRequired) {
      if (text.find("\"" + std::string(key) + "\"") == std::string_view::npos) {
        missing += (missing.empty() ? "" : ", ") + std::string(key);
      }
    }
    throw ParseError("external problem: malformed document (" + std::string(e.what()) + ")" +
                     (missing.empty() ? "" : "; missing field(s): " + missing));
  }
  if (!doc.is_object()) throw ParseError("external problem: top level must be an object");
  for (const char* key : kRequired) field(doc, key);

  const auto& name_v = doc.at("name");
  if (!name_v.is_string()) throw ParseError("external problem: field 'name' must be a string");
  const auto& dim_v = doc.at("dim");
  if (!dim_v.is_number_integer() || dim_v.get<long long>() <= 0) {
    throw ParseError("external problem: field 'dim' must be a positive integer");
  }
  const auto dim = static_cast<std::size_t>(dim_v.get<long long>());
  const auto& bounds = doc.at("bounds");
  Vec lower = vector_field(field(bounds, "lower", "bounds."), dim, "bounds.lower");
  Vec upper = vector_field(field(bounds, "upper", "bounds."), dim, "bounds.upper");
  if (lower.size() != dim || upper.size() != dim) {
    throw ParseError("external problem: bounds must have " + std::to_string(dim) + " entries");
  }
  const auto& base_v = doc.at("base_function");
  if (!base_v.is_string()) {
    throw ParseError("external problem: field 'base_function' must be a string");
  }
  const auto& base = find_function(base_v.get<std::string>());
  if (dim < base.min_dim) throw ConfigError(base.name + ": dimension too small");

  TransformSpec spec;
  spec.shift = vector_field(doc.at("shift"), dim, "shift");
  if (spec.shift.size() != dim) {
    throw ParseError("external problem: shift must have " + std::to_string(dim) + " entries");
  }
  const auto& rot = doc.at("rotation");
  if (rot.is_string()) {
    if (rot.get<std::string>() != "identity") {
      throw ParseError("external problem: rotation must be \"identity\" or a matrix");
    }
  } else {
    spec.rotation = vector_field(rot, dim, "rotation");
    if (spec.rotation.size() != dim * dim) {
      throw ParseError("external problem: rotation must have " + std::to_string(dim * dim) +
                       " entries");
    }
  }
  spec.bias = number(doc.at("bias"), "bias");
  std::optional<double> f_star;
  if (!doc.at("f_star").is_null()) f_star = number(doc.at("f_star"), "f_star");

  Problem p = compose(base, name_v.get<std::string>(), dim, std::move(lower), std::move(upper),
                      spec, f_star);
  p.validate();
  return p;
}

Problem load_external_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_external_problem(buf.str());
}

}  // namespace pso
