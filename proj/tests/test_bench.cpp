#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pso/bench.hpp"
#include "pso/errors.hpp"
#include "pso/rng.hpp"

using namespace pso;

namespace {

// Independent reference definitions written from the textbook forms.
double ref_rastrigin(const std::vector<double>& x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

double ref_ackley(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double a = 0, b = 0;
  for (double v : x) {
    a += v * v;
    b += std::cos(2.0 * std::numbers::pi * v);
  }
  return 20.0 + std::exp(1.0) - 20.0 * std::exp(-0.2 * std::sqrt(a / n)) - std::exp(b / n);
}

double ref_weierstrass(const std::vector<double>& x) {
  double total = 0;
  for (double v : x) {
    for (int k = 0; k <= 20; ++k) {
      const double ak = std::pow(0.5, k), bk = std::pow(3.0, k);
      total += ak * std::cos(2.0 * std::numbers::pi * bk * (v + 0.5));
    }
  }
  double c = 0;
  for (int k = 0; k <= 20; ++k)
    c += std::pow(0.5, k) * std::cos(2.0 * std::numbers::pi * std::pow(3.0, k) * 0.5);
  return total - static_cast<double>(x.size()) * c;
}

std::vector<double> random_point(const BenchmarkFunction& f, std::size_t dim, RngStream& rng) {
  std::vector<double> x(dim);
  for (auto& v : x) v = rng.uniform(f.lower, f.upper);
  return x;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("psolab_bench_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("catalog has the thirteen classical functions") {
  const std::vector<std::string> expected{
      "sphere",        "rosenbrock",    "rastrigin", "ackley", "griewank",
      "schwefel_2_26", "schwefel_1_2",  "schwefel_2_21",       "schwefel_2_22",
      "step",          "quartic_noise-free",     "weierstrass",          "penalized_1"};
  REQUIRE(suite_functions("classical") == expected);
  REQUIRE_THROWS_AS(suite_functions("cec2017"), ConfigError);
  REQUIRE_THROWS_AS(find_function("nope"), ConfigError);
}

TEST_CASE("hand-evaluated values") {
  REQUIRE(eval_function("sphere", std::vector<double>(7, 0.0)) == 0.0);
  REQUIRE(eval_function("rastrigin", std::vector<double>(4, 0.0)) == 0.0);
  std::vector<double> e1{1, 0, 0};
  REQUIRE(eval_function("rastrigin", e1) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(std::fabs(eval_function("ackley", std::vector<double>(10, 0.0))) <= 1e-12);
  REQUIRE(eval_function("rosenbrock", std::vector<double>(6, 1.0)) == 0.0);
  REQUIRE_THROWS_AS(eval_function("rosenbrock", std::vector<double>(1, 1.0)), ConfigError);
}

TEST_CASE("reference implementations agree on random points") {
  RngStream rng(17);
  for (std::size_t dim : {2u, 5u, 13u}) {
    for (int k = 0; k < 200; ++k) {
      const auto x = random_point(find_function("rastrigin"), dim, rng);
      REQUIRE(eval_function("rastrigin", x) == Catch::Approx(ref_rastrigin(x)).epsilon(1e-12));
      const auto y = random_point(find_function("ackley"), dim, rng);
      REQUIRE(eval_function("ackley", y) == Catch::Approx(ref_ackley(y)).epsilon(1e-12));
      const auto z = random_point(find_function("weierstrass"), dim, rng);
      REQUIRE(eval_function("weierstrass", z) ==
              Catch::Approx(ref_weierstrass(z)).epsilon(1e-10).margin(1e-10));
    }
  }
}

TEST_CASE("declared optima evaluate to f_star") {
  for (const auto& f : function_catalog()) {
    for (std::size_t dim : {2u, 5u, 30u}) {
      const auto xs = function_x_star(f.name, dim);
      if (!xs) continue;
      INFO(f.name << " dim " << dim);
      REQUIRE(std::fabs(f.eval(*xs) - f.f_star) <= 1e-12);
    }
  }
  // schwefel_2_26 optimum is irrational; check near-optimality at the usual point.
  REQUIRE(eval_function("schwefel_2_26", std::vector<double>(5, 420.968746)) < 1e-6);
}

TEST_CASE("all functions are finite inside their boxes") {
  RngStream rng(3);
  for (const auto& f : function_catalog()) {
    for (std::size_t dim : {5u, 10u, 30u, 50u, 100u}) {
      for (int k = 0; k < 2000; ++k) {
        const auto x = random_point(f, dim, rng);
        const double v = f.eval(x);
        if (!std::isfinite(v)) FAIL(f.name << " non-finite at dim " << dim);
      }
    }
  }
}

TEST_CASE("random rotations are orthogonal and seeded") {
  for (std::size_t dim : {1u, 2u, 10u, 30u}) {
    const auto r = random_rotation(dim, 7);
    REQUIRE(is_orthogonal(r, dim));
    REQUIRE(r == random_rotation(dim, 7));
  }
  REQUIRE(random_rotation(5, 7) != random_rotation(5, 8));
  REQUIRE_FALSE(is_orthogonal(std::vector<double>{1, 0.1, 0, 1}, 2));
}

TEST_CASE("transforms") {
  RngStream rng(5);
  SECTION("identity transform is the base function") {
    const auto t = make_transformed("griewank", 6, {});
    const auto& f = find_function("griewank");
    for (int k = 0; k < 100; ++k) {
      const auto x = random_point(f, 6, rng);
      REQUIRE(t.problem.objective(x) == f.eval(x));
    }
  }
  SECTION("shift relocates the optimum") {
    TransformSpec spec;
    spec.shift = {1, -2, 3, 0.5};
    spec.bias = 100;
    const auto t = make_transformed("rastrigin", 4, spec);
    REQUIRE(t.x_star);
    REQUIRE(*t.x_star == spec.shift);
    REQUIRE(t.problem.objective(*t.x_star) == Catch::Approx(100.0).margin(1e-12));
    REQUIRE(*t.problem.f_star == 100.0);
  }
  SECTION("rotated sphere equals the shifted sphere") {
    TransformSpec spec;
    spec.rotation = random_rotation(8, 7);
    spec.shift = std::vector<double>(8, 2.5);
    const auto t = make_transformed("sphere", 8, spec);
    const auto& f = find_function("sphere");
    for (int k = 0; k < 200; ++k) {
      auto x = random_point(f, 8, rng);
      auto shifted = x;
      for (auto& v : shifted) v -= 2.5;
      REQUIRE(t.problem.objective(x) == Catch::Approx(f.eval(shifted)).epsilon(1e-9));
    }
  }
  SECTION("rotated optimum maps through the transpose") {
    TransformSpec spec;
    spec.rotation = random_rotation(3, 11);
    spec.shift = {0.1, 0.2, 0.3};
    const auto t = make_transformed("rosenbrock", 3, spec);
    REQUIRE(t.problem.objective(*t.x_star) == Catch::Approx(0.0).margin(1e-20));
  }
  SECTION("non-orthogonal rotation is rejected") {
    TransformSpec spec;
    spec.rotation = {1, 2, 3, 4};
    REQUIRE_THROWS_AS(make_transformed("sphere", 2, spec), ConfigError);
  }
}

TEST_CASE("external problem files") {
  SECTION("sphere with zero transform behaves as the built-in") {
    const auto p = parse_external_problem(R"({"name": "ext_sphere", "dim": 3,
      "bounds": {"lower": [-5, -5, -5], "upper": [5, 5, 5]}, "base_function": "sphere",
      "shift": [0, 0, 0], "rotation": "identity", "bias": 0, "f_star": 0})");
    REQUIRE(p.name == "ext_sphere");
    REQUIRE(p.dim == 3);
    RngStream rng(1);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
      REQUIRE(p.objective(x) == eval_function("sphere", x));
    }
    REQUIRE(*p.f_star == 0.0);
  }
  SECTION("permutation rotation swaps coordinates") {
    const auto path = temp_file("swap.json", R"({"name": "swap", "dim": 2,
      "bounds": {"lower": [-5, -5], "upper": [5, 5]}, "base_function": "rosenbrock",
      "shift": [0, 0], "rotation": [[0, 1], [1, 0]], "bias": 0, "f_star": null})");
    const auto p = load_external_problem(path);
    REQUIRE_FALSE(p.f_star);
    RngStream rng(2);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      std::vector<double> swapped{x[1], x[0]};
      REQUIRE(p.objective(x) == eval_function("rosenbrock", swapped));
    }
  }
  SECTION("truncated file names the missing field") {
    try {
      parse_external_problem(R"({"name": "t", "dim": 2, "bounds": {"lower": [0, 0], "upp)");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("base_function"));
    }
  }
  SECTION("missing field in a well-formed file") {
    try {
      parse_external_problem(R"({"name": "t", "dim": 1, "bounds": {"lower": [0], "upper": [1]},
        "base_function": "sphere", "rotation": "identity", "bias": 0, "f_star": 0})");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("shift"));
    }
  }
  SECTION("non-orthogonal matrix is rejected") {
    REQUIRE_THROWS_AS(parse_external_problem(R"({"name": "t", "dim": 2,
      "bounds": {"lower": [0, 0], "upper": [1, 1]}, "base_function": "sphere",
      "shift": [0, 0], "rotation": [1, 1, 0, 1], "bias": 0, "f_star": 0})"),
                      ConfigError);
  }
  SECTION("unreadable path") {
    REQUIRE_THROWS_AS(load_external_problem("/nonexistent/problem.json"), ParseError);
  }
}
