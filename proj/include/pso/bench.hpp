#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pso/problem.hpp"

namespace pso {

/// A classical test function with box bounds broadcast to every dimension.
struct BenchmarkFunction {
  std::string name;
  double (*eval)(std::span<const double>) = nullptr;
  double lower = 0;
  double upper = 0;
  double f_star = 0;
  std::optional<double> x_star;  // optimizer coordinate, broadcast
  std::size_t min_dim = 1;
};

/// The 13 built-in functions, in catalog order.
const std::vector<BenchmarkFunction>& function_catalog();

/// Throws ConfigError for unknown names.
const BenchmarkFunction& find_function(std::string_view name);

/// Throws ConfigError for unknown names or a dimension below the minimum.
double eval_function(std::string_view name, std::span<const double> x);

std::optional<Vec> function_x_star(std::string_view name, std::size_t dim);

/// Built-in function on its default box.
Problem make_problem(std::string_view name, std::size_t dim);

/// Function names of a named suite ("classical").
std::vector<std::string> suite_functions(std::string_view suite);

struct TransformSpec {
  Vec shift;      // empty = zero shift
  Vec rotation;   // row-major dim x dim; empty = identity
  double bias = 0;
};

/// Seeded random orthogonal matrix (row-major), orthonormalized twice.
Vec random_rotation(std::size_t dim, std::uint64_t seed);

/// Max |R^T R - I| entry is within tol.
bool is_orthogonal(std::span<const double> rotation, std::size_t dim, double tol = 1e-10);

struct TransformedProblem {
  Problem problem;
  std::optional<Vec> x_star;
};

/// g(x) = f(R (x - shift)) + bias over the base function's default box.
/// Throws ConfigError for a non-orthogonal rotation or mismatched sizes.
TransformedProblem make_transformed(std::string_view base, std::size_t dim,
                                    const TransformSpec& spec);

/// Reads an external problem description (JSON object with name, dim,
/// bounds{lower, upper}, base_function, shift, rotation, bias, f_star).
/// Throws ParseError naming missing or malformed fields; ConfigError for
/// a non-orthogonal rotation.
Problem parse_external_problem(std::string_view text);
Problem load_external_problem(const std::string& path);

}  // namespace pso
