#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "wg/mesh.hpp"

namespace wg {

// Dirichlet model problem -div(a grad u) = f on the unit square with
// constant symmetric positive definite a. Built-in instances carry the exact
// solution for error studies; exact and exact_grad may be empty for custom
// data.
struct ProblemSpec {
  std::string name;
  Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  std::function<double(Vec2)> f;
  std::function<double(Vec2)> g;  // boundary data
  std::function<double(Vec2)> exact;
  std::function<Vec2(Vec2)> exact_grad;

  bool has_exact() const { return static_cast<bool>(exact); }
};

// Throws ConfigError if a is not symmetric positive definite or f/g missing.
void validate_problem(const ProblemSpec& p);

// example1: u = sin(x) sin(pi y), a = I.
// example2: u = x^5 y^2, a = [[2,1],[1,3]].
// example3: u = exp(pi x) sin(pi y), a = I, f = 0 (harmonic).
ProblemSpec make_problem(const std::string& name);

std::vector<std::string> problem_names();

}  // namespace wg
