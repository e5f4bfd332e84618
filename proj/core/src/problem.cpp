#include "wg/problem.hpp"

#include <cmath>
#include <numbers>

#include "wg/errors.hpp"

namespace wg {

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec example1() {
  ProblemSpec p;
  p.name = "example1";
  p.a = Eigen::Matrix2d::Identity();
  p.exact = [](Vec2 q) { return std::sin(q.x) * std::sin(kPi * q.y); };
  p.exact_grad = [](Vec2 q) {
    return Vec2{std::cos(q.x) * std::sin(kPi * q.y),
                kPi * std::sin(q.x) * std::cos(kPi * q.y)};
  };
  // -Laplace(sin(x) sin(pi y)) = (1 + pi^2) sin(x) sin(pi y)
  p.f = [](Vec2 q) {
    return (1.0 + kPi * kPi) * std::sin(q.x) * std::sin(kPi * q.y);
  };
  p.g = p.exact;
  return p;
}

ProblemSpec example2() {
  ProblemSpec p;
  p.name = "example2";
  p.a << 2.0, 1.0, 1.0, 3.0;
  p.exact = [](Vec2 q) { return std::pow(q.x, 5) * q.y * q.y; };
  p.exact_grad = [](Vec2 q) {
    return Vec2{5.0 * std::pow(q.x, 4) * q.y * q.y,
                2.0 * std::pow(q.x, 5) * q.y};
  };
  // -div(a grad u) with u = x^5 y^2:
  //   u_xx = 20 x^3 y^2, u_xy = 10 x^4 y, u_yy = 2 x^5
  //   f = -(2 u_xx + 2 u_xy + 3 u_yy)
  p.f = [](Vec2 q) {
    const double x = q.x, y = q.y;
    return -(40.0 * x * x * x * y * y + 20.0 * x * x * x * x * y +
             6.0 * x * x * x * x * x);
  };
  p.g = p.exact;
  return p;
}

ProblemSpec example3() {
  ProblemSpec p;
  p.name = "example3";
  p.a = Eigen::Matrix2d::Identity();
  p.exact = [](Vec2 q) { return std::exp(kPi * q.x) * std::sin(kPi * q.y); };
  p.exact_grad = [](Vec2 q) {
    return Vec2{kPi * std::exp(kPi * q.x) * std::sin(kPi * q.y),
                kPi * std::exp(kPi * q.x) * std::cos(kPi * q.y)};
  };
  // u is harmonic, so the load vanishes.
  p.f = [](Vec2) { return 0.0; };
  p.g = p.exact;
  return p;
}

}  // namespace

void validate_problem(const ProblemSpec& p) {
  if (std::abs(p.a(0, 1) - p.a(1, 0)) >
      1e-14 * (1.0 + p.a.cwiseAbs().maxCoeff()))
    throw ConfigError("problem '" + p.name + "': a must be symmetric");
  if (!(p.a(0, 0) > 0.0 && p.a.determinant() > 0.0))
    throw ConfigError("problem '" + p.name + "': a must be positive definite");
  if (!p.f) throw ConfigError("problem '" + p.name + "': load f missing");
  if (!p.g)
    throw ConfigError("problem '" + p.name + "': boundary data g missing");
}

ProblemSpec make_problem(const std::string& name) {
  ProblemSpec p;
  if (name == "example1") {
    p = example1();
  } else if (name == "example2") {
    p = example2();
  } else if (name == "example3") {
    p = example3();
  } else {
    std::string known;
    for (const std::string& n : problem_names())
      known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown problem '" + name + "' (known: " + known + ")");
  }
  validate_problem(p);
  return p;
}

std::vector<std::string> problem_names() {
  return {"example1", "example2", "example3"};
}

}  // namespace wg
