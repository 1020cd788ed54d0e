#pragma once

#include <cmath>
#include <numbers>

#include "fracocp/calculus.hpp"

namespace fracocp::testing {

inline constexpr double pi = std::numbers::pi;

inline GridPtr unit_1d(int n) { return build_grid_1d({0.0, 1.0}, n); }

inline Field sine_field(const GridPtr& g, int k, double amp = 1.0) {
  return Field::from_function(g, [&](auto x) { return amp * std::sin(k * pi * x[0]); });
}

/// F1 + L1: f0 = 1 + sin(pi x), y_d = sin(pi x) / 2, bounds [-1, 1].
inline Problem convex_1d(int n, double s, double nu, double c = 0.0, double alpha = -1.0, double beta = 1.0) {
  auto g = unit_1d(n);
  auto op = make_fractional_operator(g, s);
  auto f0 = Field::from_function(g, [](auto x) { return 1.0 + std::sin(pi * x[0]); });
  auto yd = Field::from_function(g, [](auto x) { return 0.5 * std::sin(pi * x[0]) + 0.2 * std::sin(3 * pi * x[0]); });
  return Problem(op, ControlBounds(alpha, beta), NonlinearityF::linear(f0, c), ObjectiveL::tracking(yd, nu));
}

/// F2 (cubic) + L1.
inline Problem cubic_1d(int n, double s, double nu, double c = 0.5, double kappa_g = 0.5) {
  auto g = unit_1d(n);
  auto op = make_fractional_operator(g, s);
  auto f0 = Field::from_function(g, [](auto x) { return 2.0 * std::sin(pi * x[0]) + x[0]; });
  auto yd = Field::from_function(g, [](auto x) { return std::sin(2 * pi * x[0]); });
  return Problem(op, ControlBounds(-1.0, 2.0), NonlinearityF::cubic(f0, c, kappa_g), ObjectiveL::tracking(yd, nu));
}

/// F3 (control-dependent damping) + L1, bounds [0, 2].
inline Problem damping_1d(int n, double s, double nu, double c = 0.2, double d = 1.0) {
  auto g = unit_1d(n);
  auto op = make_fractional_operator(g, s);
  auto f0 = Field::from_function(g, [](auto x) { return 1.0 + std::cos(2 * pi * x[0]); });
  auto yd = Field::from_function(g, [](auto x) { return 0.05 * std::sin(pi * x[0]); });
  return Problem(op, ControlBounds(0.0, 2.0), NonlinearityF::damping(f0, c, d), ObjectiveL::tracking(yd, nu));
}

/// F1 + L2 (nonconvex control cost).
inline Problem nonconvex_1d(int n, double s, double nu, double tau, double alpha, double beta, Field y_d,
                            Field f0) {
  auto op = make_fractional_operator(y_d.grid_ptr(), s);
  return Problem(op, ControlBounds(alpha, beta), NonlinearityF::linear(std::move(f0), 0.0),
                 ObjectiveL::nonconvex(std::move(y_d), nu, tau));
}

/// Least-squares slope of log(err) against log(eps).
inline double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    mx += std::log(eps[k]);
    my += std::log(err[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    sxx += (std::log(eps[k]) - mx) * (std::log(eps[k]) - mx);
    sxy += (std::log(eps[k]) - mx) * (std::log(err[k]) - my);
  }
  return sxy / sxx;
}

}  // namespace fracocp::testing
