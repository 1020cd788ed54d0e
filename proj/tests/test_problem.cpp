#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracocp/errors.hpp"
#include "fracocp/problem.hpp"
#include "support.hpp"

using namespace fracocp;
using fracocp::testing::pi;

namespace {

GridPtr small_grid() { return build_grid_1d({0.0, 1.0}, 9); }

std::vector<NonlinearityF> all_F(const GridPtr& g) {
  auto f0 = Field::from_function(g, [](auto x) { return std::sin(pi * x[0]) + 0.3; });
  return {NonlinearityF::linear(f0, 0.7), NonlinearityF::cubic(f0, 0.4, -0.8), NonlinearityF::damping(f0, 0.2, 1.3)};
}

std::vector<ObjectiveL> all_L(const GridPtr& g) {
  auto yd = Field::from_function(g, [](auto x) { return x[0] * (1 - x[0]); });
  return {ObjectiveL::tracking(yd, 0.3), ObjectiveL::nonconvex(yd, 0.1, 0.9)};
}

// Centered differences of a value callable against analytic partials.
template <class Eval>
double max_partial_error(Eval eval, double t, double xi) {
  const double h = 1e-5;
  const Partials p = eval(t, xi);
  auto v = [&](double a, double b) { return eval(a, b).value; };
  auto dt = [&](double a, double b) { return eval(a, b).dt; };
  auto dxi = [&](double a, double b) { return eval(a, b).dxi; };
  const double fd_t = (v(t + h, xi) - v(t - h, xi)) / (2 * h);
  const double fd_xi = (v(t, xi + h) - v(t, xi - h)) / (2 * h);
  const double fd_tt = (dt(t + h, xi) - dt(t - h, xi)) / (2 * h);
  const double fd_txi = (dt(t, xi + h) - dt(t, xi - h)) / (2 * h);
  const double fd_xixi = (dxi(t, xi + h) - dxi(t, xi - h)) / (2 * h);
  double err = 0.0;
  for (auto [fd, ex] : {std::pair{fd_t, p.dt}, {fd_xi, p.dxi}, {fd_tt, p.dtt}, {fd_txi, p.dtxi}, {fd_xixi, p.dxixi}}) {
    err = std::max(err, std::abs(fd - ex) / std::max(1.0, std::abs(ex)));
  }
  return err;
}

}  // namespace

TEST_CASE("control bounds") {
  CHECK_THROWS(ControlBounds(1.0, 1.0));
  CHECK_THROWS(ControlBounds(2.0, 1.0));
  ControlBounds b(-1.0, 1.0);
  CHECK(b.clamp(1.5) == 1.0);
  CHECK(b.clamp(-3.0) == -1.0);
  CHECK(b.clamp(0.25) == 0.25);
  CHECK(b.max_abs() == 1.0);
  CHECK(ControlBounds(-3.0, 1.0).max_abs() == 3.0);
}

TEST_CASE("hamiltonian direct substitution") {
  auto g = small_grid();
  auto op = make_fractional_operator(g, 0.5);
  Problem prob(op, ControlBounds(-2, 2), NonlinearityF::linear(Field::zeros(g), 1.0),
               ObjectiveL::tracking(Field::constant(g, 1.0), 0.0));
  CHECK(hamiltonian(prob, 3, 2.0, 3.0, 1.0).value == doctest::Approx(-2.5));
  CHECK(hamiltonian(prob, 3, 2.0, 0.0, 1.0).value == doctest::Approx(prob.L().value(3, 2.0, 1.0)));
}

TEST_CASE("hamiltonian partials match finite differences") {
  auto g = small_grid();
  auto op = make_fractional_operator(g, 0.5);
  Rng rng(1);
  for (const auto& F : all_F(g)) {
    for (const auto& L : all_L(g)) {
      Problem prob(op, ControlBounds(0.0, 2.0), F, L);
      for (int k = 0; k < 50; ++k) {
        const auto node = static_cast<std::size_t>(rng.index(g->size()));
        const double t = rng.uniform(-2, 2), eta = rng.uniform(-2, 2), xi = rng.uniform(0, 2);
        const double h = 1e-5;
        const auto H = hamiltonian(prob, node, t, eta, xi);
        const double fd = (hamiltonian(prob, node, t, eta, xi + h).value -
                           hamiltonian(prob, node, t, eta, xi - h).value) / (2 * h);
        CHECK(H.du == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
        const double fdy = (hamiltonian(prob, node, t + h, eta, xi).value -
                            hamiltonian(prob, node, t - h, eta, xi).value) / (2 * h);
        CHECK(H.dy == doctest::Approx(fdy).epsilon(1e-7).scale(1.0));
      }
    }
  }
}

TEST_CASE("family partials match centered differences on 1e3 samples") {
  auto g = small_grid();
  Rng rng(2);
  ControlBounds b(0.0, 2.0);
  for (const auto& F : all_F(g)) {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto node = static_cast<std::size_t>(rng.index(g->size()));
      worst = std::max(worst, max_partial_error([&](double t, double xi) { return F.eval(node, t, xi); },
                                                rng.uniform(-3, 3), rng.uniform(b.alpha(), b.beta())));
    }
    CHECK_MESSAGE(worst <= 1e-6, F.name());
  }
  for (const auto& L : all_L(g)) {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto node = static_cast<std::size_t>(rng.index(g->size()));
      worst = std::max(worst, max_partial_error([&](double t, double xi) { return L.eval(node, t, xi); },
                                                rng.uniform(-3, 3), rng.uniform(b.alpha(), b.beta())));
    }
    CHECK_MESSAGE(worst <= 1e-6, L.name());
  }
}

TEST_CASE("switching function") {
  auto g = small_grid();
  auto op = make_fractional_operator(g, 0.5);
  Rng rng(4);
  auto y = random_nodal_field(g, rng);
  auto q = random_nodal_field(g, rng);
  auto u = random_admissible(g, -1, 1, rng, false);
  Problem convex(op, ControlBounds(-1, 1), NonlinearityF::linear(Field::zeros(g), 0.0),
                 ObjectiveL::tracking(Field::zeros(g), 0.4));
  auto d = switching_function(convex, y, q, u);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(d[i] == doctest::Approx(0.4 * u[i] + q[i]));

  Problem flat(op, ControlBounds(-1, 1), NonlinearityF::linear(Field::zeros(g), 0.0),
               ObjectiveL::nonconvex(Field::zeros(g), 0.0, 0.0));
  CHECK(norm(switching_function(flat, y, Field::zeros(g), u), Norm::Linf) == 0.0);

  for (const auto& F : all_F(g)) {
    for (const auto& L : all_L(g)) {
      Problem prob(op, ControlBounds(0.0, 2.0), F, L);
      auto v = random_admissible(g, 0, 2, rng, false);
      auto dd = switching_function(prob, y, q, v);
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double h = 1e-5;
        const double fd = (hamiltonian(prob, i, y[i], q[i], v[i] + h).value -
                           hamiltonian(prob, i, y[i], q[i], v[i] - h).value) / (2 * h);
        CHECK(dd[i] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
      }
    }
  }
  CHECK_THROWS_AS(switching_function(convex, y, q, Field::zeros(build_grid_1d({0, 1}, 4))), GridMismatch);
}

TEST_CASE("validate_family: cubic with c = 0 is monotone") {
  auto g = small_grid();
  Rng rng(5);
  auto F = NonlinearityF::cubic(Field::constant(g, 1.0), 0.0, 0.5);
  auto L = ObjectiveL::tracking(Field::zeros(g), 1.0);
  auto rep = validate_family(F, L, ControlBounds(-1, 1), 3.0, 2000, rng);
  CHECK(rep.accepted);
  CHECK_FALSE(rep.witness);
  CHECK(rep.bounds_consistent);
  CHECK(rep.f0_finite);
  CHECK(rep.empirical_CF <= rep.closed_form_CF);
}

TEST_CASE("validate_family: damping closed-form bound equals a dense scan") {
  auto g = small_grid();
  const double M = 2.5;
  ControlBounds b(0.0, 1.0);
  auto F = NonlinearityF::damping(Field::constant(g, 0.5), 0.0, 1.0);
  // Dense scan oracle over |t| <= M, xi in [0, 1].
  double scan = 0.0;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const double t = -M + 2 * M * i / 400.0;
      const double xi = j / 400.0;
      scan = std::max(scan, F.eval(0, t, xi).abs_derivative_sum());
    }
  }
  CHECK(F.derivative_bound(M, b) == doctest::Approx(scan).epsilon(1e-12));
  Rng rng(6);
  auto rep = validate_family(F, ObjectiveL::tracking(Field::zeros(g), 0.0), b, M, 5000, rng);
  CHECK(rep.accepted);
  CHECK(rep.bounds_consistent);
  CHECK(rep.empirical_CF <= scan);
  CHECK(rep.empirical_CF >= 0.9 * scan);
}

TEST_CASE("validate_family: linear with c = -1 is rejected with a witness") {
  auto g = small_grid();
  Rng rng(7);
  auto F = NonlinearityF::linear(Field::zeros(g), -1.0);
  auto rep = validate_family(F, ObjectiveL::tracking(Field::zeros(g), 0.0), ControlBounds(-1, 1), 1.0, 100, rng);
  CHECK_FALSE(rep.accepted);
  REQUIRE(rep.witness);
  CHECK(rep.witness->dF_dt == 1.0);
  CHECK_THROWS_AS(Problem(make_fractional_operator(g, 0.5), ControlBounds(-1, 1), F,
                          ObjectiveL::tracking(Field::zeros(g), 0.0)),
                  AssumptionViolation);
}

TEST_CASE("parameter constraints name the violated hypothesis") {
  auto g = small_grid();
  auto op = make_fractional_operator(g, 0.5);
  auto L = ObjectiveL::tracking(Field::zeros(g), 0.0);
  try {
    Problem(op, ControlBounds(-1, 1), NonlinearityF::damping(Field::zeros(g), 0.0, 1.0), L);
    FAIL("expected rejection");
  } catch (const AssumptionViolation& e) {
    CHECK(std::string(e.what()).find("alpha >= 0") != std::string::npos);
  }
  CHECK_THROWS_AS(Problem(op, ControlBounds(-1, 1), NonlinearityF::cubic(Field::zeros(g), 0.0, 1.5), L),
                  AssumptionViolation);
  CHECK_THROWS_AS(Problem(op, ControlBounds(-1, 1), NonlinearityF::linear(Field::zeros(g), 0.0),
                          ObjectiveL::tracking(Field::zeros(g), -0.1)),
                  AssumptionViolation);
  CHECK_THROWS_AS(Problem(op, ControlBounds(-1, 1), NonlinearityF::linear(Field::zeros(build_grid_1d({0, 1}, 3)), 0),
                          L),
                  GridMismatch);
}

TEST_CASE("closed-form bounds dominate sampled partials for every family") {
  auto g = small_grid();
  Rng rng(8);
  for (const auto& F : all_F(g)) {
    for (const auto& L : all_L(g)) {
      for (ControlBounds b : {ControlBounds(0.0, 1.0), ControlBounds(0.5, 4.0)}) {
        auto rep = validate_family(F, L, b, 1.7, 3000, rng);
        CHECK(rep.accepted);
        CHECK(rep.bounds_consistent);
      }
    }
  }
}

TEST_CASE("intermediate-value convexity: bisection finds w for F and L") {
  auto g = small_grid();
  Rng rng(9);
  ControlBounds b(0.0, 2.0);
  for (const auto& F : all_F(g)) {
    for (int k = 0; k < 200; ++k) {
      const auto node = static_cast<std::size_t>(rng.index(g->size()));
      const double t = rng.uniform(-2, 2), xi = rng.uniform(0, 2), v = rng.uniform(0, 2), lam = rng.uniform();
      const double target = lam * F.value(node, t, xi) + (1 - lam) * F.value(node, t, v);
      double lo = xi, hi = v;
      double glo = F.value(node, t, lo) - target;
      for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = F.value(node, t, mid) - target;
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      CHECK(std::abs(F.value(node, t, lo) - target) <= 1e-10 * (1 + std::abs(target)));
    }
  }
  for (const auto& L : all_L(g)) {
    for (int k = 0; k < 200; ++k) {
      const auto node = static_cast<std::size_t>(rng.index(g->size()));
      const double t = rng.uniform(-2, 2), xi = rng.uniform(0, 2), v = rng.uniform(0, 2), lam = rng.uniform();
      const double target = lam * L.value(node, t, xi) + (1 - lam) * L.value(node, t, v);
      // the endpoint with the smaller value already satisfies the inequality
      const double w = L.value(node, t, xi) <= L.value(node, t, v) ? xi : v;
      CHECK(L.value(node, t, w) <= target + 1e-12);
    }
  }
}
