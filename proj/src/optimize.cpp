#include "fracocp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fracocp/field_io.hpp"

namespace fracocp {

void OptimSettings::validate() const {
  if (!(step0 > 0.0)) throw std::invalid_argument("optimizer step0 must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("optimizer armijo_c must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("optimizer shrink must lie in (0, 1)");
  if (max_iter < 1) throw std::invalid_argument("optimizer max_iter must be >= 1");
  if (stat_tol && !(*stat_tol > 0.0)) throw std::invalid_argument("optimizer stat_tol must be positive");
  if (cg_max_iter < 1 || !(cg_rel_tol > 0.0)) throw std::invalid_argument("optimizer CG settings must be positive");
  if (!(min_step > 0.0)) throw std::invalid_argument("optimizer min_step must be positive");
  solve.validate();
}

std::string to_string(OptimStatus s) {
  switch (s) {
    case OptimStatus::Converged:
      return "converged";
    case OptimStatus::MaxIterations:
      return "max_iterations";
    case OptimStatus::LineSearchFailure:
      return "line_search_failure";
  }
  return "?";
}

Field project(const ControlBounds& bounds, const Field& v) {
  return v.map([&](double x) { return bounds.clamp(x); });
}

double stationarity_residual(const ControlBounds& bounds, const Field& u, const Field& d) {
  require_same_grid(u, d);
  double r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, std::abs(u[i] - bounds.clamp(u[i] - d[i])));
  return r;
}

std::size_t count_active(const ControlBounds& bounds, const Field& u) {
  const double tol = active_tolerance(bounds);
  std::size_t n = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] - bounds.alpha() <= tol || bounds.beta() - u[i] <= tol) ++n;
  }
  return n;
}

bool sign_conditions_hold(const ControlBounds& bounds, const Field& u, const Field& d, double tol,
                          double active_tol) {
  require_same_grid(u, d);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] - bounds.alpha() <= active_tol) {
      if (d[i] < -tol) return false;
    } else if (bounds.beta() - u[i] <= active_tol) {
      if (d[i] > tol) return false;
    } else if (std::abs(d[i]) > tol) {
      return false;
    }
  }
  return true;
}

namespace {

// Truncated CG on the inactive block of the Hessian. Returns nullopt when
// negative curvature shows up before any progress.
std::optional<Eigen::VectorXd> inactive_newton_direction(const Hessian& hess, const Field& d,
                                                         const std::vector<bool>& free, const OptimSettings& st) {
  const auto m = d.values().size();
  auto restrict_free = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!free[static_cast<std::size_t>(i)]) v[i] = 0.0;
    }
    return v;
  };
  const Eigen::VectorXd b = restrict_free(-d.values());
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  if (bnorm == 0.0) return x;
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  for (int k = 0; k < st.cg_max_iter; ++k) {
    // Euclidean CG on the nodal system: the weight cancels between both sides.
    const Eigen::VectorXd hp = restrict_free(hess.apply(d.with_values(p)).values());
    const double curv = p.dot(hp);
    if (!(curv > 0.0)) {
      if (k == 0) return std::nullopt;
      break;
    }
    const double a = rr / curv;
    x += a * p;
    r -= a * hp;
    const double rr_new = r.squaredNorm();
    if (std::sqrt(rr_new) <= st.cg_rel_tol * bnorm) break;
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return x;
}

}  // namespace

OptimResult optimize(const Problem& prob, const Field& u0, const OptimSettings& settings) {
  settings.validate();
  const auto& bounds = prob.bounds();
  const double tol = settings.stationarity_tol(bounds);
  const double act_tol = active_tolerance(bounds);

  OptimResult res{gradient(prob, project(bounds, u0), settings.solve), {}, OptimStatus::MaxIterations, 0.0, tol};
  res.residual = stationarity_residual(bounds, res.at.u, res.at.grad);
  res.trace.rows.push_back({0, res.at.J, res.residual, 0.0, count_active(bounds, res.at.u)});

  double sigma0 = settings.step0;
  for (int it = 1; it <= settings.max_iter; ++it) {
    if (res.residual <= tol) {
      res.status = OptimStatus::Converged;
      return res;
    }
    const ReducedEval& cur = res.at;
    const Field& u = cur.u;
    const Field& d = cur.grad;

    // Search path: u(sigma) = P(u + sigma * direction).
    Field direction = -d;
    bool newton_step = false;
    if (settings.use_newton) {
      std::vector<bool> free(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        const bool at_lo = u[i] - bounds.alpha() <= act_tol && d[i] > 0.0;
        const bool at_hi = bounds.beta() - u[i] <= act_tol && d[i] < 0.0;
        free[i] = !(at_lo || at_hi);
      }
      const Hessian hess(prob, cur);
      if (auto p = inactive_newton_direction(hess, d, free, settings)) {
        Eigen::VectorXd dir = *p;
        for (Eigen::Index i = 0; i < dir.size(); ++i) {
          if (!free[static_cast<std::size_t>(i)]) dir[i] = -d.values()[i];
        }
        direction = d.with_values(std::move(dir));
        newton_step = true;
      }
    }

    double sigma = newton_step ? 1.0 : sigma0;
    bool accepted = false;
    for (;;) {
      Field trial = project(bounds, u + sigma * direction);
      const double predicted = inner(d, u - trial);
      if (predicted <= 0.0 && newton_step) {
        // Not a descent path: fall back to the projected gradient.
        direction = -d;
        newton_step = false;
        sigma = sigma0;
        continue;
      }
      if (predicted > 0.0) {
        StateSolution st = state_solve(prob, trial, settings.solve);
        const double J_trial = objective_value(prob, st.y, trial);
        if (J_trial <= cur.J - settings.armijo_c * predicted) {
          Field q = adjoint_solve(prob, st.y, trial);
          Field g = switching_function(prob, st.y, q, trial);
          ReducedEval next{std::move(trial), std::move(st.y), std::move(q), J_trial, std::move(g)};
          if (!newton_step) {
            // Barzilai-Borwein estimate for the next trial step.
            const Field s = next.u - u;
            const Field yk = next.grad - d;
            const double sy = inner(s, yk);
            sigma0 = sy > 0.0 ? std::clamp(inner(s, s) / sy, 1e-10, 1e10) : settings.step0;
          }
          res.at = std::move(next);
          accepted = true;
          break;
        }
      }
      sigma *= settings.shrink;
      if (sigma < settings.min_step) break;
    }
    if (!accepted) {
      res.status = OptimStatus::LineSearchFailure;
      return res;
    }
    res.residual = stationarity_residual(bounds, res.at.u, res.at.grad);
    res.trace.rows.push_back({it, res.at.J, res.residual, sigma, count_active(bounds, res.at.u)});
  }
  res.status = res.residual <= tol ? OptimStatus::Converged : OptimStatus::MaxIterations;
  return res;
}

void write_trace_csv(std::ostream& os, const OptimTrace& trace) {
  os << "iter,J,residual,step,active\n";
  for (const auto& r : trace.rows) {
    os << r.iter << ',' << format_double(r.J) << ',' << format_double(r.residual) << ',' << format_double(r.step)
       << ',' << r.active << '\n';
  }
}

}  // namespace fracocp
