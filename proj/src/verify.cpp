#include "fracocp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracocp {

void VerifySettings::validate() const {
  if (n_scan < 2) throw std::invalid_argument("verify n_scan must be >= 2");
  if (!(golden_tol > 0.0)) throw std::invalid_argument("verify golden_tol must be positive");
  if (!(bound_rel_tol >= 0.0) || !(d_rel_tol >= 0.0) || !(d_abs_tol >= 0.0)) throw std::invalid_argument("verify tolerances must be >= 0");
  if (n_dirs < 0 || n_trials < 0 || n_per_radius < 0 || integral_trials < 0) {
    throw std::invalid_argument("verify sample counts must be >= 0");
  }
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0)) throw std::invalid_argument("verify eps_grid entries must be positive");
    if (k > 0 && !(eps_grid[k] < eps_grid[k - 1])) throw std::invalid_argument("verify eps_grid must be decreasing");
  }
  for (double r : linf_radii) {
    if (!(r > 0.0)) throw std::invalid_argument("verify linf_radii must be positive");
  }
  for (double r : probe_radii) {
    if (!(r > 0.0)) throw std::invalid_argument("verify probe_radii must be positive");
  }
}

std::vector<double> VerifySettings::effective_eps_grid(double d_inf) const {
  if (!eps_grid.empty()) return eps_grid;
  std::vector<double> g;
  if (d_inf > 0.0) {
    for (int k = 0; k <= 16; ++k) g.push_back(d_inf * std::pow(10.0, -k / 4.0));
  }
  return g;
}

ScalarMin scan_minimize(const std::function<double(double)>& fn, double lo, double hi, int n_scan, double tol) {
  if (!(hi > lo) || n_scan < 2) throw std::invalid_argument("scan_minimize needs hi > lo and n_scan >= 2");
  const double step = (hi - lo) / n_scan;
  ScalarMin best{lo, fn(lo)};
  int jbest = 0;
  for (int j = 1; j <= n_scan; ++j) {
    const double t = j == n_scan ? hi : lo + j * step;
    const double f = fn(t);
    if (f < best.value) {
      best = {t, f};
      jbest = j;
    }
  }
  double a = lo + std::max(jbest - 1, 0) * step;
  double b = jbest + 1 >= n_scan ? hi : lo + (jbest + 1) * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double e = a + g * (b - a);
  double fc = fn(c);
  double fe = fn(e);
  while (b - a > tol) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = fn(e);
    }
  }
  if (fc < best.value) best = {c, fc};
  if (fe < best.value) best = {e, fe};
  return best;
}

PontryaginScan pontryagin_scan(const Problem& prob, const Field& y, const Field& q, const Field& u, int n_scan,
                               double tol) {
  require_grid(u, prob.grid());
  require_same_grid(u, y);
  require_same_grid(u, q);
  const auto& b = prob.bounds();
  const auto m = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd gap(m), arg(m), mins(m);
  double sup = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    auto h = [&](double t) { return hamiltonian(prob, k, y[k], q[k], t).value; };
    const double hu = h(u[k]);
    const ScalarMin best = scan_minimize(h, b.alpha(), b.beta(), n_scan, tol);
    gap[i] = hu - best.value;
    arg[i] = best.arg;
    mins[i] = best.value;
    sup = std::max(sup, gap[i]);
    scale = std::max(scale, std::abs(hu));
  }
  return {u.with_values(std::move(gap)), u.with_values(std::move(arg)), u.with_values(std::move(mins)), sup, scale};
}

namespace {

double integral_hamiltonian(const Problem& prob, const Field& y, const Field& q, const Field& v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += hamiltonian(prob, i, y[i], q[i], v[i]).value;
  return prob.grid().weight() * sum;
}

Field unit_l2(const Field& v) {
  const double n = norm(v, Norm::L2);
  return (1.0 / n) * v;
}

}  // namespace

IntegralMinimumCheck integral_minimum_check(const Problem& prob, const Field& y, const Field& q, const Field& u,
                                            int trials, Rng& rng) {
  const auto& b = prob.bounds();
  const double hu = integral_hamiltonian(prob, y, q, u);
  const double tol = 1e-10 * (1.0 + std::abs(hu));
  IntegralMinimumCheck out;
  out.trials = trials;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    const Field v = random_admissible(u.grid_ptr(), b.alpha(), b.beta(), rng, k % 2 == 1);
    const double margin = integral_hamiltonian(prob, y, q, v) - hu;
    out.min_margin = std::min(out.min_margin, margin);
    if (margin < -tol) ++out.violations;
  }
  if (trials == 0) out.min_margin = 0.0;
  return out;
}

std::vector<ConeRestriction> cone_restrictions(const ControlBounds& bounds, const Field& u, const Field& d,
                                               const VerifySettings& settings) {
  require_same_grid(u, d);
  const double at_tol = settings.bound_rel_tol * bounds.width();
  const double d_tol = std::max(settings.d_rel_tol * norm(d, Norm::Linf), settings.d_abs_tol);
  std::vector<ConeRestriction> out(u.size(), ConeRestriction::Free);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(d[i]) > d_tol) {
      out[i] = ConeRestriction::Zero;
    } else if (u[i] - bounds.alpha() <= at_tol) {
      out[i] = ConeRestriction::NonNegative;
    } else if (bounds.beta() - u[i] <= at_tol) {
      out[i] = ConeRestriction::NonPositive;
    }
  }
  return out;
}

ConeSample critical_cone_sample(const Problem& prob, const Field& u, const Field& d, int n_dirs, Rng& rng,
                                const VerifySettings& settings) {
  const auto mask = cone_restrictions(prob.bounds(), u, d, settings);
  ConeSample out;
  for (auto r : mask) {
    if (r == ConeRestriction::Free) ++out.free_nodes;
    else if (r == ConeRestriction::Zero) ++out.zero_nodes;
    else ++out.sign_nodes;
  }
  out.trivial = out.zero_nodes == mask.size();
  if (out.trivial) return out;

  auto apply_mask = [&](const Field& raw) {
    Eigen::VectorXd v = raw.values();
    for (std::size_t i = 0; i < mask.size(); ++i) {
      auto& x = v[static_cast<Eigen::Index>(i)];
      switch (mask[i]) {
        case ConeRestriction::Zero: x = 0.0; break;
        case ConeRestriction::NonNegative: x = std::abs(x); break;
        case ConeRestriction::NonPositive: x = -std::abs(x); break;
        case ConeRestriction::Free: break;
      }
    }
    return raw.with_values(std::move(v));
  };

  // Smooth draws can vanish on a sparse free set; cap the attempts.
  const int max_attempts = 4 * n_dirs + 16;
  for (int k = 0; k < max_attempts && static_cast<int>(out.dirs.size()) < n_dirs; ++k) {
    const bool smooth = k % 2 == 1;
    const Field raw = smooth ? random_smooth_field(u.grid_ptr(), rng, 8) : random_nodal_field(u.grid_ptr(), rng);
    const Field v = apply_mask(raw);
    if (norm(v, Norm::L2) == 0.0) continue;
    out.dirs.push_back(unit_l2(v));
  }
  return out;
}

bool in_critical_cone(const ControlBounds& bounds, const Field& u, const Field& d, const Field& v,
                      const VerifySettings& settings) {
  require_same_grid(u, v);
  const auto mask = cone_restrictions(bounds, u, d, settings);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    switch (mask[i]) {
      case ConeRestriction::Zero:
        if (v[i] != 0.0) return false;
        break;
      case ConeRestriction::NonNegative:
        if (v[i] < 0.0) return false;
        break;
      case ConeRestriction::NonPositive:
        if (v[i] > 0.0) return false;
        break;
      case ConeRestriction::Free:
        break;
    }
  }
  return true;
}

SecondOrderResult second_order_necessary(const Problem& prob, const ReducedEval& at, std::span<const Field> dirs) {
  SecondOrderResult out;
  out.tol = 1e-8 * std::max(1.0, std::abs(at.J));
  out.n_dirs = dirs.size();
  if (dirs.empty()) {
    out.vacuous = true;
    out.pass = true;
    return out;
  }
  const Hessian hess(prob, at);
  out.cone_min = std::numeric_limits<double>::infinity();
  for (const Field& v : dirs) {
    const double nv = inner(v, v);
    out.cone_min = std::min(out.cone_min, hess.form(v, v) / nv);
  }
  out.pass = out.cone_min >= -out.tol;
  return out;
}

StructuralFit structural_fit(const Field& d, std::span<const double> eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("structural_fit needs a nonempty eps grid");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0)) throw std::invalid_argument("structural_fit eps grid must be positive");
    if (k > 0 && !(eps_grid[k] < eps_grid[k - 1])) {
      throw std::invalid_argument("structural_fit eps grid must be decreasing");
    }
  }
  const double w = d.grid().weight();
  const double total = w * static_cast<double>(d.size());
  StructuralFit out;
  out.min_abs_d = d.values().cwiseAbs().minCoeff();
  std::vector<double> abs_d(d.values().data(), d.values().data() + d.size());
  for (double& x : abs_d) x = std::abs(x);
  std::sort(abs_d.begin(), abs_d.end());
  for (double e : eps_grid) {
    const auto count = std::lower_bound(abs_d.begin(), abs_d.end(), e) - abs_d.begin();
    out.eps.push_back(e);
    out.measure.push_back(w * static_cast<double>(count));
  }

  const bool saturated = std::all_of(out.measure.begin(), out.measure.end(), [&](double m) { return m >= total; });
  if (saturated) {
    out.note = "switching function degenerate: |{|d| < eps}| = |Omega| for every eps";
    return out;
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < out.eps.size(); ++k) {
    if (out.measure[k] > 0.0) {
      lx.push_back(std::log(out.eps[k]));
      ly.push_back(std::log(out.measure[k]));
    }
  }
  if (out.measure.back() == 0.0 || lx.size() < 2) {
    if (out.min_abs_d == 0.0) {
      out.note = "switching function vanishes at a node and the fit is degenerate";
      return out;
    }
    out.holds = true;
    out.gamma_infinite = true;
    out.gamma = std::numeric_limits<double>::infinity();
    out.K = 1.0;
    out.K_sup = 1.0;
    out.eps0 = out.min_abs_d;
    out.eps0_sup = out.min_abs_d;
    out.note = "empty sublevel set below eps0";
    return out;
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  out.gamma = sxy / sxx;
  out.K = std::exp(my - out.gamma * mx);
  if (!(out.gamma > 0.0)) {
    out.note = "fitted exponent is not positive";
    return out;
  }
  out.holds = true;
  out.K_sup = 0.0;
  for (std::size_t k = 0; k < out.eps.size(); ++k) {
    out.K_sup = std::max(out.K_sup, out.measure[k] / std::pow(out.eps[k], out.gamma));
  }
  out.eps0_sup = out.eps.front();
  // Largest eps below which every probed point satisfies the fitted bound.
  out.eps0 = 0.0;
  for (std::size_t k = out.eps.size(); k-- > 0;) {
    if (out.measure[k] > out.K * std::pow(out.eps[k], out.gamma) * (1.0 + 1e-12)) break;
    out.eps0 = out.eps[k];
  }
  if (out.gamma <= 1.0) out.note = "gamma <= 1: outside the hypotheses of the L2 sufficiency route";
  return out;
}

double growth_kappa(const ControlBounds& bounds, double K, double gamma) {
  if (!(K > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("growth_kappa needs K > 0 and gamma > 0");
  const double inv = std::isinf(gamma) ? 0.0 : 1.0 / gamma;
  return 1.0 / (2.0 * std::pow(4.0 * bounds.max_abs() * K, inv));
}

namespace {

Field random_feasible_near(const Field& u, const ControlBounds& b, Rng& rng, int kind) {
  switch (kind % 3) {
    case 0:
      return random_admissible(u.grid_ptr(), b.alpha(), b.beta(), rng, false);
    case 1:
      return random_admissible(u.grid_ptr(), b.alpha(), b.beta(), rng, true);
    default: {
      const double r = b.width() * std::pow(10.0, rng.uniform(-4.0, 0.0));
      Eigen::VectorXd v = u.values();
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = b.clamp(v[i] + r * rng.uniform(-1.0, 1.0));
      return u.with_values(std::move(v));
    }
  }
}

}  // namespace

GrowthReport growth_check(const Problem& prob, const ReducedEval& at, const StructuralFit& fit, int n_trials,
                          Rng& rng, const VerifySettings& settings, const SolveSettings& solve) {
  GrowthReport out;
  out.applicable = fit.holds;
  if (!fit.holds) return out;
  const auto& b = prob.bounds();
  out.kappa = fit.gamma_infinite ? 0.5 : growth_kappa(b, fit.K_sup, fit.gamma);
  out.exponent = fit.gamma_infinite ? 1.0 : 1.0 + 1.0 / fit.gamma;
  out.l2_route_in_hypotheses = fit.gamma > 1.0;
  const double dinf = norm(at.grad, Norm::Linf);

  out.min_margin = std::numeric_limits<double>::infinity();
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_trials; ++k) {
    const Field v = random_feasible_near(at.u, b, rng, k);
    const Field diff = v - at.u;
    const double l1 = norm(diff, Norm::L1);
    if (l1 == 0.0) continue;
    ++out.trials;
    const double lhs = inner(at.grad, diff);
    const double scale = std::pow(l1, out.exponent);
    const double margin = lhs - out.kappa * scale;
    out.min_margin = std::min(out.min_margin, margin);
    out.min_ratio = std::min(out.min_ratio, lhs / scale);
    if (margin < -1e-12 * (1.0 + dinf * l1)) {
      if (!out.witness) out.witness = v;
      ++out.violations;
    }
  }
  if (out.trials == 0) out.min_margin = out.min_ratio = 0.0;

  if (!fit.gamma_infinite) return out;
  out.linf_checked = true;
  const double tolJ = 1e-12 * (1.0 + std::abs(at.J));
  for (double rel : settings.linf_radii) {
    const double eta = rel * b.width();
    std::size_t bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_trials; ++k) {
      Eigen::VectorXd v = at.u.values();
      if (k % 2 == 0) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = b.clamp(v[i] + 0.999 * eta * rng.uniform(-1.0, 1.0));
      } else {
        const Field s = random_smooth_field(at.u.grid_ptr(), rng, 8);
        const double sc = 0.999 * eta * rng.uniform() / std::max(norm(s, Norm::Linf), 1e-300);
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = b.clamp(v[i] + sc * s.values()[i]);
      }
      const Field vf = at.u.with_values(std::move(v));
      const double l1 = norm(vf - at.u, Norm::L1);
      if (l1 == 0.0) continue;
      const double Jv = objective(prob, vf, solve);
      const double margin = Jv - at.J - 0.5 * out.kappa * l1;
      worst = std::min(worst, margin);
      if (margin < -tolJ) ++bad;
    }
    out.linf_radii.push_back(eta);
    out.linf_violations.push_back(bad);
    if (bad == 0) {
      out.linf_radius = eta;
      out.linf_min_margin = std::isinf(worst) ? 0.0 : worst;
      break;
    }
  }
  return out;
}

CoercivityResult coercivity_check(const Problem& prob, const Field& y, const Field& q, int n_scan, double tol) {
  require_grid(y, prob.grid());
  require_same_grid(y, q);
  const auto& b = prob.bounds();
  CoercivityResult out;
  out.nu_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto huu = [&](double t) { return hamiltonian(prob, i, y[i], q[i], t).duu; };
    const ScalarMin m = scan_minimize(huu, b.alpha(), b.beta(), n_scan, tol);
    if (m.value < out.nu_min) out = {m.value, i, m.arg, false};
  }
  out.pass = out.nu_min > 0.0;
  return out;
}

GrowthProbe quadratic_growth_probe(const Problem& prob, const ReducedEval& at, std::span<const double> radii,
                                   int n_per_radius, Rng& rng, const SolveSettings& solve) {
  const auto& b = prob.bounds();
  std::vector<Field> dirs;
  for (int k = 0; k < n_per_radius; ++k) {
    const Field raw = k % 2 == 0 ? random_nodal_field(at.u.grid_ptr(), rng)
                                 : random_smooth_field(at.u.grid_ptr(), rng, 8);
    dirs.push_back(unit_l2(raw));
  }
  GrowthProbe out;
  for (double r : radii) {
    GrowthProbeRow row{r, std::numeric_limits<double>::infinity(), 0};
    for (const Field& w : dirs) {
      const Field v = project(b, at.u + r * w);
      const Field diff = v - at.u;
      const double n2 = inner(diff, diff);
      if (n2 == 0.0) continue;
      ++row.samples;
      row.min_ratio = std::min(row.min_ratio, (objective(prob, v, solve) - at.J) / n2);
    }
    if (row.samples == 0) row.min_ratio = 0.0;
    out.rows.push_back(row);
  }
  if (!out.rows.empty()) {
    const auto smallest =
        std::min_element(out.rows.begin(), out.rows.end(), [](auto& a, auto& c) { return a.radius < c.radius; });
    out.delta_est = smallest->min_ratio;
    out.pass = smallest->samples > 0 && out.delta_est > 0.0;
  }
  return out;
}

KKTReport infeasible_report(const Problem& prob, const Field& u) {
  require_grid(u, prob.grid());
  KKTReport out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!prob.bounds().contains(u[i])) ++out.infeasible_nodes;
  }
  out.feasible = out.infeasible_nodes == 0;
  out.verdict = out.feasible ? "FAIL" : "INFEASIBLE";
  return out;
}

KKTReport certify(const Problem& prob, const ReducedEval& at, const VerifySettings& settings,
                  const SeedStreams& seeds, const SolveSettings& solve, double stat_tol) {
  settings.validate();
  KKTReport out = infeasible_report(prob, at.u);
  if (!out.feasible) return out;
  const auto& b = prob.bounds();
  out.J = at.J;

  out.stationarity_residual = stationarity_residual(b, at.u, at.grad);
  out.stat_tol = stat_tol;
  out.stationarity_pass = out.stationarity_residual <= stat_tol;
  out.sign_conditions_pass =
      sign_conditions_hold(b, at.u, at.grad, stat_tol, std::max(settings.bound_rel_tol * b.width(), stat_tol));

  const PontryaginScan scan = pontryagin_scan(prob, at.y, at.q, at.u, settings.n_scan, settings.golden_tol);
  out.pontryagin_gap = scan.gap_sup;
  out.pontryagin_h_scale = scan.h_scale;
  out.pontryagin_tol = 1e-8 * (1.0 + scan.h_scale);
  out.pontryagin_pass = scan.gap_sup <= out.pontryagin_tol;
  Rng rng_int = seeds.stream("integral_minimum");
  out.integral_minimum = integral_minimum_check(prob, at.y, at.q, at.u, settings.integral_trials, rng_int);

  Rng rng_cone = seeds.stream("critical_cone");
  VerifySettings cone_settings = settings;
  cone_settings.d_abs_tol = std::max(settings.d_abs_tol, stat_tol);
  out.cone = critical_cone_sample(prob, at.u, at.grad, settings.n_dirs, rng_cone, cone_settings);
  out.second_order = second_order_necessary(prob, at, out.cone.dirs);

  const std::vector<double> eps = settings.effective_eps_grid(norm(at.grad, Norm::Linf));
  if (eps.empty()) {
    out.structural.note = "switching function degenerate: d = 0";
  } else {
    out.structural = structural_fit(at.grad, eps);
  }
  Rng rng_growth = seeds.stream("growth");
  out.growth = growth_check(prob, at, out.structural, settings.n_trials, rng_growth, settings, solve);

  out.coercivity = coercivity_check(prob, at.y, at.q, settings.n_scan, settings.golden_tol);
  Rng rng_probe = seeds.stream("quadratic_growth");
  std::vector<double> radii;
  for (double r : settings.probe_radii) radii.push_back(r * b.width());
  out.quadratic_growth = quadratic_growth_probe(prob, at, radii, settings.n_per_radius, rng_probe, solve);

  out.verdict = out.stationarity_pass ? "PASS" : "FAIL";
  return out;
}

}  // namespace fracocp
