#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnls/diagnostics.hpp"
#include "dnls/errors.hpp"
#include "dnls/fft.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

namespace {

// Space-time norm from the spatial norms ||u(t_i)||_r sampled at strictly increasing times.
double norm_from_samples(const std::vector<double>& times, const std::vector<double>& spatial,
                         const SpaceTimeNormSpec& spec) {
  if (!(spec.t0 < spec.t1)) throw DomainError("space-time interval must satisfy t0 < t1");
  if (!(spec.q > 0.0) || !(spec.r > 0.0)) throw DomainError("space-time exponents must be positive");
  if (times.size() != spatial.size() || times.empty())
    throw DomainError("times and snapshots must match and be nonempty");
  const double tol = 1e-9 * (1.0 + std::abs(spec.t1));
  if (spec.t0 < times.front() - tol || spec.t1 > times.back() + tol)
    throw DomainError("trajectory does not cover the requested interval");

  // Integrand samples f_i = ||u(t_i)||_r^q, linearly interpolated at the interval ends.
  const bool sup_t = std::isinf(spec.q);
  std::vector<double> f(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) f[i] = sup_t ? spatial[i] : std::pow(spatial[i], spec.q);
  auto value_at = [&](double t) {
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    std::size_t j = static_cast<std::size_t>(it - times.begin());
    if (j < times.size() && std::abs(times[j] - t) <= tol) return f[j];
    if (j == 0) return f[0];
    if (j >= times.size()) return f.back();
    double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
    return (1.0 - w) * f[j - 1] + w * f[j];
  };

  std::vector<double> ts{spec.t0}, fs{value_at(spec.t0)};
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > spec.t0 + tol && times[i] < spec.t1 - tol) {
      ts.push_back(times[i]);
      fs.push_back(f[i]);
    }
  }
  ts.push_back(spec.t1);
  fs.push_back(value_at(spec.t1));

  if (sup_t) return *std::max_element(fs.begin(), fs.end());
  double integral = 0.0;
  for (std::size_t i = 1; i < ts.size(); ++i) integral += 0.5 * (ts[i] - ts[i - 1]) * (fs[i] + fs[i - 1]);
  return std::pow(integral, 1.0 / spec.q);
}

}  // namespace

double spacetime_norm(const std::vector<double>& times, const std::vector<LatticeFunction>& u,
                      const SpaceTimeNormSpec& spec) {
  if (!(spec.r > 0.0)) throw DomainError("space-time exponents must be positive");
  std::vector<double> spatial;
  spatial.reserve(u.size());
  for (const auto& v : u) spatial.push_back(lp_norm(v, spec.r));
  return norm_from_samples(times, spatial, spec);
}

double spacetime_norm(const Trajectory& traj, const SpaceTimeNormSpec& spec) {
  return spacetime_norm(traj.times, traj.snapshots, spec);
}

double strichartz_sup(const Trajectory& traj, const std::vector<AdmissiblePair>& pairs, double t0, double t1) {
  double worst = 0.0;
  for (const auto& pr : pairs) worst = std::max(worst, spacetime_norm(traj, {pr.q, pr.r, t0, t1}));
  return worst;
}

DecayFitReport decay_fit(const LatticeFunction& u0, int d, const std::vector<double>& times, const GuardPolicy& guard) {
  const BoxSpec& box = u0.box();
  if (box.d != d) throw DomainError("decay fit dimension does not match the data");
  if (times.size() < 2) throw DomainError("decay fit needs at least two sample times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw DomainError("decay sample times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("decay sample times must be strictly increasing");
  }
  const double l1 = lp_norm(u0, 1.0);
  if (l1 == 0.0) throw DomainError("decay fit of the zero function is degenerate (log of zero norm)");

  // Group velocity is at most one site per unit time on each axis.
  const int shell = guard.shell_width > 0 ? guard.shell_width : default_shell_width(box);
  if (guard.action != GuardAction::Off) {
    const double floor = 1e-16 * sup_norm(u0);
    std::array<int, 3> c{};
    int radius = 0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
      if (std::abs(u0[i]) <= floor) continue;
      box.coords(i, c);
      for (int j = 0; j < d; ++j) radius = std::max(radius, std::abs(c[j]));
    }
    if (radius + times.back() > box.M / 2 - shell) {
      std::ostringstream msg;
      msg << "decay window too long: data radius " << radius << " plus t = " << times.back()
          << " reaches the boundary shell of the M = " << box.M << " box";
      throw GuardViolation(msg.str());
    }
  }

  DecayFitReport rep;
  rep.times = times;
  for (double t : times) {
    auto u = propagate_free(u0, t);
    double frac = boundary_mass_fraction(u, shell);
    rep.max_boundary_fraction = std::max(rep.max_boundary_fraction, frac);
    if (guard.action == GuardAction::Abort && frac > guard.threshold) {
      std::ostringstream msg;
      msg << "decay window too long: boundary mass fraction " << frac << " at t = " << t;
      throw GuardViolation(msg.str());
    }
    double s = sup_norm(u);
    rep.sup_norm.push_back(s);
    rep.bound_constant = std::max(rep.bound_constant, s * std::pow(t, d / 3.0) / l1);
  }
  const double n = static_cast<double>(times.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double x = std::log(times[i]), y = std::log(rep.sup_norm[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.intercept = (sy - rep.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double e = std::log(rep.sup_norm[i]) - (rep.intercept + rep.slope * std::log(times[i]));
    ss += e * e;
  }
  rep.residual = std::sqrt(ss / n);
  return rep;
}

StrichartzProbeReport strichartz_constant_probe(int d, const AdmissiblePair& pair,
                                                const std::vector<LatticeFunction>& ensemble, double window,
                                                double sample_dt) {
  if (!admissible(pair.q, pair.r, d)) throw DomainError("Strichartz probe requires an admissible pair");
  if (ensemble.empty()) throw DomainError("Strichartz probe needs a nonempty ensemble");
  const TimeGrid grid = TimeGrid::make(window, sample_dt);
  StrichartzProbeReport rep;
  for (const auto& f : ensemble) {
    if (f.box().d != d) throw DomainError("ensemble member has the wrong dimension");
    const double n0 = l2_norm(f);
    if (n0 == 0.0) throw DomainError("ensemble member has zero norm");
    std::vector<double> times, spatial;
    Field u = f.field();
    for (long k = 0; k <= grid.steps; ++k) {
      if (k > 0) kernels::apply_propagator(f.box(), u, grid.dt);
      times.push_back(grid.time(k));
      spatial.push_back(lp_norm(std::span<const cplx>(u), pair.r));
    }
    double v = norm_from_samples(times, spatial, {pair.q, pair.r, 0.0, window});
    rep.ratios.push_back(v / n0);
    rep.constant = std::max(rep.constant, v / n0);
  }
  return rep;
}

}  // namespace dnls
