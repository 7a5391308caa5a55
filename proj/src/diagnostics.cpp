#include "dnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "dnls/errors.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

namespace {

constexpr double kSlack = 1e-12;

bool leq(double a, double b) { return a <= b + kSlack; }
bool close(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= kSlack * (1.0 + std::abs(a) + std::abs(b));
}
double recip(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

double potential_sum(const LatticeFunction& u, double p) {
  double s = 0.0;
  for (cplx z : u.values()) s += std::pow(std::abs(z), p + 1.0);
  return s;
}

double difference_kinetic(const LatticeFunction& u) {
  const BoxSpec& box = u.box();
  Field out(u.size());
  double s = 0.0;
  for (int j = 0; j < box.d; ++j) {
    kernels::difference(box, u.field().data(), out.data(), j);
    for (cplx z : out) s += std::norm(z);
  }
  return s;
}

double partial_kinetic(const LatticeFunction& u) {
  double s = 0.0;
  for (int j = 1; j <= u.box().d; ++j) {
    auto dj = partial_spectral(u, j);
    for (cplx z : dj.values()) s += std::norm(z);
  }
  return s;
}

double relative_drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const double ref = series.front();
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

}  // namespace

double mass(const LatticeFunction& u) {
  double s = 0.0;
  for (cplx z : u.values()) s += std::norm(z);
  return s;
}

double energy(const LatticeFunction& u, int mu, double p) {
  return difference_kinetic(u) + (2.0 * mu / (p + 1.0)) * potential_sum(u, p);
}

double energy_partial_form(const LatticeFunction& u, int mu, double p) {
  return partial_kinetic(u) + (2.0 * mu / (p + 1.0)) * potential_sum(u, p);
}

double conserved_energy(const LatticeFunction& u, int mu, double p) {
  return difference_kinetic(u) + (4.0 * mu / (p + 1.0)) * potential_sum(u, p);
}

ConservationReport conservation_report(const Trajectory& traj, int mu, double p) {
  ConservationReport rep;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& u = traj.snapshots[i];
    const double pot = potential_sum(u, p);
    const double kd = difference_kinetic(u);
    const double kp = partial_kinetic(u);
    rep.times.push_back(traj.times[i]);
    rep.mass.push_back(mass(u));
    const double ed = kd + (2.0 * mu / (p + 1.0)) * pot;
    const double ep = kp + (2.0 * mu / (p + 1.0)) * pot;
    rep.energy_difference_form.push_back(ed);
    rep.energy_partial_form.push_back(ep);
    rep.conserved_energy.push_back(kd + (4.0 * mu / (p + 1.0)) * pot);
    const double scale = std::max(std::abs(ed), 1e-300);
    rep.form_mismatch = std::max(rep.form_mismatch, std::abs(ep - ed) / scale);
  }
  rep.mass_drift = relative_drift(rep.mass);
  rep.energy_drift = relative_drift(rep.energy_difference_form);
  rep.conserved_energy_drift = relative_drift(rep.conserved_energy);
  return rep;
}

bool admissible(double q, double r, int d) {
  if (!(q > 0.0) || !(r > 0.0) || d < 1) return false;
  if (!leq(2.0, q) || !leq(2.0, r)) return false;
  if (close(q, 2.0) && std::isinf(r) && d == 3) return false;
  return leq(recip(q) + d * recip(r) / 3.0, d / 6.0);
}

bool condition_pairs(double p0, double q0, double p, int d) {
  if (!(p0 > 0.0) || !(q0 > 0.0) || !(p > 0.0) || d < 1) return false;
  const double lhs = recip(p0) + d * recip(q0) / 3.0;

  bool first = leq((6.0 + d) / (6.0 * p), lhs) && leq(p, p0) && leq(p0, 2.0 * p) && leq(p, q0) &&
               leq(q0, 2.0 * p) && !(close(p0, 2.0 * p) && close(q0, p) && d == 3);

  bool second = (p - 1.0 < p0) && (p - 1.0 < q0) && std::isfinite(p0) && std::isfinite(q0) &&
                leq(1.0 / (p - 1.0), lhs) && leq(0.5, d / 6.0 + (p - 1.0) * recip(p0)) &&
                leq(6.0, (p - 1.0) * d);
  return first || second;
}

std::vector<AdmissiblePair> default_pair_list(double p, int d) {
  std::vector<AdmissiblePair> pairs{{INFINITY, 2.0}};
  if (admissible(p + 1.0, p + 1.0, d)) pairs.push_back({p + 1.0, p + 1.0});
  const double e = 2.0 * (d + 3.0) / d;
  if (admissible(e, e, d)) {
    bool dup = std::any_of(pairs.begin(), pairs.end(), [&](const AdmissiblePair& a) { return close(a.q, e) && close(a.r, e); });
    if (!dup) pairs.push_back({e, e});
  }
  return pairs;
}

ConservationReport conservation_run(const SemilinearProblem& prob, const TimeGrid& grid, const SolveOptions& opts) {
  SolveOptions o = opts;
  o.store = true;
  return conservation_report(solve_semilinear_splitstep(prob, grid, o), prob.mu, prob.p);
}

std::vector<double> sample_times(double t0, double t1, int n, bool logarithmic) {
  if (n < 2) throw DomainError("sample_times: need at least two samples");
  if (!(t1 > t0) || !(t0 >= 0.0)) throw DomainError("sample_times: require 0 <= t0 < t1");
  if (logarithmic && !(t0 > 0.0)) throw DomainError("sample_times: logarithmic spacing requires t0 > 0");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    t[static_cast<std::size_t>(i)] = logarithmic ? t0 * std::pow(t1 / t0, s) : t0 + s * (t1 - t0);
  }
  t.back() = t1;
  return t;
}

}  // namespace dnls
