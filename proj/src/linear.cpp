#include <cmath>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/fft.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

Trajectory solve_linear_inhomogeneous(const LatticeFunction& u0, const std::vector<LatticeFunction>& F,
                                      const TimeGrid& grid, const SolveOptions& opts) {
  const BoxSpec& box = u0.box();
  if (F.size() != static_cast<std::size_t>(grid.steps + 1))
    throw DomainError("source must be sampled at every grid time (steps + 1 samples)");
  for (const auto& f : F)
    if (!(f.box() == box)) throw DomainError("source sample lives on a different box");

  const std::size_t n = box.sites();
  const double scale = 1.0 / static_cast<double>(n);
  auto K = MultiplierCache::instance().get(box, MultiplierCache::Op::K);
  TrajectoryRecorder rec(grid, box, opts, "linear Duhamel");
  Field u0_hat = u0.field();
  fft::forward(box, u0_hat.data());
  Field g_prev(n), g_cur(n), acc(n, cplx(0.0, 0.0)), w(n);
  const cplx minus_i(0.0, -1.0);
  for (long k = 0; k <= grid.steps; ++k) {
    const double t = grid.time(k);
    g_cur = F[k].field();
    fft::forward(box, g_cur.data());
    kernels::rotate_spectrum(box, K->data(), g_cur.data(), t);
    if (k > 0)
      for (std::size_t i = 0; i < n; ++i) acc[i] += 0.5 * grid.dt * (g_prev[i] + g_cur[i]);
    std::swap(g_prev, g_cur);
    for (std::size_t i = 0; i < n; ++i) w[i] = u0_hat[i] + minus_i * acc[i];
    kernels::rotate_spectrum(box, K->data(), w.data(), -t);
    fft::backward(box, w.data());
    for (auto& z : w) z *= scale;
    rec.record(k, w);
  }
  return std::move(rec).finish();
}

LinearEstimateReport linear_estimate_constant(const Trajectory& traj, const std::vector<LatticeFunction>& F) {
  if (F.size() != static_cast<std::size_t>(traj.grid.steps + 1))
    throw DomainError("source must be sampled at every grid time");
  if (traj.size() == 0) throw DomainError("empty trajectory");
  const WeightedNormSpec w21{2.0, 1.0};
  std::vector<double> integral(F.size(), 0.0);
  double prev = weighted_norm(F[0], w21);
  for (std::size_t k = 1; k < F.size(); ++k) {
    double cur = weighted_norm(F[k], w21);
    integral[k] = integral[k - 1] + 0.5 * traj.grid.dt * (prev + cur);
    prev = cur;
  }
  LinearEstimateReport rep;
  const double n0 = weighted_norm(traj.front(), w21);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const long step = std::lround(t / traj.grid.dt);
    double lhs = weighted_norm(traj.snapshots[i], w21);
    double rhs = (1.0 + t) * (n0 + integral[step]);
    rep.times.push_back(t);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    if (rhs > 0.0) rep.fitted_constant = std::max(rep.fitted_constant, lhs / rhs);
  }
  return rep;
}

}  // namespace dnls
