#include <algorithm>
#include <cmath>
#include <limits>

#include "dnls/errors.hpp"
#include "dnls/scattering.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

namespace {

// v(t) = exp(-i t Delta / 2) u(t) for every stored snapshot.
std::vector<Field> pulled_back(const Trajectory& traj) {
  std::vector<Field> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    Field v = traj.snapshots[k].field();
    kernels::apply_propagator(traj.snapshots[k].box(), v, -traj.times[k]);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> cauchy_matrix(const std::vector<Field>& v) {
  const std::size_t n = v.size();
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) D[i][j] = D[j][i] = l2_distance(v[i], v[j]);
  return D;
}

}  // namespace

ScatterReport scattering_residual(const Trajectory& traj, const LatticeFunction& u_plus) {
  if (traj.size() == 0) throw DomainError("scattering_residual: empty trajectory");
  if (!(traj.front().box() == u_plus.box())) throw DomainError("scattering_residual: u_plus box mismatch");
  ScatterReport rep;
  const std::vector<Field> v = pulled_back(traj);
  for (std::size_t k = 0; k < v.size(); ++k) {
    rep.times.push_back(traj.times[k]);
    rep.residual.push_back(l2_distance(v[k], u_plus.values()));
  }
  const double slack = 1e-3 * rep.residual.front() + 1e-14;
  for (std::size_t k = 1; k < rep.residual.size(); ++k)
    if (rep.residual[k] > rep.residual[k - 1] + slack) rep.residual_decreasing = false;
  rep.cauchy = cauchy_matrix(v);
  return rep;
}

AsymptoticState asymptotic_state(const Trajectory& traj, double threshold) {
  if (traj.size() == 0) throw DomainError("asymptotic_state: empty trajectory");
  AsymptoticState st;
  std::vector<Field> v = pulled_back(traj);
  st.mesh = traj.times;
  st.cauchy = cauchy_matrix(v);
  const std::size_t n = v.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  st.defect.assign(n, nan);
  st.floor = nan;
  for (std::size_t k = 1; k < n; ++k) {
    st.defect[k] = st.cauchy[k - 1][k];
    st.floor = std::isnan(st.floor) ? st.defect[k] : std::min(st.floor, st.defect[k]);
  }
  st.final_difference = n >= 2 ? st.cauchy[n - 2][n - 1] : nan;
  st.inconclusive = !(st.final_difference < threshold);
  st.candidate = LatticeFunction(traj.back().box(), std::move(v.back()));
  return st;
}

}  // namespace dnls
