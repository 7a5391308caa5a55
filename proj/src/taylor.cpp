#include <cmath>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/frechet.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

namespace {

Trajectory scaled(const Trajectory& t, double c) {
  Trajectory out = t;
  for (auto& s : out.snapshots) s = s * cplx(c, 0.0);
  for (auto& v : out.step_sup) v *= std::abs(c);
  for (auto& v : out.step_l2) v *= std::abs(c);
  return out;
}

std::vector<Trajectory> cascade(int mu, const LatticeFunction& u0, double lambda, int n_max, const TimeGrid& grid,
                                const SolveOptions& opts) {
  const BoxSpec& box = u0.box();
  const std::size_t n = box.sites();
  const int L = n_max + 1;
  std::vector<Field> X(L, Field(n, cplx(0.0, 0.0)));
  X[0] = (u0 * cplx(lambda, 0.0)).field();
  if (n_max >= 1) X[1] = u0.field();

  const cplx half_i(0.0, 0.5), mu_i(0.0, static_cast<double>(mu));
  Field lap(n);
  auto rhs = [&](const std::vector<Field>& S, std::vector<Field>& out) {
    for (int m = 0; m < L; ++m) {
      kernels::laplacian_stencil(box, S[m].data(), lap.data());
      for (std::size_t i = 0; i < n; ++i) {
        cplx acc(0.0, 0.0);
        for (int a = 0; a <= m; ++a)
          for (int b = 0; a + b <= m; ++b) acc += S[a][i] * S[b][i] * std::conj(S[m - a - b][i]);
        out[m][i] = half_i * lap[i] - mu_i * acc;
      }
    }
  };

  std::vector<TrajectoryRecorder> recs;
  for (int m = 0; m < L; ++m) recs.emplace_back(grid, box, opts, "cascade order " + std::to_string(m));
  for (int m = 0; m < L; ++m) recs[m].record(0, X[m]);
  std::vector<Field> k1(L, Field(n)), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
  const double h = grid.dt;
  for (long s = 1; s <= grid.steps; ++s) {
    rhs(X, k1);
    for (int m = 0; m < L; ++m)
      for (std::size_t i = 0; i < n; ++i) tmp[m][i] = X[m][i] + 0.5 * h * k1[m][i];
    rhs(tmp, k2);
    for (int m = 0; m < L; ++m)
      for (std::size_t i = 0; i < n; ++i) tmp[m][i] = X[m][i] + 0.5 * h * k2[m][i];
    rhs(tmp, k3);
    for (int m = 0; m < L; ++m)
      for (std::size_t i = 0; i < n; ++i) tmp[m][i] = X[m][i] + h * k3[m][i];
    rhs(tmp, k4);
    for (int m = 0; m < L; ++m)
      for (std::size_t i = 0; i < n; ++i)
        X[m][i] += (h / 6.0) * (k1[m][i] + 2.0 * k2[m][i] + 2.0 * k3[m][i] + k4[m][i]);
    for (int m = 0; m < L; ++m) recs[m].record(s, X[m]);
  }
  std::vector<Trajectory> out;
  for (auto& r : recs) out.push_back(std::move(r).finish());
  return out;
}

}  // namespace

std::vector<Trajectory> taylor_expand(int mu, int p, const LatticeFunction& u0, double lambda, int n_max,
                                      const TimeGrid& grid, TaylorRoute route, const SolveOptions& opts) {
  if (n_max < 0 || n_max > kMaxFrechetOrder)
    throw DomainError("Taylor order must lie in 0.." + std::to_string(kMaxFrechetOrder));
  if (!std::isfinite(lambda)) throw DomainError("expansion point must be finite");
  if (mu != 1 && mu != -1) throw DomainError("mu must be +1 or -1");
  if (p < 3 || p % 2 == 0) throw DomainError("Taylor expansion requires an odd integer p >= 3");
  SolveOptions o = opts;
  o.store = true;
  o.sink = nullptr;
  if (route == TaylorRoute::Cascade) {
    if (p != 3) throw DomainError("the cascade route is available for p = 3 only");
    return cascade(mu, u0, lambda, n_max, grid, o);
  }
  FrechetEngine engine(mu, p, u0 * cplx(lambda, 0.0), grid, o);
  std::vector<Trajectory> out;
  out.push_back(engine.base());
  if (n_max == 0) return out;
  std::vector<LatticeFunction> args(n_max, u0);
  engine.psi(args);
  double factorial = 1.0;
  for (int k = 1; k <= n_max; ++k) {
    factorial *= k;
    auto psi = engine.psi(std::vector<LatticeFunction>(k, u0));
    out.push_back(scaled(*psi, 1.0 / factorial));
  }
  return out;
}

TaylorCheckReport taylor_check(int mu, int p, const LatticeFunction& u0, double lambda, int n_terms,
                               const std::vector<double>& eps, const TimeGrid& grid, const SolveOptions& opts) {
  if (eps.empty()) throw DomainError("Taylor check needs at least one increment");
  auto coeffs = taylor_expand(mu, p, u0, lambda, n_terms, grid, TaylorRoute::Frechet, opts);
  TaylorCheckReport rep;
  rep.eps = eps;
  for (double e : eps) {
    auto direct = solve_semilinear_rk4(SemilinearProblem{mu, static_cast<double>(p), u0 * cplx(lambda + e, 0.0)},
                                       grid, opts);
    double worst = 0.0;
    for (std::size_t t = 0; t < direct.size(); ++t) {
      Field r = direct.snapshots[t].field();
      double w = 1.0;
      for (int k = 0; k <= n_terms; ++k) {
        const auto& c = coeffs[k].snapshots[t].values();
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= w * c[i];
        w *= e;
      }
      worst = std::max(worst, l2_norm(std::span<const cplx>(r)));
    }
    rep.errors.push_back(worst);
  }
  for (std::size_t i = 1; i < rep.errors.size(); ++i) rep.shrink.push_back(rep.errors[i - 1] / rep.errors[i]);
  if (p == 3) {
    auto other = taylor_expand(mu, p, u0, lambda, n_terms, grid, TaylorRoute::Cascade, opts);
    for (int k = 0; k <= n_terms; ++k) {
      double d = sup_l2_distance(coeffs[k], other[k]);
      rep.route_difference.push_back(d);
      rep.max_route_difference = std::max(rep.max_route_difference, d);
    }
  }
  return rep;
}

}  // namespace dnls
