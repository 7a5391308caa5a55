#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/fft.hpp"
#include "dnls/scattering.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

ExponentPack ExponentPack::defaults(double p, int d) {
  ExponentPack e;
  e.q1 = e.r1 = e.q3 = e.r3 = e.q5 = e.r5 = p + 1.0;
  e.q2 = e.r2 = 2.0 * (d + 3.0) / d;
  e.q4 = e.r4 = (p + 1.0) / (p - 1.0);
  return e;
}

void WaveOperatorConfig::validate() const {
  u_plus.box().validate();
  const int d = u_plus.box().d;
  if (mu != 1 && mu != -1) throw DomainError("wave_operator: mu must be +1 or -1");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("wave_operator: p must exceed 1");
  if ((p - 1.0) * d < 6.0 - 1e-12)
    throw ParameterError("wave_operator: the construction requires 6 <= (p-1) d");
  if (!(T_split > 0.0) || !std::isfinite(T_split)) throw DomainError("wave_operator: T_split must be positive");
  if (T_max != 0.0 && !(T_max > T_split)) throw DomainError("wave_operator: T_max must exceed T_split");
  if (!(tol > 0.0)) throw DomainError("wave_operator: tol must be positive");
  if (!(picard_tol > 0.0)) throw DomainError("wave_operator: picard_tol must be positive");
  if (max_iter < 1) throw DomainError("wave_operator: max_iter must be positive");
  if (!(eps_target > 0.0)) throw DomainError("wave_operator: eps_target must be positive");
  if (!(T_split_cap >= T_split)) throw DomainError("wave_operator: T_split_cap must be at least T_split");
  for (double h : {node_dt, backward_dt, check_dt, residual_spacing})
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("wave_operator: step sizes must be positive");
}

namespace {

struct NodeNorms {
  double a = 0.0;  // l^{r1}
  double b = 0.0;  // l^{p r2'}
};

// (sum_k w_k x_k^q)^{1/q} with trapezoid weights on a uniform node set of spacing h.
double time_norm(const std::vector<double>& x, double q, double h) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double w = (k == 0 || k + 1 == x.size()) ? 0.5 * h : h;
    s += w * std::pow(x[k], q);
  }
  return std::pow(s, 1.0 / q);
}

struct S0Spec {
  double q1, r1, qb, rb;  // qb = p q2', rb = p r2'

  S0Spec(const ExponentPack& e, double p)
      : q1(e.q1), r1(e.r1), qb(p * e.q2 / (e.q2 - 1.0)), rb(p * e.r2 / (e.r2 - 1.0)) {}

  NodeNorms node(std::span<const cplx> v) const { return {lp_norm(v, r1), lp_norm(v, rb)}; }

  double norm(const std::vector<NodeNorms>& nodes, double h) const {
    std::vector<double> a(nodes.size()), b(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      a[k] = nodes[k].a;
      b[k] = nodes[k].b;
    }
    return time_norm(a, q1, h) + time_norm(b, qb, h);
  }
};

struct NodeGrid {
  double t0 = 0.0;
  double h = 0.0;
  long count = 0;  // intervals

  static NodeGrid make(double t0, double t1, double spacing) {
    NodeGrid g;
    g.t0 = t0;
    g.count = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / spacing - 1e-9)));
    g.h = (t1 - t0) / static_cast<double>(g.count);
    return g;
  }
  double time(long k) const { return t0 + static_cast<double>(k) * h; }
};

// exp(i t Delta/2) u_plus at time t from the raw spectrum of u_plus.
void free_at(const BoxSpec& box, const cplx* K, const Field& uhat, double t, Field& out) {
  out = uhat;
  kernels::rotate_spectrum(box, K, out.data(), -t);
  fft::backward(box, out.data());
  const double scale = 1.0 / static_cast<double>(box.sites());
  for (auto& x : out) x *= scale;
}

long steps_for(double T, double dt) { return std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9))); }

}  // namespace

WaveOperatorResult wave_operator(const WaveOperatorConfig& cfg) {
  cfg.validate();
  const BoxSpec box = cfg.u_plus.box();
  const std::size_t n = box.sites();
  const ExponentPack ex = cfg.exponents.value_or(ExponentPack::defaults(cfg.p, box.d));
  const S0Spec s0(ex, cfg.p);
  const double ratio_max = cfg.T_max > 0.0 ? cfg.T_max / cfg.T_split : 4.0;

  WaveOperatorResult res{make_zero(box), {}};
  ScatterReport& rep = res.report;

  if (cfg.u_plus.is_zero()) {
    rep.T_split = cfg.T_split;
    rep.T_max = ratio_max * cfg.T_split;
    rep.converged = true;
    rep.times = {0.0};
    rep.residual = {0.0};
    rep.cauchy = {{0.0}};
    return res;
  }

  auto K = MultiplierCache::instance().get(box, MultiplierCache::Op::K);
  Field uhat = cfg.u_plus.field();
  fft::forward(box, uhat.data());

  // Smallness window: grow T_split until the free S0 norm is below eps_target.
  double Ts = cfg.T_split;
  NodeGrid grid;
  std::vector<Field> u;
  double eps = 0.0;
  Field tmp(n);
  for (;;) {
    grid = NodeGrid::make(Ts, ratio_max * Ts, cfg.node_dt);
    std::vector<NodeNorms> norms(grid.count + 1);
    for (long k = 0; k <= grid.count; ++k) {
      free_at(box, K->data(), uhat, grid.time(k), tmp);
      norms[k] = s0.node(tmp);
      if (k == grid.count) enforce_guard(LatticeFunction(box, tmp), cfg.guard, "wave_operator free state at T_max");
    }
    eps = s0.norm(norms, grid.h);
    if (eps <= cfg.eps_target) break;
    if (!cfg.auto_tune || 2.0 * Ts > cfg.T_split_cap) {
      std::ostringstream os;
      os << "wave_operator: free S0 norm " << eps << " exceeds eps_target " << cfg.eps_target << " at T_split = " << Ts
         << (cfg.auto_tune ? " (growth cap reached)" : " (auto-tuning disabled)");
      throw DivergenceError(os.str());
    }
    Ts *= 2.0;
    ++rep.tune_doublings;
  }
  const double Tmax = ratio_max * Ts;
  rep.T_split = Ts;
  rep.T_max = Tmax;
  rep.eps_measured = eps;
  rep.pn_bound = 4.0 * eps;
  rep.iterate_s0.push_back(eps);  // u_0 is the free state since u_{-1} = 0

  u.assign(grid.count + 1, Field(n));
  for (long k = 0; k <= grid.count; ++k) free_at(box, K->data(), uhat, grid.time(k), u[k]);

  const cplx coef(0.0, static_cast<double>(cfg.mu));
  const double scale = 1.0 / static_cast<double>(n);
  const std::size_t nodes = static_cast<std::size_t>(grid.count) + 1;
  std::vector<double> integrand_l2(nodes, 0.0);
  Field g_cur(n), g_next(n), acc(n), w(n);
  std::vector<NodeNorms> new_norms(nodes), diff_norms(nodes);
  Field diff(n);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
    double sup_diff = 0.0;
    for (long k = grid.count; k >= 0; --k) {
      const double t = grid.time(k);
      kernels::power_nonlinearity(u[k], cfg.p, g_cur);
      integrand_l2[k] = l2_norm(std::span<const cplx>(g_cur));
      fft::forward(box, g_cur.data());
      kernels::rotate_spectrum(box, K->data(), g_cur.data(), t);
      if (k < grid.count)
        for (std::size_t i = 0; i < n; ++i) acc[i] += 0.5 * grid.h * (g_cur[i] + g_next[i]);
      std::swap(g_cur, g_next);
      for (std::size_t i = 0; i < n; ++i) w[i] = uhat[i] + coef * acc[i];
      kernels::rotate_spectrum(box, K->data(), w.data(), -t);
      fft::backward(box, w.data());
      for (std::size_t i = 0; i < n; ++i) {
        w[i] *= scale;
        diff[i] = w[i] - u[k][i];
      }
      if (!all_finite(w)) throw NumericalError("wave_operator: non-finite iterate");
      sup_diff = std::max(sup_diff, l2_norm(std::span<const cplx>(diff)));
      new_norms[k] = s0.node(w);
      diff_norms[k] = s0.node(diff);
      u[k].swap(w);
    }
    rep.iterations = it;
    rep.iterate_s0.push_back(s0.norm(new_norms, grid.h));
    rep.differences.push_back(s0.norm(diff_norms, grid.h));
    if (rep.differences.size() >= 2) {
      const double prev = rep.differences[rep.differences.size() - 2];
      rep.ratios.push_back(prev > 0.0 ? rep.differences.back() / prev : 0.0);
    }
    if (sup_diff < cfg.picard_tol) {
      rep.converged = true;
      break;
    }
  }
  for (double s : rep.iterate_s0)
    if (s > rep.pn_bound) rep.pn_holds = false;
  if (!rep.converged) {
    std::ostringstream os;
    os << "wave_operator: backward Picard iteration did not reach " << cfg.picard_tol << " within " << cfg.max_iter
       << " iterations on [" << Ts << ", " << Tmax << "]";
    throw DivergenceError(os.str());
  }

  // Tail of the Duhamel integral beyond T_max from a power-law fit on the late half of the nodes.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t k = nodes / 2; k < nodes; ++k) {
      if (!(integrand_l2[k] > 0.0)) continue;
      const double x = std::log(grid.time(static_cast<long>(k)));
      const double y = std::log(integrand_l2[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      m += 1;
    }
    if (m >= 2) {
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double A = std::exp((sy - slope * sx) / m);
      rep.tail_exponent = -slope;
      rep.tail_bound = rep.tail_exponent > 1.0
                           ? A * std::pow(Tmax, 1.0 - rep.tail_exponent) / (rep.tail_exponent - 1.0)
                           : std::numeric_limits<double>::infinity();
    } else {
      rep.tail_exponent = std::numeric_limits<double>::infinity();
      rep.tail_bound = 0.0;
    }
    rep.truncation_flag = !(rep.tail_bound <= cfg.tol);
  }

  const LatticeFunction u_split(box, u.front());
  u.clear();

  // Backward discrete equation from T_split down to 0.
  SolveOptions quiet;
  quiet.store = false;
  quiet.guard = cfg.guard;
  quiet.stride = 1 << 30;
  SemilinearProblem back{cfg.mu, cfg.p, u_split};
  const long nb = steps_for(Ts, cfg.backward_dt);
  {
    SolveOptions keep = quiet;
    keep.store = true;
    Trajectory tb = solve_semilinear_splitstep(back, TimeGrid::make(Ts, Ts / static_cast<double>(nb)), keep,
                                               TimeDirection::Backward);
    res.u0 = tb.back();
  }
  rep.mass_defect = std::abs(l2_norm(res.u0) - l2_norm(u_split));
  rep.data_gap = l2_norm(res.u0 - cfg.u_plus);

  // Independent forward check of r(t) with the RK4 site solver.
  const long nc = steps_for(Tmax, cfg.check_dt);
  const double dtc = Tmax / static_cast<double>(nc);
  SolveOptions fwd;
  fwd.guard = cfg.guard;
  fwd.stride = std::max(1, static_cast<int>(std::lround(cfg.residual_spacing / dtc)));
  const Trajectory tf = solve_semilinear_rk4(SemilinearProblem{cfg.mu, cfg.p, res.u0}, TimeGrid::make(Tmax, dtc), fwd);
  ScatterReport check = scattering_residual(tf, cfg.u_plus);
  rep.times = std::move(check.times);
  rep.residual = std::move(check.residual);
  rep.cauchy = std::move(check.cauchy);
  rep.residual_decreasing = check.residual_decreasing;
  return res;
}

}  // namespace dnls
