#include <cmath>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/fft.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

QuasilinearProblem QuasilinearProblem::make(int d, Coefficient g, Nonlinearity F, double g_bound, double F_lipschitz,
                                            bool diagonal, bool needs_gradient, LatticeFunction u0) {
  QuasilinearProblem q;
  q.d = d;
  q.g = std::move(g);
  q.F = std::move(F);
  q.g_bound = g_bound;
  q.F_lipschitz = F_lipschitz;
  q.diagonal = diagonal;
  q.needs_gradient = needs_gradient;
  q.u0 = std::move(u0);
  q.validate();
  return q;
}

QuasilinearProblem quasilinear_template(const std::string& name, int mu, double p, double gamma, LatticeFunction u0) {
  if (mu != 1 && mu != -1) throw DomainError("quasilinear_template: mu must be +1 or -1");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("quasilinear_template: p must be at least 1");
  const int d = u0.box().d;
  auto g = [](int j, int k, cplx, std::span<const cplx>) { return j == k ? 0.5 : 0.0; };
  const double g_bound = 0.5 * d;
  if (name == "linear")
    return QuasilinearProblem::make(d, g, [](cplx, std::span<const cplx>) { return cplx(0.0, 0.0); }, g_bound, 0.0, true,
                                    false, std::move(u0));
  const double m = static_cast<double>(mu);
  if (name == "semilinear")
    return QuasilinearProblem::make(
        d, g, [m, p](cplx u, std::span<const cplx>) { return m * std::pow(std::abs(u), p - 1.0) * u; }, g_bound, p,
        true, false, std::move(u0));
  if (name == "gain") {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("quasilinear_template: gamma must be nonnegative");
    return QuasilinearProblem::make(
        d, g,
        [m, p, gamma](cplx u, std::span<const cplx>) {
          return m * std::pow(std::abs(u), p - 1.0) * u + cplx(0.0, gamma) * u;
        },
        g_bound, p + gamma, true, false, std::move(u0));
  }
  throw DomainError("quasilinear_template: unknown template '" + name + "' (linear, semilinear, gain)");
}

QuasilinearProblem QuasilinearProblem::with_data(LatticeFunction data) const {
  QuasilinearProblem q = *this;
  q.u0 = std::move(data);
  q.validate();
  return q;
}

void QuasilinearProblem::validate() const {
  if (!g || !F) throw DomainError("quasilinear problem needs both g and F");
  if (u0.box().d != d) throw DomainError("initial data dimension does not match the problem");
  if (!(g_bound >= 0.0) || !(F_lipschitz >= 0.0)) throw DomainError("declared bounds must be nonnegative");
  std::vector<cplx> zero(d, cplx(0.0, 0.0));
  cplx f0 = F(cplx(0.0, 0.0), zero);
  if (f0 != cplx(0.0, 0.0)) throw DomainError("nonlinearity must satisfy F(0,0) = 0");
}

namespace {

struct Pair {
  int j, k;
};

struct Coefficients {
  std::vector<std::vector<double>> G;  // one field per axis pair
  Field Fv;
};

class FrozenOperator {
 public:
  FrozenOperator(const QuasilinearProblem& prob, const BoxSpec& box) : prob_(prob), box_(box), n_(box.sites()) {
    for (int j = 0; j < prob.d; ++j)
      for (int k = 0; k < prob.d; ++k)
        if (!prob.diagonal || j == k) pairs_.push_back({j, k});
    auto& cache = MultiplierCache::instance();
    for (const auto& pr : pairs_) {
      auto Pj = cache.get(box, MultiplierCache::Op::Partial, pr.j + 1);
      auto Pk = cache.get(box, MultiplierCache::Op::Partial, pr.k + 1);
      Field s(n_);
      for (std::size_t i = 0; i < n_; ++i) s[i] = (*Pj)[i] * (*Pk)[i];
      symbols_.push_back(std::move(s));
    }
    spec_.resize(n_);
    work_.resize(n_);
    grad_.assign(prob.d, Field(n_));
  }

  Coefficients coefficients(const Field& ubar) {
    Coefficients c;
    c.G.assign(pairs_.size(), std::vector<double>(n_));
    c.Fv.resize(n_);
    if (prob_.needs_gradient)
      for (int j = 0; j < prob_.d; ++j) kernels::partial(box_, ubar.data(), grad_[j].data(), j);
    std::vector<cplx> du(prob_.d, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n_; ++i) {
      if (prob_.needs_gradient)
        for (int j = 0; j < prob_.d; ++j) du[j] = grad_[j][i];
      for (std::size_t p = 0; p < pairs_.size(); ++p) c.G[p][i] = prob_.g(pairs_[p].j, pairs_[p].k, ubar[i], du);
      c.Fv[i] = prob_.F(ubar[i], du);
    }
    return c;
  }

  // out = i sum_{jk} G_jk d_j d_k u - i F
  void rhs(const Field& u, const Coefficients& c, Field& out) {
    out.assign(n_, cplx(0.0, 0.0));
    spec_ = u;
    fft::forward(box_, spec_.data());
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      for (std::size_t i = 0; i < n_; ++i) work_[i] = spec_[i] * symbols_[p][i] * scale;
      fft::backward(box_, work_.data());
      for (std::size_t i = 0; i < n_; ++i) out[i] += c.G[p][i] * work_[i];
    }
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < n_; ++i) out[i] = I * (out[i] - c.Fv[i]);
  }

 private:
  const QuasilinearProblem& prob_;
  BoxSpec box_;
  std::size_t n_;
  std::vector<Pair> pairs_;
  std::vector<Field> symbols_;
  Field spec_, work_;
  std::vector<Field> grad_;
};

struct Iterate {
  std::vector<Field> u;
  std::vector<Field> f;  // time derivative at each node
};

}  // namespace

QuasilinearResult solve_quasilinear(const QuasilinearProblem& prob, const TimeGrid& grid, double tol, int max_outer,
                                    const QuasilinearOptions& opts) {
  prob.validate();
  if (!(tol > 0.0)) throw DomainError("outer tolerance must be positive");
  if (max_outer < 1) throw DomainError("outer iteration cap must be at least 1");
  const double stab = grid.dt * (4.0 * prob.g_bound + prob.F_lipschitz);
  if (stab > 0.5) {
    std::ostringstream msg;
    msg << "time step violates the explicit stability bound: dt (4 sum sup|g| + sup|grad F|) = " << stab
        << " > 0.5";
    throw DomainError(msg.str());
  }
  const BoxSpec& box = prob.u0.box();

  const std::size_t n = box.sites();
  const double h = grid.dt;
  FrozenOperator op(prob, box);
  TrajectoryRecorder rec(grid, box, opts.solve, "quasilinear");
  QuasilinearResult result;
  const double sup0 = sup_norm(prob.u0.values());
  const double ceiling = opts.alarm_factor * sup0;

  long window = grid.steps;
  if (opts.window > 0.0) window = std::max<long>(1, std::min<long>(grid.steps, std::lround(opts.window / h)));

  Field ustart = prob.u0.field();
  rec.record(0, ustart);
  Field k1(n), k2(n), k3(n), k4(n), tmp(n), mid(n);
  long start = 0;
  while (start < grid.steps) {
    const long L = std::min(window, grid.steps - start);
    Iterate prev{std::vector<Field>(L + 1, Field(n, cplx(0.0, 0.0))), std::vector<Field>(L + 1, Field(n, cplx(0.0, 0.0)))};
    Iterate cur{std::vector<Field>(L + 1, Field(n)), std::vector<Field>(L + 1, Field(n))};
    std::vector<double> diffs;
    bool converged = false;
    for (int it = 0; it < max_outer && !converged; ++it) {
      Field u = ustart;
      Coefficients c0 = op.coefficients(prev.u[0]);
      double diff = 0.0;
      for (long k = 0; k < L; ++k) {
        for (std::size_t i = 0; i < n; ++i)
          mid[i] = 0.5 * (prev.u[k][i] + prev.u[k + 1][i]) + (h / 8.0) * (prev.f[k][i] - prev.f[k + 1][i]);
        Coefficients cm = op.coefficients(mid);
        Coefficients c1 = op.coefficients(prev.u[k + 1]);
        op.rhs(u, c0, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        op.rhs(tmp, cm, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        op.rhs(tmp, cm, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        op.rhs(tmp, c1, k4);
        cur.u[k] = u;
        cur.f[k] = k1;
        diff = std::max(diff, l2_distance(u, prev.u[k]));
        for (std::size_t i = 0; i < n; ++i) u[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        double s = sup_norm(u);
        if (!std::isfinite(s)) throw NumericalError("quasilinear iterate became non-finite");
        if (sup0 > 0.0 && s > ceiling) {
          result.alarm = true;
          result.alarm_time = grid.time(start + k + 1);
          result.trajectory = std::move(rec).finish();
          result.completed_time = grid.time(start);
          return result;
        }
        c0 = std::move(c1);
      }
      cur.u[L] = u;
      op.rhs(u, c0, cur.f[L]);
      diff = std::max(diff, l2_distance(u, prev.u[L]));
      diffs.push_back(diff);
      std::swap(prev, cur);
      if (diff < tol) converged = true;
    }
    result.max_outer_iterations = std::max(result.max_outer_iterations, static_cast<int>(diffs.size()));
    result.outer_differences.push_back(diffs);
    if (!converged) {
      std::ostringstream msg;
      msg << "outer iteration did not converge on [" << grid.time(start) << ", " << grid.time(start + L)
          << "] within " << max_outer << " iterations; last difference " << diffs.back();
      throw DivergenceError(msg.str());
    }

    // Discrete residual of the equation at step midpoints, with coefficients from the iterate itself.
    for (long k = 0; k < L; ++k) {
      for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (prev.u[k][i] + prev.u[k + 1][i]);
      Coefficients cm = op.coefficients(mid);
      op.rhs(mid, cm, tmp);
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) r += std::norm((prev.u[k + 1][i] - prev.u[k][i]) / h - tmp[i]);
      result.residual = std::max(result.residual, std::sqrt(r));
    }

    for (long k = 1; k <= L; ++k) rec.record(start + k, prev.u[k]);
    ustart = prev.u[L];
    start += L;
  }
  result.completed_time = grid.T;
  result.trajectory = std::move(rec).finish();
  return result;
}

}  // namespace dnls
