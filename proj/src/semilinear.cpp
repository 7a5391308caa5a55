#include <cmath>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/fft.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

void SemilinearProblem::validate() const {
  if (mu != 1 && mu != -1) throw DomainError("mu must be +1 or -1");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("nonlinearity power must exceed 1");
}

namespace kernels {

namespace {

// |z|^{p-1} using integer powers of |z|^2 when (p-1)/2 is a whole number.
inline double modulus_power(cplx z, double p) {
  double a2 = std::norm(z);
  double half = 0.5 * (p - 1.0);
  double r = std::round(half);
  if (std::abs(half - r) < 1e-15 && r >= 0) {
    double out = 1.0;
    for (int i = 0; i < static_cast<int>(r); ++i) out *= a2;
    return out;
  }
  return a2 == 0.0 ? 0.0 : std::pow(a2, half);
}

}  // namespace

void power_nonlinearity(const Field& u, double p, Field& out) {
  out.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = modulus_power(u[i], p) * u[i];
}

void nonlinear_phase(Field& u, int mu, double p, double h) {
  for (auto& z : u) z *= std::polar(1.0, -mu * modulus_power(z, p) * h);
}

void semilinear_rhs(const BoxSpec& box, int mu, double p, const Field& u, Field& out, Field& scratch) {
  out.resize(u.size());
  scratch.resize(u.size());
  laplacian_stencil(box, u.data(), scratch.data());
  const cplx half_i(0.0, 0.5), mu_i(0.0, static_cast<double>(mu));
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = half_i * scratch[i] - mu_i * modulus_power(u[i], p) * u[i];
}

}  // namespace kernels

Trajectory solve_semilinear_splitstep(const SemilinearProblem& prob, const TimeGrid& grid, const SolveOptions& opts,
                                      TimeDirection direction) {
  prob.validate();
  const BoxSpec& box = prob.u0.box();
  TrajectoryRecorder rec(grid, box, opts, "split-step");
  const double h = direction == TimeDirection::Forward ? grid.dt : -grid.dt;
  auto E = MultiplierCache::instance().get(box, MultiplierCache::Op::Propagator, 0, h);
  Field u = prob.u0.field();
  rec.record(0, u);
  for (long n = 1; n <= grid.steps; ++n) {
    kernels::nonlinear_phase(u, prob.mu, prob.p, 0.5 * h);
    fft::apply_symbol(box, u.data(), E->data());
    kernels::nonlinear_phase(u, prob.mu, prob.p, 0.5 * h);
    rec.record(n, u);
  }
  return std::move(rec).finish();
}

Trajectory solve_semilinear_rk4(const SemilinearProblem& prob, const TimeGrid& grid, const SolveOptions& opts) {
  prob.validate();
  const BoxSpec& box = prob.u0.box();
  TrajectoryRecorder rec(grid, box, opts, "rk4");
  const std::size_t n = box.sites();
  Field u = prob.u0.field(), k1(n), k2(n), k3(n), k4(n), tmp(n), scratch(n);
  const double h = grid.dt;
  rec.record(0, u);
  for (long s = 1; s <= grid.steps; ++s) {
    kernels::semilinear_rhs(box, prob.mu, prob.p, u, k1, scratch);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    kernels::semilinear_rhs(box, prob.mu, prob.p, tmp, k2, scratch);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    kernels::semilinear_rhs(box, prob.mu, prob.p, tmp, k3, scratch);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
    kernels::semilinear_rhs(box, prob.mu, prob.p, tmp, k4, scratch);
    for (std::size_t i = 0; i < n; ++i) u[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    rec.record(s, u);
  }
  return std::move(rec).finish();
}

namespace {

struct WindowOutcome {
  bool converged = false;
  std::vector<Field> nodes;
  PicardWindow record;
};

// Duhamel iteration on one window in the interaction picture: with hat denoting the stored-order
// DFT, w_k = hat(u_a) - i mu sum_j c_j exp(i (t_j - a) K / 2) hat(N(u(t_j))) and
// u(t_k) = IDFT(exp(-i (t_k - a) K / 2) w_k).
WindowOutcome picard_window(const SemilinearProblem& prob, const Field& ua, double a, long nsteps, double dt,
                            double tol, int max_iter) {
  const BoxSpec& box = prob.u0.box();
  const std::size_t n = box.sites();
  const double scale = 1.0 / static_cast<double>(n);
  auto K = MultiplierCache::instance().get(box, MultiplierCache::Op::K);
  Field ua_hat = ua;
  fft::forward(box, ua_hat.data());

  WindowOutcome out;
  out.record.t0 = a;
  out.record.t1 = a + nsteps * dt;
  std::vector<Field> prev(nsteps + 1, Field(n, cplx(0.0, 0.0)));
  std::vector<Field> next(nsteps + 1, Field(n));
  Field g_prev(n), g_cur(n), acc(n), w(n);
  const cplx coef(0.0, -static_cast<double>(prob.mu));

  for (int it = 0; it < max_iter; ++it) {
    double diff = 0.0;
    std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
    for (long k = 0; k <= nsteps; ++k) {
      const double s = k * dt;
      kernels::power_nonlinearity(prev[k], prob.p, g_cur);
      fft::forward(box, g_cur.data());
      kernels::rotate_spectrum(box, K->data(), g_cur.data(), s);
      if (k > 0)
        for (std::size_t i = 0; i < n; ++i) acc[i] += 0.5 * dt * (g_prev[i] + g_cur[i]);
      std::swap(g_prev, g_cur);
      for (std::size_t i = 0; i < n; ++i) w[i] = ua_hat[i] + coef * acc[i];
      kernels::rotate_spectrum(box, K->data(), w.data(), -s);
      fft::backward(box, w.data());
      Field& dst = next[k];
      for (std::size_t i = 0; i < n; ++i) dst[i] = w[i] * scale;
      diff = std::max(diff, l2_distance(dst, prev[k]));
    }
    std::swap(prev, next);
    out.record.differences.push_back(diff);
    if (it > 0) {
      double before = out.record.differences[it - 1];
      out.record.ratios.push_back(before > 0.0 ? diff / before : 0.0);
    }
    out.record.iterations = it + 1;
    if (!std::isfinite(diff)) break;
    if (diff < tol) {
      out.converged = true;
      out.nodes = std::move(prev);
      return out;
    }
  }
  return out;
}

}  // namespace

PicardResult solve_semilinear_picard(const SemilinearProblem& prob, const TimeGrid& grid, double tol, int max_iter,
                                     const PicardOptions& opts) {
  prob.validate();
  if (!(tol > 0.0)) throw DomainError("Picard tolerance must be positive");
  if (max_iter < 1) throw DomainError("Picard iteration cap must be at least 1");
  const BoxSpec& box = prob.u0.box();
  TrajectoryRecorder rec(grid, box, opts.solve, "Picard");
  PicardResult result;

  long window = grid.steps;
  if (opts.initial_window > 0.0)
    window = std::max<long>(1, std::min<long>(grid.steps, std::lround(opts.initial_window / grid.dt)));
  Field ua = prob.u0.field();
  rec.record(0, ua);
  long start = 0;
  while (start < grid.steps) {
    long len = std::min(window, grid.steps - start);
    WindowOutcome w = picard_window(prob, ua, grid.time(start), len, grid.dt, tol, max_iter);
    if (!w.converged) {
      if (len / 2 < std::max(1, opts.min_window_steps)) {
        std::ostringstream msg;
        msg << "Picard iteration failed to contract on the minimal window [" << w.record.t0 << ", " << w.record.t1
            << "]; last differences:";
        for (double d : w.record.differences) msg << ' ' << d;
        throw DivergenceError(msg.str());
      }
      window = len / 2;
      ++result.bisections;
      continue;
    }
    for (long k = 1; k <= len; ++k) rec.record(start + k, w.nodes[k]);
    ua = w.nodes[len];
    result.windows.push_back(std::move(w.record));
    start += len;
  }
  result.trajectory = std::move(rec).finish();
  return result;
}

}  // namespace dnls
