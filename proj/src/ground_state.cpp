#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/fft.hpp"
#include "dnls/scattering.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

namespace {

// Site index of -m for the site with stored index i; the corner -M/2 maps to itself.
std::size_t reflected_index(const BoxSpec& box, std::size_t i) {
  std::array<int, 3> c{};
  box.coords(i, c);
  std::array<int, 3> r{};
  for (int j = 0; j < box.d; ++j) r[j] = c[j] == -box.half() ? c[j] : -c[j];
  return box.index_of(std::span<const int>(r.data(), static_cast<std::size_t>(box.d)));
}

void symmetrize(const std::vector<std::size_t>& mirror, Field& q) {
  Field out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = cplx(0.5 * (std::abs(q[i].real()) + std::abs(q[mirror[i]].real())), 0.0);
  q.swap(out);
}

double residual_of(const BoxSpec& box, const Field& q, double omega, double p, int mu) {
  Field lap(q.size());
  kernels::laplacian_stencil(box, q.data(), lap.data());
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a = std::abs(q[i]);
    const cplx r = -lap[i] + 2.0 * omega * q[i] + 2.0 * mu * std::pow(a, p - 1.0) * q[i];
    s += std::norm(r);
  }
  return std::sqrt(s);
}

}  // namespace

double ground_state_residual(const LatticeFunction& Q, double omega, double p, int mu) {
  return residual_of(Q.box(), Q.field(), omega, p, mu);
}

GroundState ground_state(double p, int d, double omega, const BoxSpec& box, double tol, int mu, int max_iter) {
  box.validate();
  if (box.d != d) throw DomainError("ground_state: box dimension does not match d");
  if (mu != -1) throw ParameterError("ground_state: a positive ground state exists only in the focusing case mu = -1");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ParameterError("ground_state: omega_s must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("ground_state: p must exceed 1");
  if (!(tol > 0.0)) throw DomainError("ground_state: tol must be positive");

  const std::size_t n = box.sites();
  auto K = MultiplierCache::instance().get(box, MultiplierCache::Op::K);
  Field inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = cplx(1.0 / (K->at(i).real() + 2.0 * omega), 0.0);

  std::vector<std::size_t> mirror(n);
  for (std::size_t i = 0; i < n; ++i) mirror[i] = reflected_index(box, i);

  // Start from the continuum profile scale: amplitude omega^{1/(p-1)}, width 1/sqrt(2 omega).
  const double amp = std::pow(omega, 1.0 / (p - 1.0));
  const double width = std::max(1.0, 1.0 / std::sqrt(2.0 * omega));
  Field q = make_gaussian(box, width, cplx(amp, 0.0)).field();
  symmetrize(mirror, q);

  const double theta = p / (p - 1.0);
  Field Lq(n), Nq(n);
  GroundState gs;
  gs.omega = omega;
  gs.p = p;
  gs.mu = mu;
  double res = residual_of(box, q, omega, p, mu);
  double best = res;
  int stall = 0;
  int it = 0;
  for (; it < max_iter && res >= 0.01 * tol; ++it) {
    Lq = q;
    Field lap(n);
    kernels::laplacian_stencil(box, q.data(), lap.data());
    double lqq = 0.0, nqq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double qi = q[i].real();
      Lq[i] = -lap[i] + 2.0 * omega * q[i];
      Nq[i] = 2.0 * std::pow(std::abs(qi), p - 1.0) * q[i];
      lqq += Lq[i].real() * qi;
      nqq += Nq[i].real() * qi;
    }
    if (!(nqq > 0.0) || !std::isfinite(lqq / nqq)) break;
    const double factor = std::pow(lqq / nqq, theta);
    fft::apply_symbol(box, Nq.data(), inv.data());
    for (std::size_t i = 0; i < n; ++i) q[i] = factor * Nq[i];
    symmetrize(mirror, q);
    res = residual_of(box, q, omega, p, mu);
    if (!std::isfinite(res)) break;
    if (res < best * 0.999) {
      best = res;
      stall = 0;
    } else if (++stall > 200) {
      break;
    }
  }

  if (!(res < tol) || l2_norm(std::span<const cplx>(q)) < 1e-8) {
    std::ostringstream os;
    os << "ground_state: Petviashvili iteration did not converge (residual " << res << " after " << it
       << " iterations); try a smaller omega_s or a larger box";
    throw ParameterError(os.str());
  }
  gs.Q = LatticeFunction(box, std::move(q));
  gs.residual = res;
  gs.iterations = it;
  return gs;
}

SolitonReport soliton_check(const GroundState& gs, const TimeGrid& grid, const std::optional<LatticeFunction>& datum,
                            int stride) {
  if (stride < 1) throw DomainError("soliton_check: stride must be positive");
  const LatticeFunction& Q = gs.Q;
  const LatticeFunction u0 = datum ? *datum : Q;
  if (!(u0.box() == Q.box())) throw DomainError("soliton_check: datum box does not match the ground state");

  SemilinearProblem prob{gs.mu, gs.p, u0};
  SolveOptions opts;
  opts.stride = stride;
  opts.guard = GuardPolicy::off();
  const Trajectory traj = solve_semilinear_rk4(prob, grid, opts);

  SolitonReport rep;
  const std::size_t n = Q.size();
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(Q[i]) > std::abs(Q[peak])) peak = i;
  rep.peak_index = peak;

  std::vector<double> phase;
  double prev = 0.0, offset = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const LatticeFunction& u = traj.snapshots[k];
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(std::abs(u[i]) - std::abs(u0[i])));
    rep.times.push_back(traj.times[k]);
    rep.amplitude_deviation.push_back(dev);
    rep.max_amplitude_deviation = std::max(rep.max_amplitude_deviation, dev);
    const double a = std::arg(u[peak]);
    if (k > 0) {
      double jump = a - prev;
      while (jump > std::numbers::pi) jump -= 2.0 * std::numbers::pi;
      while (jump < -std::numbers::pi) jump += 2.0 * std::numbers::pi;
      offset += jump;
    } else {
      offset = a;
    }
    prev = a;
    phase.push_back(offset);
  }

  const bool trivial = u0.is_zero();
  if (!trivial && rep.times.size() >= 2) {
    double st = 0, sp = 0, stt = 0, stp = 0;
    const double m = static_cast<double>(rep.times.size());
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      st += rep.times[k];
      sp += phase[k];
      stt += rep.times[k] * rep.times[k];
      stp += rep.times[k] * phase[k];
    }
    rep.phase_rate = (m * stp - st * sp) / (m * stt - st * st);
    rep.phase_rate_error = std::abs(rep.phase_rate - gs.omega);
  }
  rep.stationary = trivial || (rep.max_amplitude_deviation < 1e-6 && rep.phase_rate_error < 1e-4);
  rep.scattering = asymptotic_state(traj);
  return rep;
}

SolitonExperiment soliton_experiment(double p, int d, double omega, const BoxSpec& box, int mu, double tol,
                                     const TimeGrid& grid, int stride, double scale) {
  SolitonExperiment out;
  out.ground = ground_state(p, d, omega, box, tol, mu);
  std::optional<LatticeFunction> datum;
  if (scale != 1.0) datum = out.ground.Q * cplx(scale, 0.0);
  out.report = soliton_check(out.ground, grid, datum, stride);
  return out;
}

}  // namespace dnls
