#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

/// i u_t + (1/2) Delta u = mu |u|^{p-1} u with initial data u0.
struct SemilinearProblem {
  int mu = 1;
  double p = 3.0;
  LatticeFunction u0{BoxSpec{1, 4}};

  void validate() const;
};

enum class TimeDirection { Forward, Backward };

namespace kernels {

// out = |u|^{p-1} u pointwise.
void power_nonlinearity(const Field& u, double p, Field& out);
// u <- u exp(-i mu |u|^{p-1} h), the exact flow of i u_t = mu |u|^{p-1} u over time h.
void nonlinear_phase(Field& u, int mu, double p, double h);
// out = (i/2) Delta u - i mu |u|^{p-1} u.
void semilinear_rhs(const BoxSpec& box, int mu, double p, const Field& u, Field& out, Field& scratch);

}  // namespace kernels

// Strang splitting. Backward runs the backward equation -i u_t + (1/2) Delta u = mu |u|^{p-1} u
// for the same duration, which retraces the forward flow.
Trajectory solve_semilinear_splitstep(const SemilinearProblem& prob, const TimeGrid& grid,
                                      const SolveOptions& opts = {},
                                      TimeDirection direction = TimeDirection::Forward);

// Classical four-stage Runge-Kutta on the site ODE system with the stencil Laplacian.
Trajectory solve_semilinear_rk4(const SemilinearProblem& prob, const TimeGrid& grid, const SolveOptions& opts = {});

struct PicardWindow {
  double t0 = 0.0;
  double t1 = 0.0;
  int iterations = 0;
  std::vector<double> differences;  // sup-t l2 distance between successive iterates
  std::vector<double> ratios;       // differences[n] / differences[n-1]
};

struct PicardOptions {
  double initial_window = 0.0;  // 0 uses the whole horizon
  int min_window_steps = 1;
  SolveOptions solve;
};

struct PicardResult {
  Trajectory trajectory;
  std::vector<PicardWindow> windows;
  int bisections = 0;
};

// Fixed point of the Duhamel formula with trapezoid quadrature in time. A window whose iteration
// does not reach `tol` within `max_iter` is halved and retried.
PicardResult solve_semilinear_picard(const SemilinearProblem& prob, const TimeGrid& grid, double tol, int max_iter,
                                     const PicardOptions& opts = {});

// i u_t + (1/2) Delta u = F(t) by Duhamel trapezoid quadrature; F holds steps + 1 samples.
Trajectory solve_linear_inhomogeneous(const LatticeFunction& u0, const std::vector<LatticeFunction>& F,
                                      const TimeGrid& grid, const SolveOptions& opts = {});

struct LinearEstimateReport {
  std::vector<double> times;
  std::vector<double> lhs;  // ||u(t)||_{l^{2,1}}
  std::vector<double> rhs;  // (1 + t)(||u0||_{l^{2,1}} + int_0^t ||F||_{l^{2,1}})
  double fitted_constant = 0.0;
};

LinearEstimateReport linear_estimate_constant(const Trajectory& traj, const std::vector<LatticeFunction>& F);

/// i u_t + g^{jk}(u, du) d_j d_k u = F(u, du). Axis indices passed to g are 0-based.
struct QuasilinearProblem {
  using Coefficient = std::function<double(int j, int k, cplx u, std::span<const cplx> du)>;
  using Nonlinearity = std::function<cplx(cplx u, std::span<const cplx> du)>;

  int d = 1;
  Coefficient g;
  Nonlinearity F;
  // sup |g^{jk}| over the unit ball, summed over (j,k), and a Lipschitz bound for F there.
  double g_bound = 0.5;
  double F_lipschitz = 0.0;
  bool diagonal = true;         // g^{jk} = 0 for j != k
  bool needs_gradient = false;  // whether g or F read du at all
  LatticeFunction u0{BoxSpec{1, 4}};

  // Validates shapes and F(0,0) = 0.
  static QuasilinearProblem make(int d, Coefficient g, Nonlinearity F, double g_bound, double F_lipschitz,
                                 bool diagonal, bool needs_gradient, LatticeFunction u0);
  QuasilinearProblem with_data(LatticeFunction data) const;
  void validate() const;
};

// Named problems over u0 with g^{jj} = 1/2 (the semilinear reduction):
//   "linear"      F = 0
//   "semilinear"  F = mu |u|^{p-1} u
//   "gain"        F = mu |u|^{p-1} u + i gamma u
QuasilinearProblem quasilinear_template(const std::string& name, int mu, double p, double gamma, LatticeFunction u0);

struct QuasilinearOptions {
  double window = 0.0;  // 0 solves the whole horizon as a single window
  double alarm_factor = 1e3;
  SolveOptions solve;
};

struct QuasilinearResult {
  Trajectory trajectory;
  std::vector<std::vector<double>> outer_differences;  // per window
  int max_outer_iterations = 0;
  double residual = 0.0;  // max step residual of the discretized equation for the returned iterate
  bool alarm = false;
  double alarm_time = 0.0;
  double completed_time = 0.0;
};

QuasilinearResult solve_quasilinear(const QuasilinearProblem& prob, const TimeGrid& grid, double tol, int max_outer,
                                    const QuasilinearOptions& opts = {});

struct HorizonRow {
  double epsilon = 0.0;
  double horizon = 0.0;
  bool reached_window_end = false;
  int outer_iterations = 0;
  std::string status = "ok";
};

struct HorizonTable {
  std::vector<HorizonRow> rows;
  double ceiling = 0.1;
  double window = 0.0;
  // Regressions H = a + K x for x = log(1/eps) and x = log log(1/eps).
  double slope_log = 0.0, intercept_log = 0.0;
  double slope_loglog = 0.0, intercept_loglog = 0.0;
  // min over the ladder of H / log(1/eps): the largest K with H >= K log(1/eps) everywhere.
  double certified_K_log = 0.0;
  double certified_K_loglog = 0.0;
  bool monotone = true;
};

struct HorizonOptions {
  double T = 10.0;
  double dt = 1e-2;
  double window = 1.0;
  double tol = 1e-10;
  int max_outer = 60;
  GuardPolicy guard;
};

// For each eps, solves from eps*u0 and reports the last time at which ||u(t)||_{l2} <= ceiling.
HorizonTable smalldata_horizon(const QuasilinearProblem& prob, const LatticeFunction& u0,
                               const std::vector<double>& eps_ladder, double ceiling = 0.1,
                               const HorizonOptions& opts = {});

}  // namespace dnls
