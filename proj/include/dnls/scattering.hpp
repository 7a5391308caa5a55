#pragma once

#include <optional>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

// Space-time exponents of the wave-operator argument. Defaults: q1=r1=q3=r3=q5=r5=p+1,
// q2=r2=2(d+3)/d, q4=r4=(p+1)/(p-1).
struct ExponentPack {
  double q1 = 4, r1 = 4, q2 = 4, r2 = 4, q3 = 4, r3 = 4, q4 = 2, r4 = 2, q5 = 4, r5 = 4;
  static ExponentPack defaults(double p, int d);
};

struct WaveOperatorConfig {
  LatticeFunction u_plus{BoxSpec{3, 4}};
  int mu = 1;
  double p = 3.0;
  double T_split = 1.0;  // starting value; doubled while the free S0 norm exceeds eps_target
  double T_max = 0.0;    // 0 selects 4 T_split
  double tol = 1e-4;            // bound for the discarded tail and the final residual
  double picard_tol = 1e-13;    // Picard stopping threshold on the sup-t l2 difference
  int max_iter = 50;
  double eps_target = 1e-2;
  bool auto_tune = true;
  double T_split_cap = 1024.0;
  double node_dt = 0.1;       // Duhamel quadrature spacing
  double backward_dt = 1e-2;  // split-step step from T_split back to 0
  double check_dt = 2e-2;     // RK4 step of the forward residual check
  double residual_spacing = 1.0;
  GuardPolicy guard;
  std::optional<ExponentPack> exponents;

  void validate() const;
};

struct ScatterReport {
  // r(t) = ||exp(-i t Delta/2) u(t) - u_plus||_{l2} on sampled times. Increases smaller than
  // 1e-3 r(0) + 1e-14 count as rounding.
  std::vector<double> times;
  std::vector<double> residual;
  bool residual_decreasing = true;

  // Cauchy differences ||v(t_i) - v(t_j)|| of v(t) = exp(-i t Delta/2) u(t) on the sample mesh
  std::vector<std::vector<double>> cauchy;

  // Backward Picard history
  double T_split = 0.0;
  double T_max = 0.0;
  double eps_measured = 0.0;  // ||exp(i t Delta/2) u_plus||_{S0[T_split, T_max]}
  int tune_doublings = 0;
  std::vector<double> iterate_s0;   // ||u_n||_{S0}, n = 0, 1, ...
  std::vector<double> differences;  // S0 norm of u_{n+1} - u_n
  std::vector<double> ratios;       // differences[n] / differences[n-1]
  double pn_bound = 0.0;            // 4 eps_measured
  bool pn_holds = true;
  bool converged = false;
  int iterations = 0;

  // Integrand decay |N(u(t))|_{l2} ~ A t^{-beta} on the late nodes, and the implied bound on the
  // discarded [T_max, inf) part of the Duhamel integral.
  double tail_exponent = 0.0;
  double tail_bound = 0.0;
  bool truncation_flag = false;

  double mass_defect = 0.0;  // | ||u0|| - ||u(T_split)|| |
  double data_gap = 0.0;     // ||u0 - u_plus||
};

struct WaveOperatorResult {
  LatticeFunction u0{BoxSpec{3, 4}};
  ScatterReport report;
};

WaveOperatorResult wave_operator(const WaveOperatorConfig& cfg);

// Residual series of a trajectory against a proposed asymptotic state.
ScatterReport scattering_residual(const Trajectory& traj, const LatticeFunction& u_plus);

struct AsymptoticState {
  LatticeFunction candidate{BoxSpec{1, 4}};  // exp(-i T Delta/2) u(T) at the last snapshot
  std::vector<double> mesh;
  std::vector<std::vector<double>> cauchy;
  // defect[k] = ||v(mesh[k]) - v(mesh[k-1])||; defect[0] is NaN.
  std::vector<double> defect;
  double final_difference = 0.0;  // between the two largest mesh times
  double floor = 0.0;             // smallest defined defect
  bool inconclusive = false;
};

// Uses the stored snapshots of traj as the (uniform) mesh.
AsymptoticState asymptotic_state(const Trajectory& traj, double threshold = 1e-6);

struct GroundState {
  LatticeFunction Q{BoxSpec{1, 4}};
  double omega = 0.0;
  double p = 3.0;
  int mu = -1;
  double residual = 0.0;  // ||-Delta Q + 2 omega Q + 2 mu |Q|^{p-1} Q||_{l2}
  int iterations = 0;
};

// Petviashvili iteration for -Delta Q + 2 omega Q = 2 |Q|^{p-1} Q, symmetrized under m -> -m.
GroundState ground_state(double p, int d, double omega, const BoxSpec& box, double tol = 1e-10, int mu = -1,
                         int max_iter = 5000);

// Residual of the ground-state equation for an arbitrary candidate.
double ground_state_residual(const LatticeFunction& Q, double omega, double p, int mu = -1);

struct SolitonReport {
  std::vector<double> times;
  std::vector<double> amplitude_deviation;  // || |u(t)| - |u0| ||_inf
  double max_amplitude_deviation = 0.0;
  double phase_rate = 0.0;  // fitted d arg u / dt at the peak site
  double phase_rate_error = 0.0;
  std::size_t peak_index = 0;
  bool stationary = false;  // max deviation < 1e-6 and phase error < 1e-4
  AsymptoticState scattering;
};

// Evolves u0 = Q (or the override datum) with the focusing RK4 solver and compares against Q e^{i omega t}.
SolitonReport soliton_check(const GroundState& gs, const TimeGrid& grid, const std::optional<LatticeFunction>& datum = {},
                            int stride = 100);

struct SolitonExperiment {
  GroundState ground;
  SolitonReport report;
};

// ground_state followed by soliton_check on u0 = scale * Q.
SolitonExperiment soliton_experiment(double p, int d, double omega, const BoxSpec& box, int mu, double tol,
                                     const TimeGrid& grid, int stride, double scale = 1.0);

}  // namespace dnls
