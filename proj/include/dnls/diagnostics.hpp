#pragma once

#include <cmath>
#include <vector>

#include "dnls/evolution.hpp"
#include "dnls/lattice.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

double mass(const LatticeFunction& u);

// sum_m sum_j |D_j u(m)|^2 + (2 mu / (p + 1)) sum_m |u(m)|^{p+1}, the functional as written
// in the energy definition (difference form).
double energy(const LatticeFunction& u, int mu, double p);
// The same functional with the spectral derivative in place of the forward difference.
double energy_partial_form(const LatticeFunction& u, int mu, double p);
// sum |D u|^2 + (4 mu / (p + 1)) sum |u|^{p+1}: twice the Hamiltonian of
// i u_t + (1/2) Delta u = mu |u|^{p-1} u, hence an exact invariant of the flow.
double conserved_energy(const LatticeFunction& u, int mu, double p);

struct ConservationReport {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> energy_difference_form;
  std::vector<double> energy_partial_form;
  std::vector<double> conserved_energy;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double conserved_energy_drift = 0.0;
  // max over snapshots of |E_partial - E_difference| / |E_difference|
  double form_mismatch = 0.0;
};

ConservationReport conservation_report(const Trajectory& traj, int mu, double p);
// Split-step run of prob followed by conservation_report on its snapshots.
ConservationReport conservation_run(const SemilinearProblem& prob, const TimeGrid& grid, const SolveOptions& opts = {});

bool admissible(double q, double r, int d);
bool condition_pairs(double p0, double q0, double p, int d);

struct AdmissiblePair {
  double q = INFINITY;
  double r = 2.0;
};

// (inf, 2), (p+1, p+1) when admissible, and the endpoint pair q = r = 2(d+3)/d.
std::vector<AdmissiblePair> default_pair_list(double p, int d);

struct SpaceTimeNormSpec {
  double q = 2.0;
  double r = 2.0;
  double t0 = 0.0;
  double t1 = 1.0;
};

double spacetime_norm(const Trajectory& traj, const SpaceTimeNormSpec& spec);
double strichartz_sup(const Trajectory& traj, const std::vector<AdmissiblePair>& pairs, double t0, double t1);

// Same quadrature on a bare list of snapshot times and lattice functions.
double spacetime_norm(const std::vector<double>& times, const std::vector<LatticeFunction>& u,
                      const SpaceTimeNormSpec& spec);

struct DecayFitReport {
  std::vector<double> times;
  std::vector<double> sup_norm;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;        // rms deviation of the log-log fit
  double bound_constant = 0.0;  // smallest C with sup_norm <= C t^{-d/3} ||u0||_1 on the samples
  double max_boundary_fraction = 0.0;
};

// Fits log ||exp(i t Delta / 2) u0||_inf against log t. Throws GuardViolation when the
// group-velocity bound or the measured boundary mass says the wave reaches the box edge.
DecayFitReport decay_fit(const LatticeFunction& u0, int d, const std::vector<double>& times,
                         const GuardPolicy& guard = {});

// n sample times from t0 to t1 inclusive, geometrically or evenly spaced.
std::vector<double> sample_times(double t0, double t1, int n, bool logarithmic);

struct StrichartzProbeReport {
  std::vector<double> ratios;  // per ensemble member
  double constant = 0.0;       // max ratio
};

StrichartzProbeReport strichartz_constant_probe(int d, const AdmissiblePair& pair,
                                                const std::vector<LatticeFunction>& ensemble, double window,
                                                double sample_dt);

}  // namespace dnls
