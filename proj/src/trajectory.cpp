#include "dnls/trajectory.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "dnls/errors.hpp"

namespace dnls {

TimeGrid TimeGrid::make(double T, double dt) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("time horizon must be positive and finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive and finite");
  if (dt > T * (1.0 + 1e-12)) throw DomainError("time step exceeds the horizon");
  long steps = std::lround(T / dt);
  if (std::abs(static_cast<double>(steps) * dt - T) > 1e-12 * T)
    throw DomainError("horizon is not an integer multiple of the time step");
  return TimeGrid{T, dt, steps};
}

void enforce_guard(const LatticeFunction& u, const GuardPolicy& policy, const std::string& where) {
  if (policy.action == GuardAction::Off) return;
  int shell = policy.shell_width > 0 ? policy.shell_width : default_shell_width(u.box());
  double f = boundary_mass_fraction(u, shell);
  if (f <= policy.threshold) return;
  std::ostringstream msg;
  msg << where << ": boundary mass fraction " << f << " exceeds " << policy.threshold << " (shell width " << shell
      << ")";
  if (policy.action == GuardAction::Abort) throw GuardViolation(msg.str());
  std::cerr << "warning: " << msg.str() << '\n';
}

const LatticeFunction& Trajectory::at_time(double t) const {
  const double tol = 1e-6 * grid.dt;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= tol) return snapshots[i];
  throw DomainError("no snapshot stored at the requested time");
}

TrajectoryRecorder::TrajectoryRecorder(const TimeGrid& grid, const BoxSpec& box, const SolveOptions& opts,
                                       std::string solver)
    : box_(box), opts_(opts), solver_(std::move(solver)) {
  if (opts_.stride < 1) throw DomainError("snapshot stride must be at least 1");
  traj_.grid = grid;
  traj_.stride = opts_.stride;
  traj_.step_sup.reserve(grid.steps + 1);
  traj_.step_l2.reserve(grid.steps + 1);
}

void TrajectoryRecorder::record(long step, const Field& u) {
  double s = sup_norm(u);
  if (!std::isfinite(s)) {
    std::ostringstream msg;
    msg << solver_ << ": non-finite values at step " << step << " (t = " << traj_.grid.time(step) << ")";
    throw NumericalError(msg.str());
  }
  traj_.step_sup.push_back(s);
  traj_.step_l2.push_back(l2_norm(u));
  if (step % opts_.stride != 0 && step != traj_.grid.steps) return;
  LatticeFunction f(box_, u);
  enforce_guard(f, opts_.guard, solver_ + " at t = " + std::to_string(traj_.grid.time(step)));
  if (opts_.sink) opts_.sink->append(traj_.grid.time(step), f);
  if (opts_.store) {
    traj_.times.push_back(traj_.grid.time(step));
    traj_.snapshots.push_back(std::move(f));
  }
}

Trajectory TrajectoryRecorder::finish() && { return std::move(traj_); }

double sup_l2_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw DomainError("trajectories have different snapshot counts");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-9 * (1.0 + std::abs(a.times[i])))
      throw DomainError("trajectories are stored at different times");
    worst = std::max(worst, l2_distance(a.snapshots[i].values(), b.snapshots[i].values()));
  }
  return worst;
}

}  // namespace dnls
