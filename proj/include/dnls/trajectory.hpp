#pragma once

#include <string>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

struct TimeGrid {
  double T = 1.0;
  double dt = 1e-3;
  long steps = 1000;

  static TimeGrid make(double T, double dt);
  double time(long n) const { return static_cast<double>(n) * dt; }
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

enum class GuardAction { Abort, Warn, Off };

struct GuardPolicy {
  GuardAction action = GuardAction::Abort;
  double threshold = 1e-6;
  int shell_width = 0;  // 0 selects max(1, M/16)

  static GuardPolicy off() { return GuardPolicy{GuardAction::Off, 1e-6, 0}; }
};

// Throws GuardViolation (or warns on stderr) when the boundary shell holds too much mass.
void enforce_guard(const LatticeFunction& u, const GuardPolicy& policy, const std::string& where);

/// Append-only consumer of solver output, e.g. a snapshot writer.
class SnapshotSink {
 public:
  virtual ~SnapshotSink() = default;
  virtual void append(double t, const LatticeFunction& u) = 0;
};

struct Trajectory {
  TimeGrid grid;
  int stride = 1;
  std::vector<double> times;
  std::vector<LatticeFunction> snapshots;
  // One entry per time step 0..steps.
  std::vector<double> step_sup;
  std::vector<double> step_l2;

  std::size_t size() const { return snapshots.size(); }
  const LatticeFunction& front() const { return snapshots.front(); }
  const LatticeFunction& back() const { return snapshots.back(); }
  // Snapshot stored at time t (matched to within a millionth of a step).
  const LatticeFunction& at_time(double t) const;
};

struct SolveOptions {
  int stride = 1;
  GuardPolicy guard;
  SnapshotSink* sink = nullptr;
  bool store = true;
};

// Shared bookkeeping for the time steppers: step series, strided snapshots, sink,
// finiteness and guard checks.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const TimeGrid& grid, const BoxSpec& box, const SolveOptions& opts, std::string solver);

  void record(long step, const Field& u);
  Trajectory finish() &&;
  const Trajectory& current() const { return traj_; }

 private:
  BoxSpec box_;
  SolveOptions opts_;
  std::string solver_;
  Trajectory traj_;
};

// Largest l2 distance between matching snapshots.
double sup_l2_distance(const Trajectory& a, const Trajectory& b);

}  // namespace dnls
