#include <algorithm>
#include <cmath>
#include <limits>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"

namespace dnls {

namespace {

void least_squares(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) {
    slope = 0.0;
    intercept = x.empty() ? 0.0 : y[0];
    return;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  intercept = (sy - slope * sx) / n;
}

}  // namespace

HorizonTable smalldata_horizon(const QuasilinearProblem& prob, const LatticeFunction& u0,
                               const std::vector<double>& eps_ladder, double ceiling, const HorizonOptions& opts) {
  if (eps_ladder.empty()) throw DomainError("epsilon ladder is empty");
  for (double e : eps_ladder)
    if (!(e > 0.0 && e < 1.0)) throw DomainError("every epsilon must lie in (0, 1)");
  if (!(ceiling > 0.0)) throw DomainError("mass ceiling must be positive");
  if (!(opts.window > 0.0) || !(opts.T > 0.0)) throw DomainError("horizon window and horizon must be positive");

  HorizonTable table;
  table.ceiling = ceiling;
  table.window = opts.T;
  const long windows = std::lround(opts.T / opts.window);
  if (std::abs(windows * opts.window - opts.T) > 1e-12 * opts.T)
    throw DomainError("horizon must be an integer number of windows");
  const TimeGrid wgrid = TimeGrid::make(opts.window, opts.dt);

  for (double eps : eps_ladder) {
    HorizonRow row;
    row.epsilon = eps;
    LatticeFunction data = u0 * cplx(eps, 0.0);
    double t0 = 0.0;
    double last_ok = 0.0;
    bool exceeded = l2_norm(data) > ceiling;
    try {
      for (long w = 0; w < windows && !exceeded; ++w) {
        QuasilinearOptions qo;
        qo.solve.guard = opts.guard;
        qo.solve.store = true;
        qo.solve.stride = static_cast<int>(wgrid.steps);
        QuasilinearResult r = solve_quasilinear(prob.with_data(data), wgrid, opts.tol, opts.max_outer, qo);
        row.outer_iterations = std::max(row.outer_iterations, r.max_outer_iterations);
        const auto& l2 = r.trajectory.step_l2;
        for (std::size_t s = 0; s < l2.size(); ++s) {
          if (l2[s] > ceiling) {
            exceeded = true;
            break;
          }
          last_ok = t0 + wgrid.time(static_cast<long>(s));
        }
        if (r.alarm) {
          row.status = "continuation alarm";
          break;
        }
        data = r.trajectory.back();
        t0 += opts.window;
      }
    } catch (const std::exception& e) {
      row.status = std::string("solver failure: ") + e.what();
    }
    row.horizon = last_ok;
    row.reached_window_end = !exceeded && row.status == "ok";
    table.rows.push_back(row);
  }

  std::vector<HorizonRow> sorted = table.rows;
  std::sort(sorted.begin(), sorted.end(), [](const HorizonRow& a, const HorizonRow& b) { return a.epsilon > b.epsilon; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].horizon < sorted[i - 1].horizon) table.monotone = false;

  std::vector<double> xl, xll, y;
  table.certified_K_log = std::numeric_limits<double>::infinity();
  table.certified_K_loglog = std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) {
    double L = std::log(1.0 / r.epsilon);
    xl.push_back(L);
    xll.push_back(std::log(L));
    y.push_back(r.horizon);
    table.certified_K_log = std::min(table.certified_K_log, r.horizon / L);
    if (L > 1.0) table.certified_K_loglog = std::min(table.certified_K_loglog, r.horizon / std::log(L));
  }
  if (!std::isfinite(table.certified_K_loglog)) table.certified_K_loglog = 0.0;
  least_squares(xl, y, table.slope_log, table.intercept_log);
  least_squares(xll, y, table.slope_loglog, table.intercept_loglog);
  return table;
}

}  // namespace dnls
