#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/partitions.hpp"
#include "dnls/trajectory.hpp"
#include "dnls/wirtinger.hpp"

namespace dnls {

constexpr int kMaxFrechetOrder = 5;

// One summand F(Phi) * prod_j [Psi^{|B_j|}(v_{B_j})]^{(eps_j)} of the order-k right-hand side,
// where B_j are the groups of tau.
struct PsiTerm {
  Partition tau;
  Signal eps;
  WirtingerPolynomial F;
};

// Terms of the k-th Wirtinger derivative of N(Phi) = |Phi|^{p-1} Phi along Psi fields, built by
// the recursion that differentiates the coefficient (new singleton group) or one factor (the
// extension set of tau). Terms with identical (tau, eps) are merged and zero coefficients dropped.
std::vector<PsiTerm> psi_terms(int k, int p);

// Evaluated k-linear factor L^k: maps an argument list of length k to a trajectory.
using MultilinearFactor = std::function<Trajectory(const std::vector<LatticeFunction>& args)>;

// Pointwise space-time product prod_j [L^{|B_j|}(args restricted to B_j)]^{(eps_j)}.
Trajectory eval_multilinear(const std::map<int, MultilinearFactor>& lower, const Partition& tau, const Signal& eps,
                            const std::vector<LatticeFunction>& args);

// Joint method-of-lines integrator for Phi(u0) and the linearized fields Psi^k(u0)(v_1..v_k).
// Phi is advanced by the classical RK4 scheme with the stencil Laplacian (bit-compatible with
// solve_semilinear_rk4), and every Psi field rides in the same RK4 system, so the discrete Psi
// fields are the exact derivatives of the discrete solution map.
class FrechetEngine {
 public:
  FrechetEngine(int mu, int p, LatticeFunction u0, TimeGrid grid, SolveOptions opts = {});

  int mu() const { return mu_; }
  int p() const { return p_; }
  const LatticeFunction& u0() const { return u0_; }
  const TimeGrid& grid() const { return grid_; }
  const SolveOptions& options() const { return opts_; }

  const Trajectory& base();
  // Psi^k(u0)(args), k = args.size() in 1..5. Lower-order subset fields produced on the way are cached too.
  std::shared_ptr<const Trajectory> psi(const std::vector<LatticeFunction>& args);

  std::size_t cache_entries() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  using Key = std::vector<std::uint64_t>;
  void run(const std::vector<LatticeFunction>& args);

  int mu_;
  int p_;
  LatticeFunction u0_;
  TimeGrid grid_;
  SolveOptions opts_;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const Trajectory>> cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Psi^1 along the supplied base. Phi is re-integrated jointly from base.front() on the same grid.
Trajectory solve_psi1(const Trajectory& base, const LatticeFunction& v, const TimeGrid& grid, int mu, int p,
                      const SolveOptions& opts = {});
Trajectory solve_psi_k(int mu, int p, const LatticeFunction& u0, const std::vector<LatticeFunction>& v,
                       const TimeGrid& grid, const SolveOptions& opts = {});

struct FiniteDifferenceReport {
  int order = 0;
  std::vector<double> h;
  // sup-t l2 norm of sum_S (-1)^{k-|S|} Phi(u0 + h v_S) - h^k Psi^k(v_1..v_k)
  std::vector<double> remainder;
  std::vector<double> scaled;       // remainder / h^k
  std::vector<double> improvement;  // scaled[i] / scaled[i+1]
};

// Mixed k-th difference of the RK4 solution map against h^k Psi^k, k = v.size() in 1..3.
FiniteDifferenceReport frechet_difference_check(FrechetEngine& engine, const std::vector<LatticeFunction>& v,
                                                const std::vector<double>& h);

// FrechetEngine on (mu, p, u0, grid) followed by frechet_difference_check along v.
FiniteDifferenceReport frechet_order_check(int mu, int p, const LatticeFunction& u0, const std::vector<LatticeFunction>& v,
                                           const TimeGrid& grid, const std::vector<double>& h,
                                           const SolveOptions& opts = {});

enum class TaylorRoute { Frechet, Cascade };

// Coefficients u_0..u_{n_max} of eps -> Phi((lambda + eps) u0) at eps = 0. The Frechet route uses
// Psi^k(lambda u0)(u0,..,u0)/k!; the cascade route (p = 3 only) integrates
// i d_t u_n + (1/2) Delta u_n = mu sum_{a+b+c=n} u_a u_b conj(u_c).
std::vector<Trajectory> taylor_expand(int mu, int p, const LatticeFunction& u0, double lambda, int n_max,
                                      const TimeGrid& grid, TaylorRoute route, const SolveOptions& opts = {});

struct TaylorCheckReport {
  std::vector<double> eps;
  std::vector<double> errors;  // sup-t l2 of Phi((lambda+eps)u0) - sum_{k<=n} eps^k u_k
  std::vector<double> shrink;  // errors[i] / errors[i+1]
  std::vector<double> route_difference;  // per order, sup-t l2 distance between routes; empty unless p = 3
  double max_route_difference = 0.0;
};

TaylorCheckReport taylor_check(int mu, int p, const LatticeFunction& u0, double lambda, int n_terms,
                               const std::vector<double>& eps, const TimeGrid& grid, const SolveOptions& opts = {});

struct MajorantReport {
  std::vector<double> coefficients;       // C_0..C_{n_max}
  std::vector<std::string> coefficients_text;  // 40 significant digits
  std::vector<double> root_test;          // C_k^{-1/k} for C_k > 0
  double radius_estimate = 0.0;           // ratio-test extrapolation in 1/k
  double root_test_estimate = 0.0;
  double implicit_radius = 0.0;           // from A y - B y^3 = C x + D
  int period = 1;                         // spacing of nonzero coefficients
};

// C_{n+1} = K sum_{k1+k2+k3=n+1, 0<=k_i<n+1} C_{k1} C_{k2} C_{k3} in 50-digit floating point.
MajorantReport majorant_radius(double K, double C0, double C1, int n_max);

}  // namespace dnls
