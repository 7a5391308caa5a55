#include <boost/rational.hpp>
#include <cmath>
#include <optional>
#include <vector>

#include "dnls/diagnostics.hpp"
#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/spectral.hpp"
#include "doctest.h"

using namespace dnls;

namespace {

using Q = boost::rational<long long>;

// Exponents as exact rationals; std::nullopt stands for infinity.
using Exp = std::optional<Q>;

Q inv(const Exp& x) { return x ? Q(1) / *x : Q(0); }
double as_double(const Exp& x) { return x ? boost::rational_cast<double>(*x) : INFINITY; }

bool oracle_admissible(const Exp& q, const Exp& r, int d) {
  const Q two(2), dd(d);
  if (q && *q < two) return false;
  if (r && *r < two) return false;
  if (q && *q == two && !r && d == 3) return false;
  return inv(q) + dd / Q(3) * inv(r) <= dd / Q(6);
}

bool oracle_condition(const Exp& p0, const Exp& q0, const Q& p, int d) {
  const Q one(1), two(2), dd(d);
  const Q lhs = inv(p0) + dd / Q(3) * inv(q0);
  bool first = (Q(6) + dd) / (Q(6) * p) <= lhs && p0 && p <= *p0 && *p0 <= two * p && q0 && p <= *q0 &&
               *q0 <= two * p && !(*p0 == two * p && *q0 == p && d == 3);
  bool second = p0 && q0 && p - one < *p0 && p - one < *q0 && one / (p - one) <= lhs &&
                Q(1, 2) <= dd / Q(6) + (p - one) * inv(p0) && Q(6) <= (p - one) * dd;
  return first || second;
}

std::vector<Exp> exponent_grid() {
  std::vector<Exp> g;
  for (int num = 2; num <= 48; ++num)
    for (int den : {1, 2, 3, 4}) g.emplace_back(Q(num, den));
  g.emplace_back(Q(7, 5));
  g.emplace_back(Q(1));
  g.emplace_back(std::nullopt);
  return g;
}

}  // namespace

TEST_CASE("mass and energy on reference data") {
  BoxSpec box = BoxSpec::make(1, 16);
  auto delta = make_delta(box, {0});
  CHECK(mass(delta) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(energy(delta, 1, 3.0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(energy_partial_form(delta, 1, 3.0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(conserved_energy(delta, 1, 3.0) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(energy(make_zero(box), 1, 3.0) == 0.0);
  CHECK(energy(delta, -1, 3.0) == doctest::Approx(1.5).epsilon(1e-13));

  BoxSpec b3 = BoxSpec::make(3, 8);
  auto d3 = make_delta(b3, {0, 0, 0});
  CHECK(energy(d3, 1, 5.0) == doctest::Approx(6.0 + 1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("difference and spectral-derivative energies coincide") {
  for (int d = 1; d <= 3; ++d) {
    BoxSpec box = BoxSpec::make(d, d == 3 ? 8 : 32);
    for (std::uint64_t s = 1; s <= 20; ++s) {
      auto u = make_random(box, s);
      double a = energy(u, 1, 3.0), b = energy_partial_form(u, 1, 3.0);
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
      double a2 = energy(u, -1, 2.5), b2 = energy_partial_form(u, -1, 2.5);
      CHECK(std::abs(a2 - b2) <= 1e-12 * std::max(1.0, std::abs(a2)));
    }
  }
}

TEST_CASE("admissible against exact rational oracle") {
  CHECK(admissible(INFINITY, 2.0, 3));
  CHECK(admissible(4.0, 4.0, 3));
  CHECK_FALSE(admissible(2.0, INFINITY, 3));
  CHECK(admissible(2.0, INFINITY, 4));
  CHECK_FALSE(admissible(1.5, 2.0, 1));
  auto grid = exponent_grid();
  long checked = 0;
  for (int d = 1; d <= 3; ++d)
    for (const auto& q : grid)
      for (const auto& r : grid) {
        INFO("d=" << d << " q=" << as_double(q) << " r=" << as_double(r));
        CHECK(admissible(as_double(q), as_double(r), d) == oracle_admissible(q, r, d));
        ++checked;
      }
  CHECK(checked > 100000);
}

TEST_CASE("condition pairs against exact rational oracle") {
  CHECK(condition_pairs(4.0, 4.0, 3.0, 3));
  CHECK(condition_pairs(2.5, 5.0, 3.0, 3));
  // (2p, p, 3) leaves only the second branch, which needs p >= 3.
  CHECK_FALSE(condition_pairs(5.0, 2.5, 2.5, 3));
  CHECK(condition_pairs(6.0, 3.0, 3.0, 3));
  auto grid = exponent_grid();
  std::vector<Q> powers{Q(3, 2), Q(2), Q(7, 3), Q(5, 2), Q(3), Q(7, 2), Q(4), Q(5), Q(7)};
  for (int d = 1; d <= 3; ++d)
    for (const Q& p : powers)
      for (const auto& p0 : grid)
        for (const auto& q0 : grid) {
          bool got = condition_pairs(as_double(p0), as_double(q0), boost::rational_cast<double>(p), d);
          bool want = oracle_condition(p0, q0, p, d);
          if (got != want) {
            INFO("d=" << d << " p=" << p << " p0=" << as_double(p0) << " q0=" << as_double(q0));
            CHECK(got == want);
          }
        }
}

TEST_CASE("default pair list") {
  auto l3 = default_pair_list(3.0, 3);
  REQUIRE(l3.size() == 2);
  CHECK(std::isinf(l3[0].q));
  CHECK(l3[1].q == 4.0);
  auto l1 = default_pair_list(3.0, 1);
  for (const auto& pr : l1) CHECK(admissible(pr.q, pr.r, 1));
  REQUIRE(l1.size() == 2);
  CHECK(l1[1].q == 8.0);
}

TEST_CASE("space-time norms") {
  BoxSpec box = BoxSpec::make(1, 64);
  auto g = make_gaussian(box, 3.0, 1.0);
  Trajectory traj;
  traj.grid = TimeGrid::make(1.0, 0.25);
  for (int i = 0; i <= 4; ++i) {
    traj.times.push_back(0.25 * i);
    traj.snapshots.push_back(g);
  }
  const double n2 = l2_norm(g);
  CHECK(spacetime_norm(traj, {2.0, 2.0, 0.0, 1.0}) == doctest::Approx(n2).epsilon(1e-14));
  CHECK(spacetime_norm(traj, {4.0, 2.0, 0.0, 0.5}) == doctest::Approx(n2 * std::pow(0.5, 0.25)).epsilon(1e-14));
  CHECK(spacetime_norm(traj, {INFINITY, 2.0, 0.1, 0.9}) == doctest::Approx(n2).epsilon(1e-14));
  CHECK_THROWS_AS(spacetime_norm(traj, {2.0, 2.0, 0.0, 2.0}), DomainError);
  CHECK_THROWS_AS(spacetime_norm(traj, {2.0, 2.0, 0.5, 0.5}), DomainError);

  // Linear growth in time: trapezoid with interpolated ends integrates t^2 up to O(h^2).
  Trajectory lin = traj;
  for (int i = 0; i <= 4; ++i) lin.snapshots[i] = g * cplx(0.25 * i, 0.0);
  double exact = n2 * std::sqrt((std::pow(0.9, 3) - std::pow(0.1, 3)) / 3.0);
  CHECK(std::abs(spacetime_norm(lin, {2.0, 2.0, 0.1, 0.9}) - exact) < 0.05 * exact);

  auto zero = traj;
  for (auto& s : zero.snapshots) s = make_zero(box);
  CHECK(spacetime_norm(zero, {4.0, 4.0, 0.0, 1.0}) == 0.0);

  auto free = solve_semilinear_splitstep({1, 3.0, g * cplx(1.0 / n2, 0.0)}, TimeGrid::make(2.0, 0.01));
  double s1 = spacetime_norm(free, {4.0, 4.0, 0.0, 1.0});
  double s2 = spacetime_norm(free, {4.0, 4.0, 0.0, 2.0});
  CHECK(s1 < s2);
  CHECK(strichartz_sup(free, default_pair_list(3.0, 1), 0.0, 2.0) >= spacetime_norm(free, {INFINITY, 2.0, 0.0, 2.0}));
}

TEST_CASE("dispersive decay of the delta in one dimension") {
  BoxSpec box = BoxSpec::make(1, 8192);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(20.0 * std::pow(10.0, i / 40.0));
  auto rep = decay_fit(make_delta(box, {0}), 1, times);
  CHECK(rep.slope == doctest::Approx(-1.0 / 3.0).epsilon(0.15));
  CHECK(rep.max_boundary_fraction < 1e-6);
  CHECK(std::isfinite(rep.bound_constant));
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(rep.sup_norm[i] <= rep.bound_constant * std::pow(times[i], -1.0 / 3.0) * (1 + 1e-12));
  std::vector<double> too_long{100.0, 5000.0};
  CHECK_THROWS_AS(decay_fit(make_delta(box, {0}), 1, too_long), GuardViolation);
  CHECK_THROWS_AS(decay_fit(make_zero(box), 1, times), DomainError);
  CHECK_THROWS_AS(decay_fit(make_delta(box, {0}), 2, times), DomainError);
}

TEST_CASE("smooth data disperse at the continuum rate") {
  // A broad gaussian lives near frequency zero, where the dispersion is parabolic, so its
  // sup norm decays like t^{-1/2} in one dimension rather than like the lattice rate t^{-1/3}.
  BoxSpec box = BoxSpec::make(1, 8192);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(20.0 * std::pow(10.0, i / 40.0));
  auto rep = decay_fit(make_gaussian(box, 2.0, 1.0), 1, times);
  CHECK(rep.slope == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("Strichartz constant probe") {
  BoxSpec box = BoxSpec::make(1, 256);
  std::vector<LatticeFunction> ens;
  for (std::uint64_t s = 1; s <= 4; ++s) ens.push_back(make_random(box, s));
  auto e2 = strichartz_constant_probe(1, {INFINITY, 2.0}, ens, 4.0, 0.1);
  for (double r : e2.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(strichartz_constant_probe(3, {2.0, INFINITY}, ens, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(strichartz_constant_probe(1, {INFINITY, 2.0}, {}, 1.0, 0.1), DomainError);

  BoxSpec b3 = BoxSpec::make(3, 32);
  std::vector<LatticeFunction> e3{make_gaussian(b3, 1.0, 1.0), make_delta(b3, {0, 0, 0})};
  auto a = strichartz_constant_probe(3, {4.0, 4.0}, e3, 4.0, 0.05);
  auto b = strichartz_constant_probe(3, {4.0, 4.0}, e3, 8.0, 0.05);
  CHECK(a.constant > 0.0);
  CHECK(b.constant >= a.constant);
  CHECK(b.constant < 1.5 * a.constant);
}
