#include <cmath>
#include <vector>

#include "dnls/errors.hpp"
#include "dnls/lattice.hpp"
#include "dnls/rng.hpp"
#include "doctest.h"

using namespace dnls;

TEST_CASE("box validation") {
  CHECK_NOTHROW(BoxSpec::make(1, 4));
  CHECK_THROWS_AS(BoxSpec::make(0, 16), DomainError);
  CHECK_THROWS_AS(BoxSpec::make(4, 16), DomainError);
  CHECK_THROWS_AS(BoxSpec::make(1, 2), DomainError);
  CHECK_THROWS_AS(BoxSpec::make(1, 15), DomainError);
  CHECK(BoxSpec::make(3, 8).sites() == 512);
}

TEST_CASE("coordinates round trip through the row-major index") {
  BoxSpec box = BoxSpec::make(3, 6);
  std::array<int, 3> c{};
  for (std::size_t i = 0; i < box.sites(); ++i) {
    box.coords(i, c);
    CHECK(box.index_of(std::span<const int>(c.data(), 3)) == i);
  }
  box.coords(0, c);
  CHECK(c[0] == -3);
  CHECK(c[2] == -3);
}

TEST_CASE("make_delta") {
  auto u = make_delta(BoxSpec::make(1, 16), {0});
  CHECK(l2_norm(u) == 1.0);
  auto v = make_delta(BoxSpec::make(2, 8), {3, -4});
  double s = 0.0;
  for (auto z : v.values()) s += std::abs(z);
  CHECK(s == 1.0);
  CHECK(v.at({3, -4}) == cplx(1.0, 0.0));
  CHECK_THROWS_AS(make_delta(BoxSpec::make(1, 16), {9}), DomainError);
  CHECK_THROWS_AS(make_delta(BoxSpec::make(1, 16), {8}), DomainError);
  CHECK_NOTHROW(make_delta(BoxSpec::make(1, 16), {-8}));
}

TEST_CASE("make_gaussian") {
  BoxSpec box = BoxSpec::make(1, 64);
  auto g = make_gaussian(box, 2.0, 1.0);
  CHECK(g.at({0}) == cplx(1.0, 0.0));
  for (int m = 1; m < 32; ++m) CHECK(g.at({m}) == g.at({-m}));
  double oracle = 0.0;
  for (int m = -32; m < 32; ++m) oracle += std::exp(-m * m / 4.0);
  double n = l2_norm(g);
  CHECK(std::abs(n * n - oracle) < 1e-13 * oracle);
  CHECK_THROWS_AS(make_gaussian(box, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_gaussian(box, -1.0, 1.0), DomainError);
}

TEST_CASE("lattice function rejects non-finite values and wrong sizes") {
  BoxSpec box = BoxSpec::make(1, 8);
  Field v(8, 0.0);
  v[3] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(LatticeFunction(box, v), NumericalError);
  CHECK_THROWS_AS(LatticeFunction(box, Field(7)), DomainError);
}

TEST_CASE("weighted norms") {
  BoxSpec b1 = BoxSpec::make(1, 16);
  CHECK(weighted_norm(make_delta(b1, {0}), {2.0, 0.0}) == 1.0);
  auto d = make_delta(BoxSpec::make(2, 16), {3, 4});
  CHECK(std::abs(weighted_norm(d, {2.0, 1.0}) - std::sqrt(26.0)) < 1e-14);
  CHECK(std::abs(weighted_norm(d, {INFINITY, 1.0}) - std::sqrt(26.0)) < 1e-14);
  auto z = make_zero(BoxSpec::make(2, 8));
  for (double p : {0.5, 1.0, 2.0, 3.0, double(INFINITY)})
    for (double a : {-1.0, 0.0, 2.0}) CHECK(weighted_norm(z, {p, a}) == 0.0);
}

TEST_CASE("norm properties on seeded random inputs") {
  BoxSpec box = BoxSpec::make(2, 16);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto u = make_random(box, seed);
    auto v = make_random(box, seed + 1000);
    double direct = 0.0;
    for (auto z : u.values()) direct += std::norm(z);
    direct = std::sqrt(direct);
    CHECK(std::abs(weighted_norm(u, {2.0, 0.0}) - direct) <= 1e-15 * direct);

    cplx c(-1.5, 0.7);
    for (double p : {1.0, 2.0, 3.0, double(INFINITY)}) {
      for (double a : {0.0, 1.0}) {
        double lhs = weighted_norm(u * c, {p, a});
        double rhs = std::abs(c) * weighted_norm(u, {p, a});
        CHECK(std::abs(lhs - rhs) <= 1e-13 * rhs);
        CHECK(weighted_norm(u + v, {p, a}) <= weighted_norm(u, {p, a}) + weighted_norm(v, {p, a}) + 1e-12);
      }
    }
    for (double a : {0.5, 1.0, 2.0}) CHECK(weighted_norm(u, {2.0, 0.0}) <= weighted_norm(u, {2.0, a}));
  }
}

TEST_CASE("quasi-norm for p below one uses the same formula") {
  BoxSpec box = BoxSpec::make(1, 8);
  auto u = make_random(box, 5);
  double s = 0.0;
  for (auto z : u.values()) s += std::pow(std::abs(z), 0.5);
  CHECK(std::abs(weighted_norm(u, {0.5, 0.0}) - s * s) < 1e-12 * s * s);
  CHECK_THROWS_AS(weighted_norm(u, {0.0, 0.0}), DomainError);
}

TEST_CASE("sup norm and boundary mass fraction") {
  BoxSpec box = BoxSpec::make(1, 16);
  CHECK(boundary_mass_fraction(make_delta(box, {0}), 2) == 0.0);
  CHECK(boundary_mass_fraction(make_delta(box, {7}), 2) == 1.0);
  CHECK(boundary_mass_fraction(make_delta(box, {-8}), 1) == 1.0);
  CHECK(boundary_mass_fraction(make_delta(box, {5}), 2) == 0.0);
  CHECK(boundary_mass_fraction(make_delta(box, {6}), 2) == 1.0);
  CHECK(boundary_mass_fraction(make_zero(box), 2) == 0.0);
  CHECK_THROWS_AS(boundary_mass_fraction(make_zero(box), 8), DomainError);

  BoxSpec b64 = BoxSpec::make(1, 64);
  auto g = make_gaussian(b64, 2.0, 1.0);
  double shell = 0.0, total = 0.0;
  for (int m = -32; m < 32; ++m) {
    double w = std::exp(-m * m / 4.0);
    total += w;
    if (m < -28 || m >= 28) shell += w;
  }
  double f = boundary_mass_fraction(g, 4);
  CHECK(f < 1e-20);
  CHECK(std::abs(f - shell / total) <= 1e-12 * (shell / total));
  CHECK(sup_norm(g) == 1.0);
  CHECK(sup_norm(make_gaussian(b64, 2.0, cplx(0.0, -3.0))) == 3.0);
}

TEST_CASE("counter rng is a pure function of seed and counter") {
  CounterRng a(42), b(42), c(43);
  CHECK(a.bits(7) == b.bits(7));
  CHECK(a.bits(7) != c.bits(7));
  CHECK(a.bits(7) != a.bits(8));
  double mean = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double x = a.uniform(i);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    mean += x;
  }
  CHECK(std::abs(mean / 10000 - 0.5) < 0.02);
  auto u1 = make_random(BoxSpec::make(1, 32), 9);
  auto u2 = make_random(BoxSpec::make(1, 32), 9);
  CHECK(u1.field() == u2.field());
  CHECK(u1.content_hash() == u2.content_hash());
  CHECK(u1.content_hash() != make_random(BoxSpec::make(1, 32), 10).content_hash());
}
