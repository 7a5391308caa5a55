#include <cmath>
#include <numbers>
#include <vector>

#include "dnls/errors.hpp"
#include "dnls/lattice.hpp"
#include "dnls/spectral.hpp"
#include "doctest.h"

using namespace dnls;

namespace {

const double kPi = std::numbers::pi;

// Direct O(N^2) evaluation of sum_m u(m) exp(-i m.xi_k) in centered coordinates.
Field naive_dft(const LatticeFunction& u) {
  const BoxSpec& box = u.box();
  const std::size_t n = box.sites();
  Field out(n);
  std::array<int, 3> m{};
  for (std::size_t k = 0; k < n; ++k) {
    std::array<int, 3> kk{};
    std::size_t idx = k;
    for (int j = box.d - 1; j >= 0; --j) {
      kk[j] = static_cast<int>(idx % box.M);
      idx /= box.M;
    }
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      box.coords(i, m);
      double ph = 0.0;
      for (int j = 0; j < box.d; ++j) ph += m[j] * 2.0 * kPi * kk[j] / box.M;
      acc += u[i] * std::polar(1.0, -ph);
    }
    out[k] = acc;
  }
  return out;
}

double rel(const LatticeFunction& a, const LatticeFunction& b) {
  double n = l2_norm(b);
  return l2_distance(a.values(), b.values()) / (n > 0 ? n : 1.0);
}

double phi(double a) { return -4.0 / (kPi * (4.0 * a * a - 1.0)); }

}  // namespace

TEST_CASE("forward transform matches the naive DFT") {
  for (int d = 1; d <= 3; ++d) {
    BoxSpec box = BoxSpec::make(d, d == 3 ? 4 : 8);
    auto u = make_random(box, 11 + d);
    auto s = forward_transform(u);
    Field oracle = naive_dft(u);
    double err = l2_distance(s.values(), oracle) / l2_norm(oracle);
    CHECK(err < 1e-13);
  }
}

TEST_CASE("transform examples") {
  BoxSpec box = BoxSpec::make(2, 8);
  auto s = forward_transform(make_delta(box, {0, 0}));
  for (auto z : s.values()) CHECK(std::abs(z - 1.0) < 1e-15);
  auto z = forward_transform(make_zero(box));
  for (auto w : z.values()) CHECK(w == cplx(0.0, 0.0));
}

TEST_CASE("round trip and Parseval on seeded random inputs") {
  for (int d = 1; d <= 3; ++d) {
    BoxSpec box = BoxSpec::make(d, d == 1 ? 256 : (d == 2 ? 32 : 16));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto u = make_random(box, seed, d);
      auto s = forward_transform(u);
      auto back = inverse_transform(s);
      CHECK(rel(back, u) < 1e-12);
      double lhs = std::pow(l2_norm(u), 2);
      double rhs = std::pow(l2_norm(s.values()), 2) / box.sites();
      CHECK(std::abs(lhs - rhs) < 1e-12 * lhs);
    }
  }
}

TEST_CASE("mismatched grid is rejected") {
  auto u = make_random(BoxSpec::make(1, 16), 1);
  Multiplier m(TorusGrid{BoxSpec::make(1, 32)});
  CHECK_THROWS_AS(apply_multiplier(u, m), DomainError);
}

TEST_CASE("torus grid parametrizes [0, 2pi)") {
  TorusGrid g{BoxSpec::make(1, 16)};
  CHECK(g.xi(0) == 0.0);
  CHECK(g.xi(15) < 2.0 * kPi);
  CHECK(std::abs(g.xi(8) - kPi) < 1e-15);
}

TEST_CASE("partial_spectral of a delta reproduces the kernel") {
  for (int M : {16, 128}) {
    auto d = partial_spectral(make_delta(BoxSpec::make(1, M), {0}), 1);
    double worst = 0.0;
    for (int m = -M / 4; m < M / 4; ++m) worst = std::max(worst, std::abs(d.at({m}) - cplx(0.0, phi(m))));
    CHECK(worst < (M == 16 ? 1e-2 : 1e-3));
  }
  CHECK(partial_spectral(make_zero(BoxSpec::make(2, 8)), 2).is_zero());
  CHECK_THROWS_AS(partial_spectral(make_zero(BoxSpec::make(2, 8)), 3), DomainError);
  CHECK_THROWS_AS(partial_spectral(make_zero(BoxSpec::make(2, 8)), 0), DomainError);
}

TEST_CASE("kernel values") {
  CHECK(std::abs(phi(0) - 4.0 / kPi) < 1e-15);
  auto w = wrapped_kernel(8, 0);
  for (auto z : w) CHECK(z.real() == 0.0);
}

TEST_CASE("partial_convolution examples") {
  auto c = partial_convolution(make_delta(BoxSpec::make(1, 128), {0}), 1);
  CHECK(std::abs(c.at({1}) - cplx(0.0, -4.0 / (3.0 * kPi))) < 1e-3);
  CHECK(partial_convolution(make_zero(BoxSpec::make(1, 16)), 1).is_zero());
  CHECK_THROWS_AS(partial_convolution(make_zero(BoxSpec::make(1, 16)), 2), DomainError);

  BoxSpec box = BoxSpec::make(1, 256);
  auto g = make_gaussian(box, 4.0, 1.0);
  double err = l2_distance(partial_convolution(g, 1).values(), partial_spectral(g, 1).values()) / l2_norm(g);
  CHECK(err < 1e-3);

  // Summing every periodic image makes the convolution the exact periodic operator.
  auto exact = partial_convolution(g, 1, kAllAliasImages);
  CHECK(l2_distance(exact.values(), partial_spectral(g, 1).values()) / l2_norm(g) < 1e-13);
}

TEST_CASE("closed-form alias sum matches a long explicit image sum") {
  const int M = 32;
  auto exact = wrapped_kernel(M, kAllAliasImages);
  for (int a = -M / 2; a < M / 2; ++a) {
    double s = 0.0;
    for (int n = -200000; n <= 200000; ++n) s += phi(a + static_cast<double>(n) * M);
    CHECK(std::abs(exact[a + M / 2].imag() - s) < 1e-6);
  }
}

TEST_CASE("partial convolution in higher dimension acts along one axis") {
  BoxSpec box = BoxSpec::make(2, 16);
  auto u = make_random(box, 3);
  for (int axis = 1; axis <= 2; ++axis) {
    auto a = partial_convolution(u, axis, kAllAliasImages);
    auto b = partial_spectral(u, axis);
    CHECK(rel(a, b) < 1e-13);
  }
}

TEST_CASE("difference operator") {
  BoxSpec box = BoxSpec::make(1, 16);
  auto d = difference_D(make_delta(box, {0}), 1);
  CHECK(d.at({-1}) == cplx(1.0, 0.0));
  CHECK(d.at({0}) == cplx(-1.0, 0.0));
  double rest = 0.0;
  for (int m = -8; m < 8; ++m)
    if (m != 0 && m != -1) rest += std::abs(d.at({m}));
  CHECK(rest == 0.0);
  Field ones(box.sites(), cplx(2.0, -1.0));
  CHECK(difference_D(LatticeFunction(box, ones), 1).is_zero());
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto u = make_random(BoxSpec::make(3, 8), s);
    for (int j = 1; j <= 3; ++j) CHECK(l2_norm(difference_D(u, j)) <= 2.0 * l2_norm(u) + 1e-14);
  }
}

TEST_CASE("sum |partial_j u|^2 equals sum |D_j u|^2") {
  for (int d = 1; d <= 3; ++d) {
    BoxSpec box = BoxSpec::make(d, d == 3 ? 8 : 32);
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto u = make_random(box, 100 + s);
      for (int j = 1; j <= d; ++j) {
        double a = std::pow(l2_norm(partial_spectral(u, j)), 2);
        double b = std::pow(l2_norm(difference_D(u, j)), 2);
        CHECK(std::abs(a - b) < 1e-12 * b);
        CHECK(std::sqrt(a) <= 2.0 * l2_norm(u) + 1e-13);
      }
    }
  }
}

TEST_CASE("laplacian forms") {
  // Oracle: inverse transform of -K by midpoint quadrature over the torus.
  const int Q = 4096;
  for (int m = -3; m <= 3; ++m) {
    double s = 0.0;
    for (int q = 0; q < Q; ++q) {
      double xi = 2.0 * kPi * (q + 0.5) / Q;
      s += -(2.0 - 2.0 * std::cos(xi)) * std::cos(m * xi);
    }
    s /= Q;
    auto lap = laplacian(make_delta(BoxSpec::make(1, 16), {0}));
    CHECK(std::abs(lap.at({m}) - s) < 1e-12);
  }
  auto lap = laplacian(make_delta(BoxSpec::make(1, 16), {0}));
  CHECK(lap.at({0}) == cplx(-2.0, 0.0));
  CHECK(lap.at({1}) == cplx(1.0, 0.0));
  CHECK(lap.at({-1}) == cplx(1.0, 0.0));

  BoxSpec box = BoxSpec::make(2, 16);
  Field c(box.sites(), cplx(1.5, 0.5));
  CHECK(laplacian(LatticeFunction(box, c)).is_zero());
  CHECK(l2_norm(laplacian(LatticeFunction(box, c), LaplacianForm::Spectral)) < 1e-13);

  for (int d = 1; d <= 3; ++d) {
    BoxSpec b = BoxSpec::make(d, d == 3 ? 8 : 32);
    for (std::uint64_t s = 0; s < 10; ++s) {
      auto u = make_random(b, s);
      auto st = laplacian(u, LaplacianForm::Stencil);
      CHECK(rel(laplacian(u, LaplacianForm::Spectral), st) < 1e-12);
      LatticeFunction comp = make_zero(b);
      for (int j = 1; j <= d; ++j) comp = comp + partial_spectral(partial_spectral(u, j), j);
      CHECK(rel(comp, st) < 1e-12);
    }
  }
}

TEST_CASE("free propagator") {
  BoxSpec box = BoxSpec::make(1, 512);
  auto u0 = make_gaussian(box, 3.0, cplx(1.0, 0.5));
  CHECK(propagate_free(u0, 0.0).field() == u0.field());

  // |u(0,5)| against the torus integral (1/2pi) int exp(i 5 cos xi) dxi, by periodic trapezoid.
  auto d = propagate_free(make_delta(box, {0}), 5.0);
  const int Q = 20000;
  cplx s(0.0, 0.0);
  for (int q = 0; q < Q; ++q) s += std::polar(1.0, 5.0 * std::cos(2.0 * kPi * q / Q));
  s /= double(Q);
  CHECK(std::abs(std::abs(d.at({0})) - std::abs(s)) < 1e-6);
  CHECK(std::abs(l2_norm(d) - 1.0) < 1e-12);
  for (double t : {0.3, 7.0, -2.5}) CHECK(std::abs(l2_norm(propagate_free(make_delta(box, {0}), t)) - 1.0) < 1e-12);

  for (int dim = 1; dim <= 3; ++dim) {
    BoxSpec b = BoxSpec::make(dim, dim == 3 ? 8 : 32);
    auto u = make_random(b, 77 + dim);
    auto a = propagate_free(propagate_free(u, 0.7), 1.1);
    auto c = propagate_free(u, 1.8);
    CHECK(rel(a, c) < 1e-12);
    CHECK(rel(propagate_free(propagate_free(u, 2.3), -2.3), u) < 1e-12);
    CHECK(std::abs(l2_norm(propagate_free(u, 4.2)) - l2_norm(u)) < 1e-12 * l2_norm(u));
  }
}

TEST_CASE("propagator solves the free equation i u_t + Delta u / 2 = 0") {
  // Central difference in time against the stencil Laplacian distinguishes the sign of the symbol.
  BoxSpec box = BoxSpec::make(1, 64);
  auto u0 = make_gaussian(box, 2.0, 1.0);
  const double t = 0.4, h = 1e-4;
  auto up = propagate_free(u0, t + h);
  auto um = propagate_free(u0, t - h);
  auto u = propagate_free(u0, t);
  auto ut = (up - um) * cplx(1.0 / (2.0 * h), 0.0);
  auto residual = ut * cplx(0.0, 1.0) + laplacian(u) * cplx(0.5, 0.0);
  CHECK(l2_norm(residual) < 1e-6 * l2_norm(u0));
  // The opposite sign convention fails the same check by an O(1) margin.
  auto wrong = ut * cplx(0.0, -1.0) + laplacian(u) * cplx(0.5, 0.0);
  CHECK(l2_norm(wrong) > 0.1 * l2_norm(laplacian(u)));
}

TEST_CASE("multiplier cache reuses symbols") {
  auto& cache = MultiplierCache::instance();
  BoxSpec box = BoxSpec::make(1, 64);
  auto a = cache.get(box, MultiplierCache::Op::Propagator, 0, 0.25);
  auto b = cache.get(box, MultiplierCache::Op::Propagator, 0, 0.25 + 1e-14);
  CHECK(a.get() == b.get());
  auto c = cache.get(box, MultiplierCache::Op::Propagator, 0, 0.25 + 1e-11);
  CHECK(a.get() != c.get());
  auto K = symbol_K(box);
  CHECK(K[0] == cplx(0.0, 0.0));
  CHECK(std::abs(K[32] - 4.0) < 1e-15);
  auto P = symbol_partial(BoxSpec::make(2, 8), 2);
  CHECK(std::abs(P[1] - cplx(0.0, 2.0 * std::sin(kPi / 8))) < 1e-15);
  CHECK(P[8] == cplx(0.0, 0.0));
}
