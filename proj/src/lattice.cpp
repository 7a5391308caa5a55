#include "dnls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "dnls/errors.hpp"
#include "dnls/rng.hpp"

namespace dnls {

BoxSpec BoxSpec::make(int d, int M) {
  BoxSpec b{d, M};
  b.validate();
  return b;
}

void BoxSpec::validate() const {
  if (d < 1 || d > 3) throw DomainError("box dimension must be 1, 2 or 3, got " + std::to_string(d));
  if (M < 4 || M % 2 != 0) throw DomainError("box side must be even and at least 4, got " + std::to_string(M));
}

std::size_t BoxSpec::sites() const {
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(M);
  return n;
}

std::size_t BoxSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int j = axis + 1; j < d; ++j) s *= static_cast<std::size_t>(M);
  return s;
}

void BoxSpec::coords(std::size_t index, std::array<int, 3>& out) const {
  for (int j = d - 1; j >= 0; --j) {
    out[j] = static_cast<int>(index % M) - M / 2;
    index /= M;
  }
}

bool BoxSpec::contains(std::span<const int> c) const {
  if (static_cast<int>(c.size()) != d) return false;
  return std::all_of(c.begin(), c.end(), [&](int m) { return m >= -M / 2 && m < M / 2; });
}

std::size_t BoxSpec::index_of(std::span<const int> c) const {
  if (!contains(c)) throw DomainError("site outside the box");
  std::size_t idx = 0;
  for (int j = 0; j < d; ++j) idx = idx * M + static_cast<std::size_t>(c[j] + M / 2);
  return idx;
}

LatticeFunction::LatticeFunction(BoxSpec box) : box_(box) {
  box_.validate();
  values_.assign(box_.sites(), cplx(0.0, 0.0));
}

LatticeFunction::LatticeFunction(BoxSpec box, Field values) : box_(box), values_(std::move(values)) {
  box_.validate();
  if (values_.size() != box_.sites())
    throw DomainError("value count " + std::to_string(values_.size()) + " does not match box size " +
                      std::to_string(box_.sites()));
  if (!all_finite(values_)) throw NumericalError("lattice function contains non-finite values");
}

cplx LatticeFunction::at(std::initializer_list<int> c) const {
  return at(std::span<const int>(c.begin(), c.size()));
}

LatticeFunction LatticeFunction::operator+(const LatticeFunction& o) const {
  if (!(box_ == o.box_)) throw DomainError("box mismatch in addition");
  Field out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] + o.values_[i];
  return LatticeFunction(box_, std::move(out));
}

LatticeFunction LatticeFunction::operator-(const LatticeFunction& o) const {
  if (!(box_ == o.box_)) throw DomainError("box mismatch in subtraction");
  Field out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] - o.values_[i];
  return LatticeFunction(box_, std::move(out));
}

LatticeFunction LatticeFunction::operator*(cplx c) const {
  Field out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * values_[i];
  return LatticeFunction(box_, std::move(out));
}

bool LatticeFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](cplx z) { return z == cplx(0.0, 0.0); });
}

std::uint64_t LatticeFunction::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  feed(&box_.d, sizeof box_.d);
  feed(&box_.M, sizeof box_.M);
  feed(values_.data(), values_.size() * sizeof(cplx));
  return h;
}

LatticeFunction make_zero(const BoxSpec& box) { return LatticeFunction(box); }

LatticeFunction make_delta(const BoxSpec& box, std::span<const int> site) {
  box.validate();
  if (!box.contains(site)) throw DomainError("delta site outside the box");
  Field v(box.sites(), cplx(0.0, 0.0));
  v[box.index_of(site)] = 1.0;
  return LatticeFunction(box, std::move(v));
}

LatticeFunction make_delta(const BoxSpec& box, std::initializer_list<int> site) {
  return make_delta(box, std::span<const int>(site.begin(), site.size()));
}

LatticeFunction make_gaussian(const BoxSpec& box, double width, cplx amplitude) {
  return make_gaussian(box, width, amplitude, {}, {});
}

LatticeFunction make_gaussian(const BoxSpec& box, double width, cplx amplitude, std::span<const double> center,
                              std::span<const double> wavevector) {
  box.validate();
  if (!(width > 0.0)) throw DomainError("gaussian width must be positive");
  if (!center.empty() && static_cast<int>(center.size()) != box.d) throw DomainError("center has wrong dimension");
  if (!wavevector.empty() && static_cast<int>(wavevector.size()) != box.d)
    throw DomainError("wavevector has wrong dimension");
  Field v(box.sites());
  std::array<int, 3> c{};
  const double inv = 1.0 / (2.0 * width * width);
  for (std::size_t i = 0; i < v.size(); ++i) {
    box.coords(i, c);
    double r2 = 0.0, phase = 0.0;
    for (int j = 0; j < box.d; ++j) {
      double x = c[j] - (center.empty() ? 0.0 : center[j]);
      r2 += x * x;
      if (!wavevector.empty()) phase += wavevector[j] * c[j];
    }
    v[i] = amplitude * std::exp(-r2 * inv) * std::polar(1.0, phase);
  }
  return LatticeFunction(box, std::move(v));
}

LatticeFunction make_random(const BoxSpec& box, std::uint64_t seed, std::uint64_t stream) {
  box.validate();
  CounterRng rng(seed, stream);
  Field v(box.sites());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(rng.symmetric(2 * i), rng.symmetric(2 * i + 1));
  return LatticeFunction(box, std::move(v));
}

LatticeFunction make_localized_random(const BoxSpec& box, std::uint64_t seed, std::uint64_t stream, double width) {
  Field f = make_random(box, seed, stream).field();
  const LatticeFunction g = make_gaussian(box, width, cplx(1.0, 0.0));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= g[i];
  return LatticeFunction(box, std::move(f));
}

bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double l2_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (cplx z : v) s += std::norm(z);
  return std::sqrt(s);
}

double l2_distance(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DomainError("size mismatch in distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

double sup_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (cplx z : v) s = std::max(s, std::abs(z));
  return s;
}

double lp_norm(std::span<const cplx> v, double p) {
  if (!(p > 0.0)) throw DomainError("norm exponent must be positive");
  if (std::isinf(p)) return sup_norm(v);
  if (p == 2.0) return l2_norm(v);
  double s = 0.0;
  for (cplx z : v) s += std::pow(std::abs(z), p);
  return std::pow(s, 1.0 / p);
}

double weighted_norm(const LatticeFunction& u, const WeightedNormSpec& spec) {
  if (!(spec.p > 0.0)) throw DomainError("norm exponent must be positive");
  if (spec.alpha == 0.0) return lp_norm(u.values(), spec.p);
  const BoxSpec& box = u.box();
  std::array<int, 3> c{};
  const bool sup = std::isinf(spec.p);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    box.coords(i, c);
    double r2 = 0.0;
    for (int j = 0; j < box.d; ++j) r2 += static_cast<double>(c[j]) * c[j];
    double bracket = std::sqrt(1.0 + r2);
    double a = std::abs(u[i]);
    if (sup)
      s = std::max(s, a * std::pow(bracket, spec.alpha));
    else
      s += std::pow(a, spec.p) * std::pow(bracket, spec.alpha * spec.p);
  }
  return sup ? s : std::pow(s, 1.0 / spec.p);
}

double l2_norm(const LatticeFunction& u) { return l2_norm(u.values()); }
double lp_norm(const LatticeFunction& u, double p) { return lp_norm(u.values(), p); }
double sup_norm(const LatticeFunction& u) { return sup_norm(u.values()); }

int default_shell_width(const BoxSpec& box) { return std::max(1, box.M / 16); }

double boundary_mass_fraction(const LatticeFunction& u, int shell_width) {
  const BoxSpec& box = u.box();
  if (shell_width < 0 || shell_width >= box.M / 2) throw DomainError("shell width must lie in [0, M/2)");
  const int lo = -box.M / 2 + shell_width;
  const int hi = box.M / 2 - shell_width;
  std::array<int, 3> c{};
  double total = 0.0, shell = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double w = std::norm(u[i]);
    total += w;
    box.coords(i, c);
    bool in_shell = false;
    for (int j = 0; j < box.d; ++j)
      if (c[j] < lo || c[j] >= hi) in_shell = true;
    if (in_shell) shell += w;
  }
  if (total == 0.0) return 0.0;
  return shell / total;
}

}  // namespace dnls
