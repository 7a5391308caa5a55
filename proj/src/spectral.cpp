#include "dnls/spectral.hpp"

#include <cmath>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "dnls/errors.hpp"
#include "dnls/fft.hpp"

namespace dnls {

namespace {

void check_axis(const BoxSpec& box, int axis) {
  if (axis < 1 || axis > box.d)
    throw DomainError("axis " + std::to_string(axis) + " out of range 1.." + std::to_string(box.d));
}

// (-1)^(k_1 + ... + k_d) relates the transform of stored values (index n = m + M/2)
// to the transform in centered coordinates.
void apply_centering_phase(const BoxSpec& box, Field& s) {
  const int M = box.M;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t idx = i;
    int parity = 0;
    for (int j = 0; j < box.d; ++j) {
      parity += static_cast<int>(idx % M);
      idx /= M;
    }
    if (parity & 1) s[i] = -s[i];
  }
}

Field compute_K(const BoxSpec& box) {
  const int M = box.M;
  std::vector<double> axis_term(M);
  for (int k = 0; k < M; ++k) axis_term[k] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / M);
  Field K(box.sites());
  for (std::size_t i = 0; i < K.size(); ++i) {
    std::size_t idx = i;
    double s = 0.0;
    for (int j = 0; j < box.d; ++j) {
      s += axis_term[idx % M];
      idx /= M;
    }
    K[i] = s;
  }
  return K;
}

Field compute_partial(const BoxSpec& box, int axis0) {
  const int M = box.M;
  const std::size_t stride = box.stride(axis0);
  Field P(box.sites());
  for (std::size_t i = 0; i < P.size(); ++i) {
    int k = static_cast<int>((i / stride) % M);
    P[i] = cplx(0.0, 2.0 * std::sin(std::numbers::pi * k / M));
  }
  return P;
}

Field compute_propagator(const Field& K, double t) {
  Field E(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) E[i] = std::polar(1.0, -0.5 * t * K[i].real());
  return E;
}

}  // namespace

double TorusGrid::xi(int k) const { return 2.0 * std::numbers::pi * k / box.M; }

Multiplier::Multiplier(TorusGrid grid) : grid_(grid), values_(grid.box.sites(), cplx(0.0, 0.0)) {}

Multiplier::Multiplier(TorusGrid grid, Field values) : grid_(grid), values_(std::move(values)) {
  grid_.box.validate();
  if (values_.size() != grid_.box.sites()) throw DomainError("multiplier value count does not match grid");
  if (!all_finite(values_)) throw NumericalError("multiplier contains non-finite values");
}

Spectrum forward_transform(const LatticeFunction& u) {
  Field s = u.field();
  fft::forward(u.box(), s.data());
  apply_centering_phase(u.box(), s);
  return Spectrum(TorusGrid{u.box()}, std::move(s));
}

LatticeFunction inverse_transform(const Spectrum& spec) {
  const BoxSpec& box = spec.grid().box;
  Field v = spec.field();
  apply_centering_phase(box, v);
  fft::backward(box, v.data());
  const double scale = 1.0 / static_cast<double>(box.sites());
  for (auto& z : v) z *= scale;
  return LatticeFunction(box, std::move(v));
}

Multiplier symbol_partial(const BoxSpec& box, int axis) {
  check_axis(box, axis);
  return Multiplier(TorusGrid{box}, *MultiplierCache::instance().get(box, MultiplierCache::Op::Partial, axis));
}

Multiplier symbol_K(const BoxSpec& box) {
  return Multiplier(TorusGrid{box}, *MultiplierCache::instance().get(box, MultiplierCache::Op::K));
}

Multiplier symbol_propagator(const BoxSpec& box, double t) {
  return Multiplier(TorusGrid{box}, *MultiplierCache::instance().get(box, MultiplierCache::Op::Propagator, 0, t));
}

LatticeFunction apply_multiplier(const LatticeFunction& u, const Multiplier& m) {
  if (!(m.grid().box == u.box())) throw DomainError("multiplier grid does not match the lattice function box");
  Field v = u.field();
  fft::apply_symbol(u.box(), v.data(), m.field().data());
  return LatticeFunction(u.box(), std::move(v));
}

LatticeFunction partial_spectral(const LatticeFunction& u, int axis) {
  check_axis(u.box(), axis);
  Field out(u.size());
  kernels::partial(u.box(), u.field().data(), out.data(), axis - 1);
  return LatticeFunction(u.box(), std::move(out));
}

std::vector<cplx> wrapped_kernel(int M, int alias_images) {
  // Entry a + M/2 holds the wrapped kernel at offset a in {-M/2, ..., M/2-1}.
  std::vector<cplx> w(M);
  const double pi = std::numbers::pi;
  for (int a = -M / 2; a < M / 2; ++a) {
    double im = 0.0;
    if (alias_images < 0) {
      auto cot = [](double x) { return std::cos(x) / std::sin(x); };
      im = -(cot(pi * (2.0 * a - 1.0) / (2.0 * M)) - cot(pi * (2.0 * a + 1.0) / (2.0 * M))) / M;
    } else {
      for (int n = -alias_images; n <= alias_images; ++n) {
        double b = a + static_cast<double>(n) * M;
        im += -4.0 / (pi * (4.0 * b * b - 1.0));
      }
    }
    w[a + M / 2] = cplx(0.0, im);
  }
  return w;
}

LatticeFunction partial_convolution(const LatticeFunction& u, int axis, int alias_images) {
  const BoxSpec& box = u.box();
  check_axis(box, axis);
  const int M = box.M;
  const std::size_t stride = box.stride(axis - 1);
  const std::vector<cplx> w = wrapped_kernel(M, alias_images);
  const Field& in = u.field();
  Field out(in.size(), cplx(0.0, 0.0));
  std::vector<cplx> line(M), res(M);
  const std::size_t n = in.size();
  for (std::size_t base = 0; base < n; ++base) {
    if ((base / stride) % M != 0) continue;
    for (int i = 0; i < M; ++i) line[i] = in[base + i * stride];
    for (int i = 0; i < M; ++i) {
      cplx acc(0.0, 0.0);
      for (int k = 0; k < M; ++k) {
        int a = ((i - k) % M + M) % M;  // offset mod M, mapped into the centered range
        if (a >= M / 2) a -= M;
        acc += line[k] * w[a + M / 2];
      }
      res[i] = acc;
    }
    for (int i = 0; i < M; ++i) out[base + i * stride] = res[i];
  }
  return LatticeFunction(box, std::move(out));
}

LatticeFunction difference_D(const LatticeFunction& u, int axis) {
  check_axis(u.box(), axis);
  Field out(u.size());
  kernels::difference(u.box(), u.field().data(), out.data(), axis - 1);
  return LatticeFunction(u.box(), std::move(out));
}

LatticeFunction laplacian(const LatticeFunction& u, LaplacianForm form) {
  const BoxSpec& box = u.box();
  Field out(u.size());
  if (form == LaplacianForm::Stencil) {
    kernels::laplacian_stencil(box, u.field().data(), out.data());
  } else {
    auto K = MultiplierCache::instance().get(box, MultiplierCache::Op::K);
    out = u.field();
    Field negK(K->size());
    for (std::size_t i = 0; i < negK.size(); ++i) negK[i] = -(*K)[i];
    fft::apply_symbol(box, out.data(), negK.data());
  }
  return LatticeFunction(box, std::move(out));
}

LatticeFunction propagate_free(const LatticeFunction& u0, double t) {
  if (!std::isfinite(t)) throw DomainError("propagation time must be finite");
  if (t == 0.0) return u0;
  Field v = u0.field();
  kernels::apply_propagator(u0.box(), v, t);
  return LatticeFunction(u0.box(), std::move(v));
}

namespace kernels {

void apply_propagator(const BoxSpec& box, Field& u, double t) {
  auto E = MultiplierCache::instance().get(box, MultiplierCache::Op::Propagator, 0, t);
  fft::apply_symbol(box, u.data(), E->data());
}

void rotate_spectrum(const BoxSpec& box, const cplx* K, cplx* spec, double s) {
  const std::size_t n = box.sites();
  for (std::size_t i = 0; i < n; ++i) spec[i] *= std::polar(1.0, 0.5 * s * K[i].real());
}

void laplacian_stencil(const BoxSpec& box, const cplx* u, cplx* out) {
  const std::size_t n = box.sites();
  const int M = box.M;
  for (std::size_t i = 0; i < n; ++i) out[i] = -2.0 * box.d * u[i];
  for (int j = 0; j < box.d; ++j) {
    const std::size_t s = box.stride(j);
    const std::size_t span = s * M;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t k = (i / s) % M;
      std::size_t up = (k + 1 == static_cast<std::size_t>(M)) ? i + s - span : i + s;
      std::size_t dn = (k == 0) ? i + span - s : i - s;
      out[i] += u[up] + u[dn];
    }
  }
}

void difference(const BoxSpec& box, const cplx* u, cplx* out, int axis0) {
  const std::size_t n = box.sites();
  const int M = box.M;
  const std::size_t s = box.stride(axis0);
  const std::size_t span = s * M;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = (i / s) % M;
    std::size_t up = (k + 1 == static_cast<std::size_t>(M)) ? i + s - span : i + s;
    out[i] = u[up] - u[i];
  }
}

void partial(const BoxSpec& box, const cplx* u, cplx* out, int axis0) {
  auto P = MultiplierCache::instance().get(box, MultiplierCache::Op::Partial, axis0 + 1);
  const std::size_t n = box.sites();
  std::copy(u, u + n, out);
  fft::apply_symbol(box, out, P->data());
}

}  // namespace kernels

struct MultiplierCache::Impl {
  using Key = std::tuple<int, int, int, int, long long>;
  mutable std::shared_mutex mu;
  std::map<Key, Symbol> entries;
  std::deque<Key> order;
  std::size_t bytes = 0;
  std::size_t budget = std::size_t(512) << 20;
  std::atomic<std::size_t> hits{0}, misses{0};
};

MultiplierCache& MultiplierCache::instance() {
  static MultiplierCache cache;
  return cache;
}

MultiplierCache::Impl& MultiplierCache::impl() const {
  static Impl state;
  return state;
}

MultiplierCache::Symbol MultiplierCache::get(const BoxSpec& box, Op op, int axis, double t) {
  box.validate();
  Impl& s = impl();
  long long tq = op == Op::Propagator ? std::llround(t * 1e12) : 0;
  Impl::Key key{box.d, box.M, static_cast<int>(op), axis, tq};
  {
    std::shared_lock lock(s.mu);
    auto it = s.entries.find(key);
    if (it != s.entries.end()) {
      ++s.hits;
      return it->second;
    }
  }
  Field values;
  switch (op) {
    case Op::Partial:
      if (axis < 1 || axis > box.d) throw DomainError("axis out of range for partial symbol");
      values = compute_partial(box, axis - 1);
      break;
    case Op::K:
      values = compute_K(box);
      break;
    case Op::Propagator:
      values = compute_propagator(*get(box, Op::K), static_cast<double>(tq) * 1e-12);
      break;
  }
  auto sym = std::make_shared<const Field>(std::move(values));
  std::unique_lock lock(s.mu);
  auto it = s.entries.find(key);
  if (it != s.entries.end()) return it->second;
  ++s.misses;
  const std::size_t size = sym->size() * sizeof(cplx);
  while (!s.order.empty() && s.bytes + size > s.budget) {
    auto victim = s.entries.find(s.order.front());
    s.bytes -= victim->second->size() * sizeof(cplx);
    s.entries.erase(victim);
    s.order.pop_front();
  }
  s.entries.emplace(key, sym);
  s.order.push_back(key);
  s.bytes += size;
  return sym;
}

void MultiplierCache::clear() {
  Impl& s = impl();
  std::unique_lock lock(s.mu);
  s.entries.clear();
  s.order.clear();
  s.bytes = 0;
}

std::size_t MultiplierCache::entries() const {
  std::shared_lock lock(impl().mu);
  return impl().entries.size();
}

std::size_t MultiplierCache::hits() const {
  std::shared_lock lock(impl().mu);
  return impl().hits;
}

std::size_t MultiplierCache::misses() const {
  std::shared_lock lock(impl().mu);
  return impl().misses;
}

void MultiplierCache::set_byte_budget(std::size_t bytes) {
  std::unique_lock lock(impl().mu);
  impl().budget = bytes;
}

}  // namespace dnls
