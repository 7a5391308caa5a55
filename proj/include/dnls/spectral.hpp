#pragma once

#include <memory>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

/// Dual torus grid: xi_k = 2 pi k / M, k = 0..M-1 on every axis.
struct TorusGrid {
  BoxSpec box;

  double xi(int k) const;
  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

/// A symbol sampled on the torus grid, stored row-major over (k_1, ..., k_d).
/// Also used to carry the spectrum of a lattice function.
class Multiplier {
 public:
  explicit Multiplier(TorusGrid grid);
  Multiplier(TorusGrid grid, Field values);

  const TorusGrid& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  const Field& field() const { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }

 private:
  TorusGrid grid_;
  Field values_;
};

using Spectrum = Multiplier;

// Spectrum F(u)(xi_k) = sum_m u(m) exp(-i m . xi_k) in centered site coordinates.
Spectrum forward_transform(const LatticeFunction& u);
LatticeFunction inverse_transform(const Spectrum& s);

Multiplier symbol_partial(const BoxSpec& box, int axis);
Multiplier symbol_K(const BoxSpec& box);
// exp(-i t K / 2), the multiplier of exp(i t Delta / 2) on the grid.
Multiplier symbol_propagator(const BoxSpec& box, double t);

LatticeFunction apply_multiplier(const LatticeFunction& u, const Multiplier& m);

// Axes are numbered 1..d throughout this header.
LatticeFunction partial_spectral(const LatticeFunction& u, int axis);

// Number of periodic images added to the sampled kernel on each side when wrapping it onto the box.
// A negative value selects the closed-form sum over all images.
inline constexpr int kDefaultAliasImages = 2;
inline constexpr int kAllAliasImages = -1;

std::vector<cplx> wrapped_kernel(int M, int alias_images);
LatticeFunction partial_convolution(const LatticeFunction& u, int axis, int alias_images = kDefaultAliasImages);

LatticeFunction difference_D(const LatticeFunction& u, int axis);

enum class LaplacianForm { Stencil, Spectral };
LatticeFunction laplacian(const LatticeFunction& u, LaplacianForm form = LaplacianForm::Stencil);

LatticeFunction propagate_free(const LatticeFunction& u0, double t);

/// Process-wide cache of symbols keyed by (d, M, operator, axis, t quantized at 1e-12).
/// Bounded by total bytes; the oldest entries are evicted first.
class MultiplierCache {
 public:
  enum class Op { Partial, K, Propagator };
  using Symbol = std::shared_ptr<const Field>;

  static MultiplierCache& instance();

  Symbol get(const BoxSpec& box, Op op, int axis = 0, double t = 0.0);
  void clear();
  std::size_t entries() const;
  std::size_t hits() const;
  std::size_t misses() const;
  void set_byte_budget(std::size_t bytes);

 private:
  MultiplierCache() = default;
  struct Impl;
  Impl& impl() const;
};

namespace kernels {

// Raw in-place kernels over stored values; used by the time steppers.
void apply_propagator(const BoxSpec& box, Field& u, double t);
// Multiplies a native-order spectrum by exp(i s K / 2) without the cache (s may vary per call).
void rotate_spectrum(const BoxSpec& box, const cplx* K, cplx* spec, double s);
void laplacian_stencil(const BoxSpec& box, const cplx* u, cplx* out);
void difference(const BoxSpec& box, const cplx* u, cplx* out, int axis0);
void partial(const BoxSpec& box, const cplx* u, cplx* out, int axis0);

}  // namespace kernels

}  // namespace dnls
