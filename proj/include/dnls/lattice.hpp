#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;
using Field = std::vector<cplx>;

/// Centered periodic box {-M/2, ..., M/2-1}^d standing in for the lattice Z^d.
struct BoxSpec {
  int d = 1;
  int M = 4;

  static BoxSpec make(int d, int M);
  void validate() const;

  std::size_t sites() const;
  int half() const { return M / 2; }
  // Row-major stride of axis j (0-based).
  std::size_t stride(int axis) const;

  // Coordinates of site `index`, written into out[0..d).
  void coords(std::size_t index, std::array<int, 3>& out) const;
  std::size_t index_of(std::span<const int> coords) const;
  bool contains(std::span<const int> coords) const;

  friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

class LatticeFunction {
 public:
  explicit LatticeFunction(BoxSpec box);
  // Rejects wrong value counts and non-finite entries.
  LatticeFunction(BoxSpec box, Field values);

  const BoxSpec& box() const { return box_; }
  std::span<const cplx> values() const { return values_; }
  const Field& field() const { return values_; }
  std::size_t size() const { return values_.size(); }

  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx at(std::span<const int> coords) const { return values_[box_.index_of(coords)]; }
  cplx at(std::initializer_list<int> coords) const;

  LatticeFunction operator+(const LatticeFunction& o) const;
  LatticeFunction operator-(const LatticeFunction& o) const;
  LatticeFunction operator*(cplx c) const;
  friend LatticeFunction operator*(cplx c, const LatticeFunction& u) { return u * c; }

  bool is_zero() const;
  // FNV-1a over the raw value bytes and the box shape.
  std::uint64_t content_hash() const;

 private:
  BoxSpec box_;
  Field values_;
};

struct WeightedNormSpec {
  double p = 2.0;  // +infinity selects the sup norm
  double alpha = 0.0;
};

LatticeFunction make_zero(const BoxSpec& box);
LatticeFunction make_delta(const BoxSpec& box, std::span<const int> site);
LatticeFunction make_delta(const BoxSpec& box, std::initializer_list<int> site);
LatticeFunction make_gaussian(const BoxSpec& box, double width, cplx amplitude);
// Gaussian centered at an arbitrary real point with a per-site plane-wave phase exp(i k.m).
LatticeFunction make_gaussian(const BoxSpec& box, double width, cplx amplitude, std::span<const double> center,
                              std::span<const double> wavevector);
// Independent real and imaginary parts uniform on [-1, 1).
LatticeFunction make_random(const BoxSpec& box, std::uint64_t seed, std::uint64_t stream = 0);
// make_random times a unit gaussian envelope of the given width centered at the origin.
LatticeFunction make_localized_random(const BoxSpec& box, std::uint64_t seed, std::uint64_t stream, double width);

double weighted_norm(const LatticeFunction& u, const WeightedNormSpec& spec);
double l2_norm(const LatticeFunction& u);
double lp_norm(const LatticeFunction& u, double p);
double sup_norm(const LatticeFunction& u);
double boundary_mass_fraction(const LatticeFunction& u, int shell_width);
int default_shell_width(const BoxSpec& box);

// Norm kernels on raw storage, shared by the solvers.
double l2_norm(std::span<const cplx> v);
double l2_distance(std::span<const cplx> a, std::span<const cplx> b);
double lp_norm(std::span<const cplx> v, double p);
double sup_norm(std::span<const cplx> v);
bool all_finite(std::span<const cplx> v);

}  // namespace dnls
