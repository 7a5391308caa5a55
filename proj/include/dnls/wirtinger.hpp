#pragma once

#include <boost/rational.hpp>
#include <map>
#include <string>
#include <utility>

#include "dnls/lattice.hpp"

namespace dnls {

using Rational = boost::rational<long long>;

// Finite sum of c z^a conj(z)^b with exact rational coefficients.
class WirtingerPolynomial {
 public:
  using Powers = std::pair<int, int>;

  WirtingerPolynomial() = default;
  static WirtingerPolynomial monomial(Rational c, int a, int b);
  // |z|^{p-1} z = z^{(p+1)/2} conj(z)^{(p-1)/2}; p must be an odd positive integer.
  static WirtingerPolynomial power_nonlinearity(int p);

  WirtingerPolynomial d_dz() const;
  WirtingerPolynomial d_dzbar() const;

  WirtingerPolynomial& operator+=(const WirtingerPolynomial& o);
  WirtingerPolynomial operator*(Rational c) const;

  bool is_zero() const { return terms_.empty(); }
  const std::map<Powers, Rational>& terms() const { return terms_; }
  int max_z_power() const;
  int max_zbar_power() const;

  cplx evaluate(cplx z) const;
  std::string to_string() const;

  friend bool operator==(const WirtingerPolynomial&, const WirtingerPolynomial&) = default;

 private:
  std::map<Powers, Rational> terms_;
};

}  // namespace dnls
