#include "dnls/wirtinger.hpp"

#include <algorithm>
#include <sstream>

#include "dnls/errors.hpp"

namespace dnls {

WirtingerPolynomial WirtingerPolynomial::monomial(Rational c, int a, int b) {
  if (a < 0 || b < 0) throw DomainError("Wirtinger monomial powers must be nonnegative");
  WirtingerPolynomial w;
  if (c != Rational(0)) w.terms_[{a, b}] = c;
  return w;
}

WirtingerPolynomial WirtingerPolynomial::power_nonlinearity(int p) {
  if (p < 1 || p % 2 == 0) throw DomainError("polynomial nonlinearity requires an odd positive integer p");
  return monomial(Rational(1), (p + 1) / 2, (p - 1) / 2);
}

WirtingerPolynomial WirtingerPolynomial::d_dz() const {
  WirtingerPolynomial w;
  for (const auto& [pw, c] : terms_)
    if (pw.first > 0) w += monomial(c * Rational(pw.first), pw.first - 1, pw.second);
  return w;
}

WirtingerPolynomial WirtingerPolynomial::d_dzbar() const {
  WirtingerPolynomial w;
  for (const auto& [pw, c] : terms_)
    if (pw.second > 0) w += monomial(c * Rational(pw.second), pw.first, pw.second - 1);
  return w;
}

WirtingerPolynomial& WirtingerPolynomial::operator+=(const WirtingerPolynomial& o) {
  for (const auto& [pw, c] : o.terms_) {
    auto it = terms_.find(pw);
    if (it == terms_.end()) {
      terms_.emplace(pw, c);
    } else {
      it->second += c;
      if (it->second == Rational(0)) terms_.erase(it);
    }
  }
  return *this;
}

WirtingerPolynomial WirtingerPolynomial::operator*(Rational c) const {
  WirtingerPolynomial w;
  if (c == Rational(0)) return w;
  for (const auto& [pw, v] : terms_) w.terms_.emplace(pw, v * c);
  return w;
}

int WirtingerPolynomial::max_z_power() const {
  int m = 0;
  for (const auto& [pw, c] : terms_) m = std::max(m, pw.first);
  return m;
}

int WirtingerPolynomial::max_zbar_power() const {
  int m = 0;
  for (const auto& [pw, c] : terms_) m = std::max(m, pw.second);
  return m;
}

cplx WirtingerPolynomial::evaluate(cplx z) const {
  cplx s(0.0, 0.0);
  const cplx zb = std::conj(z);
  for (const auto& [pw, c] : terms_) {
    cplx m(boost::rational_cast<double>(c), 0.0);
    for (int i = 0; i < pw.first; ++i) m *= z;
    for (int i = 0; i < pw.second; ++i) m *= zb;
    s += m;
  }
  return s;
}

std::string WirtingerPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [pw, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    if (pw.first) os << " z^" << pw.first;
    if (pw.second) os << " zbar^" << pw.second;
  }
  return os.str();
}

}  // namespace dnls
