#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>

#include "dnls/errors.hpp"
#include "dnls/frechet.hpp"

namespace dnls {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

}  // namespace

MajorantReport majorant_radius(double K, double C0, double C1, int n_max) {
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("majorant constant K must be positive");
  if (!(C0 >= 0.0) || !(C1 > 0.0) || !std::isfinite(C0) || !std::isfinite(C1))
    throw DomainError("majorant seeds need C0 >= 0 and C1 > 0");
  if (n_max < 2 || n_max > 60) throw DomainError("majorant table length must lie in 2..60");

  const Big k(K);
  std::vector<Big> C(n_max + 1, Big(0));
  C[0] = Big(C0);
  C[1] = Big(C1);
  for (int m = 2; m <= n_max; ++m) {
    Big s(0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; a + b <= m; ++b) {
        const int c = m - a - b;
        if (b >= m || c >= m) continue;
        s += C[a] * C[b] * C[c];
      }
    C[m] = k * s;
  }

  MajorantReport rep;
  for (int m = 0; m <= n_max; ++m) {
    rep.coefficients.push_back(static_cast<double>(C[m]));
    rep.coefficients_text.push_back(C[m].str(40, std::ios_base::scientific));
  }
  std::vector<int> nonzero;
  for (int m = 1; m <= n_max; ++m)
    if (C[m] > 0) nonzero.push_back(m);
  for (int m = 1; m <= n_max; ++m)
    rep.root_test.push_back(C[m] > 0 ? static_cast<double>(boost::multiprecision::pow(C[m], Big(-1.0 / m))) : 0.0);
  int period = 0;
  for (std::size_t i = 1; i < nonzero.size(); ++i) period = std::gcd(period, nonzero[i] - nonzero[i - 1]);
  rep.period = period > 0 ? period : 1;
  rep.root_test_estimate = nonzero.empty() ? 0.0 : rep.root_test[nonzero.back() - 1];

  // C_k / C_{k-s} ~ R^{-s} (1 - 3/(2k))^s near a square-root branch point; fit the s-th root against 1/k.
  std::vector<double> x, y;
  for (int m : nonzero) {
    if (m < n_max / 2 || m - rep.period < 1 || !(C[m - rep.period] > 0)) continue;
    Big r = C[m] / C[m - rep.period];
    x.push_back(1.0 / m);
    y.push_back(static_cast<double>(boost::multiprecision::pow(r, Big(1.0 / rep.period))));
  }
  if (x.size() >= 2) {
    const double nn = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / nn;
    rep.radius_estimate = intercept > 0.0 ? 1.0 / intercept : 0.0;
  } else {
    rep.radius_estimate = rep.root_test_estimate;
  }

  const double A = 1.0 + 3.0 * K * C0 * C0, B = K, Cc = C1, D = C0 + 2.0 * K * C0 * C0 * C0;
  const double top = (2.0 * A / 3.0) * std::sqrt(A / (3.0 * B));
  rep.implicit_radius = top > D ? (top - D) / Cc : 0.0;
  return rep;
}

}  // namespace dnls
