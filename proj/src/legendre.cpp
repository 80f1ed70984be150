#include "legendre.hpp"

#include <cmath>
#include <numbers>

#include "sphgraph/errors.hpp"

namespace sphgraph::detail {

void normalized_legendre(double cos_theta, double sin_theta, int lmax, std::span<double> out) {
  out[0] = 0.5 / std::sqrt(std::numbers::pi);
  for (int m = 0; m <= lmax; ++m) {
    double mm = out[tri_index(m, m)];
    if (m > 0) {
      mm = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_theta * out[tri_index(m - 1, m - 1)];
      out[tri_index(m, m)] = mm;
    }
    if (m + 1 > lmax) break;
    double prev2 = mm;
    double prev1 = std::sqrt(2.0 * m + 3.0) * cos_theta * mm;
    out[tri_index(m + 1, m)] = prev1;
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double lm1 = l - 1.0;
      const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
      const double v = a * (cos_theta * prev1 - b * prev2);
      out[tri_index(l, m)] = v;
      prev2 = prev1;
      prev1 = v;
    }
  }
  for (int i = 0; i < tri_count(lmax); ++i) {
    if (!std::isfinite(out[i])) throw NumericalFailure("associated Legendre recurrence overflowed");
  }
}

}  // namespace sphgraph::detail
