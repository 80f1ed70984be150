#pragma once

#include <span>

namespace sphgraph::detail {

inline constexpr int tri_index(int l, int m) { return l * (l + 1) / 2 + m; }
inline constexpr int tri_count(int lmax) { return (lmax + 1) * (lmax + 2) / 2; }

/// Orthonormal associated Legendre values lambda_lm(cos theta) with the
/// Condon-Shortley phase, 0 <= m <= l <= lmax, stored at tri_index(l, m).
/// Y_lm(theta, phi) = lambda_lm(cos theta) e^{i m phi}.
void normalized_legendre(double cos_theta, double sin_theta, int lmax, std::span<double> out);

}  // namespace sphgraph::detail
