#include "sphgraph/healpix.hpp"

#include <cmath>
#include <numbers>

#include "sphgraph/errors.hpp"

namespace sphgraph::healpix {
namespace {

constexpr int kJrll[12] = {2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4};
constexpr int kJpll[12] = {1, 3, 5, 7, 0, 2, 4, 6, 1, 3, 5, 7};

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v) + 0.5));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// De-interleave the even (x) and odd (y) bits of a nested in-face index.
void compress_bits(std::int64_t v, std::int64_t& ix, std::int64_t& iy) {
  ix = 0;
  iy = 0;
  for (int b = 0; b < 31; ++b) {
    ix |= ((v >> (2 * b)) & 1) << b;
    iy |= ((v >> (2 * b + 1)) & 1) << b;
  }
}

std::int64_t spread_bits(std::int64_t ix, std::int64_t iy) {
  std::int64_t v = 0;
  for (int b = 0; b < 31; ++b) {
    v |= ((ix >> b) & 1) << (2 * b);
    v |= ((iy >> b) & 1) << (2 * b + 1);
  }
  return v;
}

Vec3 from_z_phi(double z, double sin_theta, double phi) {
  return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), z};
}

}  // namespace

bool is_valid_nside(std::int64_t nside) noexcept {
  return nside >= 1 && nside <= (std::int64_t{1} << 29) && (nside & (nside - 1)) == 0;
}

Vec3 pix2vec_ring(std::int64_t nside, std::int64_t pix) {
  const std::int64_t npix = 12 * nside * nside;
  if (pix < 0 || pix >= npix) throw InvalidArgument("healpix: pixel index out of range");
  const std::int64_t ncap = 2 * nside * (nside - 1);
  const double fact2 = 4.0 / static_cast<double>(npix);
  constexpr double pi = std::numbers::pi;

  if (pix < ncap) {  // north polar cap
    const std::int64_t iring = (1 + isqrt(1 + 2 * pix)) >> 1;
    const std::int64_t iphi = pix + 1 - 2 * iring * (iring - 1);
    const double tmp = static_cast<double>(iring * iring) * fact2;
    const double z = 1.0 - tmp;
    const double phi = (static_cast<double>(iphi) - 0.5) * pi / (2.0 * static_cast<double>(iring));
    return from_z_phi(z, std::sqrt(tmp * (2.0 - tmp)), phi);
  }
  if (pix < npix - ncap) {  // equatorial belt
    const std::int64_t ip = pix - ncap;
    const std::int64_t iring = ip / (4 * nside) + nside;
    const std::int64_t iphi = ip % (4 * nside) + 1;
    const double fodd = ((iring + nside) & 1) ? 1.0 : 0.5;
    const double z = static_cast<double>(2 * nside - iring) * 2.0 / (3.0 * static_cast<double>(nside));
    const double phi = (static_cast<double>(iphi) - fodd) * pi / (2.0 * static_cast<double>(nside));
    return from_z_phi(z, std::sqrt((1.0 - z) * (1.0 + z)), phi);
  }
  // south polar cap
  const std::int64_t ip = npix - pix;
  const std::int64_t iring = (1 + isqrt(2 * ip - 1)) >> 1;
  const std::int64_t iphi = 4 * iring + 1 - (ip - 2 * iring * (iring - 1));
  const double tmp = static_cast<double>(iring * iring) * fact2;
  const double z = tmp - 1.0;
  const double phi = (static_cast<double>(iphi) - 0.5) * pi / (2.0 * static_cast<double>(iring));
  return from_z_phi(z, std::sqrt(tmp * (2.0 - tmp)), phi);
}

std::int64_t nest2ring(std::int64_t nside, std::int64_t pix) {
  const std::int64_t npface = nside * nside;
  const std::int64_t npix = 12 * npface;
  if (pix < 0 || pix >= npix) throw InvalidArgument("healpix: pixel index out of range");
  const std::int64_t ncap = 2 * nside * (nside - 1);
  const std::int64_t nl4 = 4 * nside;
  const int face = static_cast<int>(pix / npface);
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  compress_bits(pix % npface, ix, iy);

  const std::int64_t jr = kJrll[face] * nside - ix - iy - 1;
  std::int64_t nr = 0;
  std::int64_t n_before = 0;
  std::int64_t kshift = 0;
  if (jr < nside) {
    nr = jr;
    n_before = 2 * nr * (nr - 1);
  } else if (jr > 3 * nside) {
    nr = nl4 - jr;
    n_before = npix - 2 * (nr + 1) * nr;
  } else {
    nr = nside;
    n_before = ncap + (jr - nside) * nl4;
    kshift = (jr - nside) & 1;
  }
  std::int64_t jp = (kJpll[face] * nr + ix - iy + 1 + kshift) / 2;
  if (jp > nl4) jp -= nl4;
  if (jp < 1) jp += nl4;
  return n_before + jp - 1;
}

std::int64_t ring2nest(std::int64_t nside, std::int64_t pix) {
  const std::int64_t npface = nside * nside;
  const std::int64_t npix = 12 * npface;
  if (pix < 0 || pix >= npix) throw InvalidArgument("healpix: pixel index out of range");
  const std::int64_t ncap = 2 * nside * (nside - 1);
  const std::int64_t nl2 = 2 * nside;

  std::int64_t iring = 0;
  std::int64_t iphi = 0;
  std::int64_t kshift = 0;
  std::int64_t nr = 0;
  int face = 0;
  if (pix < ncap) {
    iring = (1 + isqrt(1 + 2 * pix)) >> 1;
    iphi = pix + 1 - 2 * iring * (iring - 1);
    kshift = 0;
    nr = iring;
    face = static_cast<int>((iphi - 1) / nr);
  } else if (pix < npix - ncap) {
    const std::int64_t ip = pix - ncap;
    const std::int64_t tmp = ip / (4 * nside);
    iring = tmp + nside;
    iphi = ip - tmp * 4 * nside + 1;
    kshift = (iring + nside) & 1;
    nr = nside;
    const std::int64_t ire = iring - nside + 1;
    const std::int64_t irm = nl2 + 2 - ire;
    const std::int64_t ifm = (iphi - ire / 2 + nside - 1) / nside;
    const std::int64_t ifp = (iphi - irm / 2 + nside - 1) / nside;
    if (ifp == ifm) {
      face = static_cast<int>(ifp == 4 ? 4 : ifp + 4);
    } else if (ifp < ifm) {
      face = static_cast<int>(ifp);
    } else {
      face = static_cast<int>(ifm + 8);
    }
  } else {
    const std::int64_t ip = npix - pix;
    iring = (1 + isqrt(2 * ip - 1)) >> 1;
    iphi = 4 * iring + 1 - (ip - 2 * iring * (iring - 1));
    kshift = 0;
    nr = iring;
    iring = 2 * nl2 - iring;
    face = static_cast<int>((iphi - 1) / nr + 8);
  }
  const std::int64_t irt = iring - kJrll[face] * nside + 1;
  std::int64_t ipt = 2 * iphi - kJpll[face] * nr - kshift - 1;
  if (ipt >= nl2) ipt -= 8 * nside;
  const std::int64_t ix = (ipt - irt) >> 1;
  const std::int64_t iy = (-ipt - irt) >> 1;
  return face * npface + spread_bits(ix, iy);
}

}  // namespace sphgraph::healpix
