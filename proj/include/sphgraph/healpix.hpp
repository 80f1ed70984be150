#pragma once

#include <cstdint>

#include "sphgraph/sampling.hpp"

namespace sphgraph::healpix {

bool is_valid_nside(std::int64_t nside) noexcept;

/// Pixel center of ring-scheme pixel `pix`.
Vec3 pix2vec_ring(std::int64_t nside, std::int64_t pix);

std::int64_t nest2ring(std::int64_t nside, std::int64_t pix);
std::int64_t ring2nest(std::int64_t nside, std::int64_t pix);

}  // namespace sphgraph::healpix
