#pragma once

#include <cstdint>
#include <string_view>

#include "sixport/rng.hpp"

namespace sixport {

/// Exact Binomial(n, p) sampling. Inversion (BINV) when n*min(p,1-p) < 10,
/// otherwise Hormann's transformed rejection (BTRS) with the exact log-pmf
/// acceptance test. No Gaussian approximation anywhere: counts near zero
/// (n*p ~ 1e-1) follow the true distribution.
constexpr std::string_view binomial_algorithm = "binv-btrs/v1";

std::int64_t binomial_draw(PhiloxStream& rng, std::int64_t n, double p);

}  // namespace sixport
