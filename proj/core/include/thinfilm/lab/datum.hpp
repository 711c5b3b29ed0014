#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "thinfilm/core.hpp"

namespace thinfilm::lab {

/// Sum of amp * cos(k pi x / a) over (k, amp) pairs, k >= 1.
struct CosineCombo {
  std::vector<std::pair<std::size_t, double>> terms;
};

/// Coefficients of modes 1..max_k drawn uniformly from [-amplitude, amplitude].
struct RandomBandlimited {
  std::size_t max_k = 8;
  double amplitude = 0.1;
  std::uint64_t seed = 1;
};

using BaseDatum = std::variant<CosineCombo, RandomBandlimited>;

/// multiplier * lambda_star(base) * base; multiplier 1 lands on the Nehari
/// manifold, larger values make I negative.
struct NehariScaled {
  BaseDatum base;
  double multiplier = 1.0;
};

using DatumDescriptor = std::variant<CosineCombo, RandomBandlimited, NehariScaled>;

/// Deterministic given the descriptor. Throws InvalidDescriptor for empty
/// or out-of-band terms, non-finite parameters or a zero result.
SpectralField build_datum(const DatumDescriptor& d, const DomainSpec& spec);

std::string describe(const DatumDescriptor& d);

}  // namespace thinfilm::lab
