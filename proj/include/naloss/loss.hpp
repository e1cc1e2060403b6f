#pragma once

#include "naloss/arch.hpp"
#include "naloss/random.hpp"

#include <span>

namespace naloss {

/// Per-shot loss probabilities.
struct LossRates {
  double pEnv = 0.00068; ///< any trapped atom
  double pMeas = 0.02;   ///< measured atoms, on top of pEnv

  /// Throws Error(InvalidConfig) unless both lie in [0, 1].
  void validate() const;
  friend bool operator==(const LossRates&, const LossRates&) = default;
};

/**
 * Samples the atoms lost during one shot. Present atoms are visited row-major
 * with an environmental draw each; measured survivors then get a measurement
 * draw in the order given. Returns the newly lost sites.
 */
SiteSet sampleShotLosses(Rng& rng, const Architecture& arch,
                         const SiteSet& present, std::span<const Site> measured,
                         const LossRates& rates);

} // namespace naloss
