#include "naloss/loss.hpp"

#include "naloss/error.hpp"

namespace naloss {

void LossRates::validate() const {
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(pEnv) || !prob(pMeas)) {
    throw Error(ErrorKind::InvalidConfig, "loss rates must lie in [0, 1]");
  }
}

SiteSet sampleShotLosses(Rng& rng, const Architecture& arch,
                         const SiteSet& present, std::span<const Site> measured,
                         const LossRates& rates) {
  SiteSet lost(arch);
  for (std::size_t i = 0; i < arch.numSites(); ++i) {
    if (present.containsIndex(i) && bernoulli(rng, rates.pEnv)) {
      lost.insert(arch.site(i));
    }
  }
  for (const auto s : measured) {
    if (present.contains(s) && !lost.contains(s) && bernoulli(rng, rates.pMeas)) {
      lost.insert(s);
    }
  }
  return lost;
}

} // namespace naloss
