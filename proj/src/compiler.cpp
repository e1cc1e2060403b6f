#include "naloss/compiler.hpp"

#include "naloss/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

namespace naloss {

SiteSet Region::outside(const Architecture& arch) const {
  SiteSet out(arch);
  for (const auto s : arch.sites()) {
    if (!contains(s)) {
      out.insert(s);
    }
  }
  return out;
}

void ErrorModel::validate() const {
  const auto prob = [](double p) { return p > 0.0 && p <= 1.0; };
  if (!prob(oneQubitFidelity) || !prob(twoQubitFidelity)) {
    throw Error(ErrorKind::InvalidConfig, "gate fidelities must lie in (0, 1]");
  }
  if (!(t1Ground.count() > 0.0) || !(t2Ground.count() > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "coherence times must be positive");
  }
}

std::size_t CompiledCircuit::gateCount() const {
  std::size_t n = 0;
  for (const auto& step : steps) {
    n += step.gates.size();
  }
  return n;
}

SiteSet CompiledCircuit::usedSites(const Architecture& arch) const {
  SiteSet used(arch);
  for (const auto s : initialMapping.sites) {
    used.insert(s);
  }
  for (const auto s : mapping.sites) {
    used.insert(s);
  }
  for (const auto& step : steps) {
    for (const auto& g : step.gates) {
      for (const auto s : g.sites) {
        used.insert(s);
      }
    }
  }
  return used;
}

std::vector<Site> CompiledCircuit::measuredSites() const {
  std::vector<Site> out;
  out.reserve(source.measured.size());
  for (const int q : source.measured) {
    out.push_back(mapping[static_cast<std::size_t>(q)]);
  }
  return out;
}

Duration gateDuration(GateKind kind, const GateDurations& durations) {
  if (kind == GateKind::SWAP) {
    return durations.swap;
  }
  switch (arity(kind)) {
  case 1:
    return durations.oneQubit;
  case 2:
    return durations.twoQubit;
  default:
    return durations.threeQubit;
  }
}

double gateFidelity(GateKind kind, const ErrorModel& model) {
  if (kind == GateKind::SWAP) {
    return std::pow(model.twoQubitFidelity, 3);
  }
  const int k = arity(kind);
  if (k == 1) {
    return model.oneQubitFidelity;
  }
  return std::pow(model.twoQubitFidelity, k - 1);
}

namespace {

/// Inserted SWAPs relabel sites; a SWAP from the source circuit is an
/// ordinary gate on two program qubits.
bool movesQubits(const PlacedGate& g) {
  return g.kind == GateKind::SWAP && g.origin != GateOrigin::Source;
}

SiteSet forbiddenFor(const Architecture& arch, const LossState& loss,
                     const std::optional<Region>& region) {
  SiteSet forbidden = region ? region->outside(arch) : SiteSet(arch);
  forbidden.merge(loss.sites());
  return forbidden;
}

bool allPairsWithin(std::span<const Site> sites, double d) {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (!withinRange(squaredDistance(sites[i], sites[j]), d)) {
        return false;
      }
    }
  }
  return true;
}

/// Tracks which program qubit sits where while SWAPs are inserted.
class Occupancy {
public:
  Occupancy(const Architecture& arch, const Mapping& mapping)
      : arch_(arch), pos_(mapping.sites), occ_(arch.numSites(), -1) {
    for (std::size_t q = 0; q < pos_.size(); ++q) {
      occ_[arch.index(pos_[q])] = static_cast<int>(q);
    }
  }

  [[nodiscard]] Site position(int q) const {
    return pos_[static_cast<std::size_t>(q)];
  }

  void swap(Site a, Site b) {
    auto& qa = occ_[arch_.index(a)];
    auto& qb = occ_[arch_.index(b)];
    std::swap(qa, qb);
    if (qa >= 0) {
      pos_[static_cast<std::size_t>(qa)] = a;
    }
    if (qb >= 0) {
      pos_[static_cast<std::size_t>(qb)] = b;
    }
  }

private:
  const Architecture& arch_;
  std::vector<Site> pos_;
  std::vector<int> occ_;
};

} // namespace

Mapping mapCircuit(const Circuit& circuit, const Architecture& arch,
                   const std::optional<Region>& region, const LossState& loss) {
  circuit.validate();
  const Region box = region.value_or(Region::whole(arch));
  if (!box.fits(arch)) {
    throw Error(ErrorKind::InvalidDimension, "region does not fit the array");
  }
  std::vector<Site> candidates;
  for (const auto s : arch.sites()) {
    if (box.contains(s) && !loss.isLost(s)) {
      candidates.push_back(s);
    }
  }
  const auto n = static_cast<std::size_t>(circuit.nQubits);
  if (candidates.size() < n) {
    throw Error(ErrorKind::InsufficientAtoms,
                std::to_string(candidates.size()) + " usable sites for " +
                    std::to_string(n) + " qubits");
  }

  std::vector<std::vector<int>> weight(n, std::vector<int>(n, 0));
  std::vector<int> degree(n, 0);
  for (const auto& g : circuit.gates) {
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      for (std::size_t j = i + 1; j < g.qubits.size(); ++j) {
        const auto a = static_cast<std::size_t>(g.qubits[i]);
        const auto b = static_cast<std::size_t>(g.qubits[j]);
        ++weight[a][b];
        ++weight[b][a];
        ++degree[a];
        ++degree[b];
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)];
  });

  // Doubled coordinates keep the center on the integer lattice.
  const int centerRow2 = 2 * box.origin.row + box.height - 1;
  const int centerCol2 = 2 * box.origin.col + box.width - 1;
  const auto centerCost = [&](Site s) {
    const int dr = 2 * s.row - centerRow2;
    const int dc = 2 * s.col - centerCol2;
    return static_cast<double>(dr * dr + dc * dc);
  };

  std::vector<bool> taken(candidates.size(), false);
  std::vector<std::optional<Site>> placed(n);
  for (const int q : order) {
    const auto qi = static_cast<std::size_t>(q);
    bool hasPartner = false;
    for (std::size_t p = 0; p < n; ++p) {
      hasPartner = hasPartner || (weight[qi][p] > 0 && placed[p].has_value());
    }
    std::size_t best = candidates.size();
    double bestCost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (taken[c]) {
        continue;
      }
      double cost = 0.0;
      if (hasPartner) {
        for (std::size_t p = 0; p < n; ++p) {
          if (weight[qi][p] > 0 && placed[p]) {
            cost += distance(candidates[c], *placed[p]);
          }
        }
      } else {
        cost = centerCost(candidates[c]);
      }
      if (cost < bestCost - 1e-9) {
        bestCost = cost;
        best = c;
      }
    }
    taken[best] = true;
    placed[qi] = candidates[best];
  }

  Mapping mapping;
  for (const auto& s : placed) {
    mapping.sites.push_back(*s);
  }
  return mapping;
}

CompiledCircuit routeAndSchedule(const Circuit& circuit, const Mapping& mapping,
                                 const Architecture& arch, double dEff,
                                 const LossState& loss,
                                 const std::optional<Region>& region,
                                 const GateDurations& durations) {
  circuit.validate();
  if (dEff <= 0.0) {
    dEff = arch.dMax();
  }
  if (dEff > arch.dMax() + 1e-9) {
    throw Error(ErrorKind::InvalidConfig,
                "compile distance exceeds the maximum interaction distance");
  }
  const SiteSet forbidden = forbiddenFor(arch, loss, region);
  if (mapping.size() != static_cast<std::size_t>(circuit.nQubits)) {
    throw Error(ErrorKind::InvalidConfig, "mapping size does not match circuit");
  }
  {
    SiteSet seen(arch);
    for (const auto s : mapping.sites) {
      if (!arch.contains(s) || forbidden.contains(s) || seen.contains(s)) {
        throw Error(ErrorKind::InvalidConfig,
                    "mapping uses an unusable or repeated site");
      }
      seen.insert(s);
    }
  }

  Occupancy occ(arch, mapping);
  std::vector<PlacedGate> emitted;

  const auto applyPath = [&](const std::vector<Site>& path) {
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      emitted.push_back({GateKind::SWAP, {path[k], path[k + 1]}, {}, -1,
                         GateOrigin::Routing});
      occ.swap(path[k], path[k + 1]);
    }
  };
  // Path moving `mover` to the nearest site within dEff of every anchor.
  const auto pathToward = [&](int mover, const std::vector<Site>& anchors)
      -> std::optional<std::vector<Site>> {
    SiteSet blocked = forbidden;
    for (const auto a : anchors) {
      blocked.insert(a);
    }
    return arch.nearestPath(occ.position(mover), dEff, blocked, [&](Site t) {
      return std::all_of(anchors.begin(), anchors.end(), [&](Site a) {
        return withinRange(squaredDistance(t, a), dEff);
      });
    });
  };
  const auto fail = [](std::size_t i) {
    return Error(ErrorKind::RoutingFailure,
                 "no interaction path for gate " + std::to_string(i));
  };

  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const auto& gate = circuit.gates[i];
    const auto& q = gate.qubits;
    if (q.size() == 2 &&
        !withinRange(squaredDistance(occ.position(q[0]), occ.position(q[1])), dEff)) {
      auto first = pathToward(q[0], {occ.position(q[1])});
      auto second = pathToward(q[1], {occ.position(q[0])});
      if (!first && !second) {
        throw fail(i);
      }
      if (!first || (second && second->size() < first->size())) {
        first = std::move(second);
      }
      applyPath(*first);
    } else if (q.size() == 3) {
      if (!withinRange(squaredDistance(occ.position(q[0]), occ.position(q[1])), dEff)) {
        // Keep the third operand in place while the second one moves.
        SiteSet saved = forbidden;
        auto path = [&] {
          SiteSet blocked = forbidden;
          blocked.insert(occ.position(q[0]));
          blocked.insert(occ.position(q[2]));
          const Site anchor = occ.position(q[0]);
          return arch.nearestPath(occ.position(q[1]), dEff, blocked, [&](Site t) {
            return withinRange(squaredDistance(t, anchor), dEff);
          });
        }();
        if (!path) {
          throw fail(i);
        }
        applyPath(*path);
      }
      const Site s0 = occ.position(q[0]);
      const Site s1 = occ.position(q[1]);
      const Site s2 = occ.position(q[2]);
      if (!withinRange(squaredDistance(s2, s0), dEff) ||
          !withinRange(squaredDistance(s2, s1), dEff)) {
        auto path = pathToward(q[2], {s0, s1});
        if (!path) {
          throw fail(i);
        }
        applyPath(*path);
      }
    }
    PlacedGate placed{gate.kind, {}, gate.params, static_cast<int>(i),
                      GateOrigin::Source};
    for (const int qubit : q) {
      placed.sites.push_back(occ.position(qubit));
    }
    emitted.push_back(std::move(placed));
  }

  CompiledCircuit cc;
  cc.source = circuit;
  cc.initialMapping = mapping;
  cc.dEff = dEff;
  cc.durations = durations;
  cc.steps = scheduleAsap(arch, emitted);
  finalizeTiming(cc);
  return cc;
}

std::vector<TimeStep> scheduleAsap(const Architecture& arch,
                                   const std::vector<PlacedGate>& gates) {
  const auto nSites = arch.numSites();
  std::vector<TimeStep> steps;
  // Per step: sites busy with a gate, and sites inside some restriction zone.
  std::vector<std::vector<std::uint8_t>> occupied;
  std::vector<std::vector<std::uint8_t>> restricted;
  std::vector<std::size_t> nextFree(nSites, 0);
  std::vector<std::size_t> zone;

  for (const auto& g : gates) {
    zone.clear();
    arch.restrictionZone(g.sites, zone);
    std::size_t t = 0;
    for (const auto s : g.sites) {
      t = std::max(t, nextFree[arch.index(s)]);
    }
    for (;; ++t) {
      if (t == steps.size()) {
        steps.emplace_back();
        occupied.emplace_back(nSites, 0);
        restricted.emplace_back(nSites, 0);
        break;
      }
      const bool sitesClear = std::none_of(g.sites.begin(), g.sites.end(), [&](Site s) {
        const auto i = arch.index(s);
        return occupied[t][i] != 0 || restricted[t][i] != 0;
      });
      const bool zoneClear = std::none_of(zone.begin(), zone.end(), [&](std::size_t i) {
        return occupied[t][i] != 0;
      });
      if (sitesClear && zoneClear) {
        break;
      }
    }
    steps[t].gates.push_back(g);
    for (const auto s : g.sites) {
      occupied[t][arch.index(s)] = 1;
      nextFree[arch.index(s)] = t + 1;
    }
    for (const auto i : zone) {
      restricted[t][i] = 1;
    }
  }
  return steps;
}

void finalizeTiming(CompiledCircuit& cc) {
  const auto n = static_cast<std::size_t>(cc.source.nQubits);
  Duration total{};
  int swaps = 0;
  for (auto& step : cc.steps) {
    Duration longest{};
    for (const auto& g : step.gates) {
      longest = std::max(longest, gateDuration(g.kind, cc.durations));
      swaps += g.origin != GateOrigin::Source ? 1 : 0;
    }
    step.duration = longest;
    total += longest;
  }

  // Replay occupancy; a qubit is busy in a step if a gate touches its site.
  std::map<Site, int> occ;
  for (std::size_t q = 0; q < n; ++q) {
    occ[cc.initialMapping[q]] = static_cast<int>(q);
  }
  std::vector<Duration> busy(n, Duration{});
  for (const auto& step : cc.steps) {
    for (const auto& g : step.gates) {
      for (const auto s : g.sites) {
        const auto it = occ.find(s);
        if (it != occ.end()) {
          busy[static_cast<std::size_t>(it->second)] += step.duration;
        }
      }
    }
    for (const auto& g : step.gates) {
      if (movesQubits(g)) {
        const auto a = occ.find(g.sites[0]);
        const auto b = occ.find(g.sites[1]);
        const int qa = a != occ.end() ? a->second : -1;
        const int qb = b != occ.end() ? b->second : -1;
        occ.erase(g.sites[0]);
        occ.erase(g.sites[1]);
        if (qa >= 0) {
          occ[g.sites[1]] = qa;
        }
        if (qb >= 0) {
          occ[g.sites[0]] = qb;
        }
      }
    }
  }
  cc.mapping.sites.assign(n, Site{});
  for (const auto& [site, q] : occ) {
    cc.mapping.sites[static_cast<std::size_t>(q)] = site;
  }
  cc.totalDuration = total;
  cc.swapCount = swaps;
  cc.groundTime.assign(n, Duration{});
  for (std::size_t q = 0; q < n; ++q) {
    cc.groundTime[q] = std::max(Duration{}, total - busy[q]);
  }
}

double decoherenceFactor(Duration groundTime, const ErrorModel& model) {
  return std::exp(-(groundTime / model.t1Ground + groundTime / model.t2Ground));
}

double estimateSuccess(const CompiledCircuit& cc, const ErrorModel& model) {
  double p = 1.0;
  for (const auto& step : cc.steps) {
    for (const auto& g : step.gates) {
      p *= gateFidelity(g.kind, model);
    }
  }
  for (const auto dg : cc.groundTime) {
    p *= decoherenceFactor(dg, model);
  }
  return p;
}

CompiledCircuit compile(const Circuit& circuit, const Architecture& arch,
                        const CompileOptions& options) {
  const double dEff = options.dEff > 0.0 ? options.dEff : arch.dMax();
  if (dEff > arch.dMax() + 1e-9) {
    throw Error(ErrorKind::InvalidConfig,
                "compile distance exceeds the maximum interaction distance");
  }
  const auto mapping = mapCircuit(circuit, arch, options.region, options.loss);
  return routeAndSchedule(circuit, mapping, arch, dEff, options.loss,
                          options.region, options.durations);
}

bool compatible(const Architecture& arch, const PlacedGate& a,
                const PlacedGate& b) {
  for (const auto sa : a.sites) {
    for (const auto sb : b.sites) {
      if (sa == sb) {
        return false;
      }
    }
  }
  std::vector<std::size_t> zone;
  arch.restrictionZone(a.sites, zone);
  for (const auto s : b.sites) {
    if (std::binary_search(zone.begin(), zone.end(), arch.index(s))) {
      return false;
    }
  }
  zone.clear();
  arch.restrictionZone(b.sites, zone);
  for (const auto s : a.sites) {
    if (std::binary_search(zone.begin(), zone.end(), arch.index(s))) {
      return false;
    }
  }
  return true;
}

std::optional<std::string> checkCompiled(const CompiledCircuit& cc,
                                         const Architecture& arch,
                                         const LossState& loss, double range) {
  const auto n = static_cast<std::size_t>(cc.source.nQubits);
  if (cc.initialMapping.size() != n || cc.mapping.size() != n ||
      cc.groundTime.size() != n) {
    return "mapping or ground-time size mismatch";
  }
  const auto usable = [&](Site s) { return arch.contains(s) && !loss.isLost(s); };
  {
    SiteSet seen(arch);
    for (const auto s : cc.initialMapping.sites) {
      if (!usable(s) || seen.contains(s)) {
        return "initial mapping uses an unusable or repeated site";
      }
      seen.insert(s);
    }
  }

  std::map<Site, int> occ;
  for (std::size_t q = 0; q < n; ++q) {
    occ[cc.initialMapping[q]] = static_cast<int>(q);
  }
  std::vector<int> lastSource(n, -1);
  std::vector<bool> sourceSeen(cc.source.gates.size(), false);
  Duration total{};
  std::vector<Duration> busy(n, Duration{});

  for (std::size_t t = 0; t < cc.steps.size(); ++t) {
    const auto& step = cc.steps[t];
    const auto where = " in step " + std::to_string(t);
    total += step.duration;
    for (std::size_t i = 0; i < step.gates.size(); ++i) {
      const auto& g = step.gates[i];
      if (static_cast<int>(g.sites.size()) != arity(g.kind)) {
        return "gate arity does not match its sites" + where;
      }
      for (const auto s : g.sites) {
        if (!usable(s)) {
          return "gate on an unusable site" + where;
        }
      }
      if (!allPairsWithin(g.sites, range)) {
        return "gate exceeds the interaction range" + where;
      }
      for (std::size_t j = i + 1; j < step.gates.size(); ++j) {
        if (!compatible(arch, g, step.gates[j])) {
          return "concurrent gates conflict" + where;
        }
      }
      if (g.origin == GateOrigin::Source) {
        if (g.sourceIndex < 0 ||
            static_cast<std::size_t>(g.sourceIndex) >= cc.source.gates.size() ||
            sourceSeen[static_cast<std::size_t>(g.sourceIndex)]) {
          return "source gate missing or duplicated" + where;
        }
        sourceSeen[static_cast<std::size_t>(g.sourceIndex)] = true;
        const auto& src = cc.source.gates[static_cast<std::size_t>(g.sourceIndex)];
        if (src.kind != g.kind || src.qubits.size() != g.sites.size()) {
          return "placed gate differs from its source" + where;
        }
        for (std::size_t k = 0; k < g.sites.size(); ++k) {
          const auto it = occ.find(g.sites[k]);
          if (it == occ.end() || it->second != src.qubits[k]) {
            return "gate applied to the wrong qubit" + where;
          }
          auto& last = lastSource[static_cast<std::size_t>(src.qubits[k])];
          if (last >= g.sourceIndex) {
            return "dependency order violated" + where;
          }
          last = g.sourceIndex;
        }
      } else if (g.kind != GateKind::SWAP) {
        return "inserted gate is not a SWAP" + where;
      }
      for (const auto s : g.sites) {
        const auto it = occ.find(s);
        if (it != occ.end()) {
          busy[static_cast<std::size_t>(it->second)] += step.duration;
        }
      }
    }
    for (const auto& g : step.gates) {
      if (!movesQubits(g)) {
        continue;
      }
      const auto a = occ.find(g.sites[0]);
      const auto b = occ.find(g.sites[1]);
      const int qa = a != occ.end() ? a->second : -1;
      const int qb = b != occ.end() ? b->second : -1;
      occ.erase(g.sites[0]);
      occ.erase(g.sites[1]);
      if (qa >= 0) {
        occ[g.sites[1]] = qa;
      }
      if (qb >= 0) {
        occ[g.sites[0]] = qb;
      }
    }
  }
  if (std::find(sourceSeen.begin(), sourceSeen.end(), false) != sourceSeen.end()) {
    return "some source gate was never scheduled";
  }
  for (const auto& [site, q] : occ) {
    if (cc.mapping[static_cast<std::size_t>(q)] != site) {
      return "final mapping disagrees with the replayed schedule";
    }
  }
  const double tol = 1e-12 + 1e-9 * total.count();
  if (std::abs((total - cc.totalDuration).count()) > tol) {
    return "total duration is not the sum of step durations";
  }
  for (std::size_t q = 0; q < n; ++q) {
    const auto expected = total - busy[q];
    if (cc.groundTime[q].count() < 0.0 ||
        std::abs((expected - cc.groundTime[q]).count()) > tol) {
      return "ground time of qubit " + std::to_string(q) + " is inconsistent";
    }
  }
  return std::nullopt;
}

} // namespace naloss
