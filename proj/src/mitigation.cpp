#include "naloss/mitigation.hpp"

#include "naloss/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <utility>

namespace naloss {

namespace {

constexpr std::array kStrategyNames = {
    std::pair{StrategyKind::ReloadAlways, "reload"},
    std::pair{StrategyKind::Recompile, "recompile"},
    std::pair{StrategyKind::HardwareShift, "hardware-shift"},
    std::pair{StrategyKind::InteractionShift, "interaction-shift"},
    std::pair{StrategyKind::RerouteSmallerD, "reroute"},
    std::pair{StrategyKind::RelocateTiles, "relocate"},
    std::pair{StrategyKind::FullParallel, "full-parallel"},
    std::pair{StrategyKind::PartialParallel, "partial-parallel"},
};

std::string_view baseName(StrategyKind kind) {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == kind) {
      return name;
    }
  }
  return "?";
}

bool endsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

SiteSet emptySet(const Architecture& arch) { return SiteSet(arch); }

bool isFree(Site s, const Architecture& arch, const LossState& loss,
            const SiteSet& used, const SiteSet& forbidden) {
  return arch.contains(s) && !loss.isLost(s) && !used.contains(s) &&
         !forbidden.contains(s);
}

/// Groups gates into sub-steps first-fit so each sub-step is conflict free.
std::vector<std::vector<PlacedGate>> packFirstFit(const Architecture& arch,
                                                  std::vector<PlacedGate> gates) {
  struct Bucket {
    std::vector<PlacedGate> gates;
    std::vector<std::uint8_t> occupied;
    std::vector<std::uint8_t> restricted;
  };
  std::vector<Bucket> buckets;
  std::vector<std::size_t> zone;
  for (auto& g : gates) {
    zone.clear();
    arch.restrictionZone(g.sites, zone);
    Bucket* target = nullptr;
    for (auto& b : buckets) {
      const bool sitesClear = std::none_of(g.sites.begin(), g.sites.end(), [&](Site s) {
        const auto i = arch.index(s);
        return b.occupied[i] != 0 || b.restricted[i] != 0;
      });
      const bool zoneClear = std::none_of(zone.begin(), zone.end(),
                                          [&](std::size_t i) { return b.occupied[i] != 0; });
      if (sitesClear && zoneClear) {
        target = &b;
        break;
      }
    }
    if (target == nullptr) {
      buckets.push_back({{}, std::vector<std::uint8_t>(arch.numSites(), 0),
                         std::vector<std::uint8_t>(arch.numSites(), 0)});
      target = &buckets.back();
    }
    for (const auto s : g.sites) {
      target->occupied[arch.index(s)] = 1;
    }
    for (const auto i : zone) {
      target->restricted[i] = 1;
    }
    target->gates.push_back(std::move(g));
  }
  std::vector<std::vector<PlacedGate>> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) {
    out.push_back(std::move(b.gates));
  }
  return out;
}

/// Applies an injective site relabeling to every gate and both mappings,
/// then splits steps whose gates now conflict.
CompiledCircuit relabel(const CompiledCircuit& cc, const Architecture& arch,
                        const std::vector<std::pair<Site, Site>>& moves) {
  std::vector<std::size_t> target(arch.numSites());
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i] = i;
  }
  for (const auto& [from, to] : moves) {
    target[arch.index(from)] = arch.index(to);
  }
  const auto apply = [&](Site& s) { s = arch.site(target[arch.index(s)]); };

  CompiledCircuit out = cc;
  for (auto& s : out.initialMapping.sites) {
    apply(s);
  }
  out.steps.clear();
  for (const auto& step : cc.steps) {
    std::vector<PlacedGate> gates = step.gates;
    for (auto& g : gates) {
      for (auto& s : g.sites) {
        apply(s);
      }
    }
    for (auto& sub : packFirstFit(arch, std::move(gates))) {
      out.steps.push_back({std::move(sub), Duration{}});
    }
  }
  finalizeTiming(out);
  return out;
}

RecoveryOutcome reloadOutcome(std::size_t reads, std::size_t writes) {
  RecoveryOutcome out;
  out.kind = RecoveryKind::ReloadRequired;
  out.reads = reads;
  out.writes = writes;
  return out;
}

RecoveryOutcome adapted(CompiledCircuit cc, std::size_t reads, std::size_t writes) {
  RecoveryOutcome out;
  out.kind = RecoveryKind::Adapted;
  out.circuit = std::move(cc);
  out.reads = reads;
  out.writes = writes;
  return out;
}

std::vector<std::pair<Site, Site>> shiftAlong(const std::vector<Site>& path) {
  std::vector<std::pair<Site, Site>> moves;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    moves.emplace_back(path[k], path[k + 1]);
  }
  return moves;
}

} // namespace

std::string_view toString(StrategyKind kind) { return baseName(kind); }

std::string_view toString(BoxMode mode) {
  return mode == BoxMode::Loose ? "loose" : "tight";
}

std::string_view toString(InnerMethod method) {
  return method == InnerMethod::HardwareShift ? "hardware-shift"
                                              : "interaction-shift";
}

std::optional<BoxMode> parseBoxMode(std::string_view name) {
  if (name == "loose") {
    return BoxMode::Loose;
  }
  if (name == "tight") {
    return BoxMode::Tight;
  }
  return std::nullopt;
}

std::optional<InnerMethod> parseInnerMethod(std::string_view name) {
  if (name == "hardware-shift" || name == "hardware") {
    return InnerMethod::HardwareShift;
  }
  if (name == "interaction-shift" || name == "interaction") {
    return InnerMethod::InteractionShift;
  }
  return std::nullopt;
}

std::string_view toString(RecoveryKind kind) {
  switch (kind) {
  case RecoveryKind::Adapted:
    return "adapted";
  case RecoveryKind::Relocated:
    return "relocated";
  case RecoveryKind::ReloadRequired:
    return "reload-required";
  }
  return "?";
}

std::string_view toString(TraceEvent event) {
  switch (event) {
  case TraceEvent::Start:
    return "start";
  case TraceEvent::Adapted:
    return "adapted";
  case TraceEvent::Failed:
    return "failed";
  case TraceEvent::Relocated:
    return "relocated";
  case TraceEvent::Reload:
    return "reload";
  }
  return "?";
}

Strategy Strategy::parse(std::string_view name) {
  Strategy s;
  std::string_view base = name;
  std::optional<BoxMode> mode;
  for (const auto m : {BoxMode::Loose, BoxMode::Tight}) {
    const std::string suffix = "-" + std::string(toString(m));
    if (endsWith(name, suffix)) {
      mode = m;
      base = name.substr(0, name.size() - suffix.size());
    }
  }
  for (const auto& [kind, n] : kStrategyNames) {
    if (base == n) {
      s.kind = kind;
      if (mode && !s.usesTiles()) {
        break;
      }
      s.mode = mode.value_or(BoxMode::Loose);
      return s;
    }
  }
  throw Error(ErrorKind::InvalidConfig,
              fmt::format("unknown strategy '{}'", name));
}

bool Strategy::usesTiles() const noexcept {
  return kind == StrategyKind::RelocateTiles ||
         kind == StrategyKind::FullParallel ||
         kind == StrategyKind::PartialParallel;
}

std::string Strategy::label() const {
  std::string out(baseName(kind));
  if (usesTiles()) {
    out += "-";
    out += toString(mode);
  }
  if (kind == StrategyKind::PartialParallel) {
    out += fmt::format("-k{}", instances);
  }
  return out;
}

InnerMethod Strategy::innerMethod() const {
  if (inner) {
    return *inner;
  }
  switch (kind) {
  case StrategyKind::InteractionShift:
  case StrategyKind::FullParallel:
  case StrategyKind::PartialParallel:
    return InnerMethod::InteractionShift;
  default:
    return InnerMethod::HardwareShift;
  }
}

double Strategy::compileDistance(const Architecture& arch) const {
  if (dEff > 0.0) {
    return dEff;
  }
  switch (kind) {
  case StrategyKind::RerouteSmallerD:
  case StrategyKind::RelocateTiles:
  case StrategyKind::PartialParallel:
    return std::max(1.0, arch.dMax() - 1.0);
  default:
    return arch.dMax();
  }
}

void Strategy::validate(const Architecture& arch) const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "threshold must lie in (0, 1]");
  }
  if (instances < 1) {
    throw Error(ErrorKind::InvalidConfig, "instances must be at least 1");
  }
  if (dEff < 0.0 || dEff > arch.dMax() + 1e-9 || (dEff > 0.0 && dEff < 1.0)) {
    throw Error(ErrorKind::InvalidConfig,
                "compile distance must lie in [1, dmax]");
  }
}

std::pair<int, int> boundingBox(int nQubits, BoxMode mode) {
  if (nQubits < 1) {
    throw Error(ErrorKind::InvalidSize, "bounding box needs at least 1 qubit");
  }
  int side = static_cast<int>(std::sqrt(static_cast<double>(nQubits)));
  while (side * side < nQubits) {
    ++side;
  }
  while (side > 1 && (side - 1) * (side - 1) >= nQubits) {
    --side;
  }
  if (mode == BoxMode::Loose) {
    return {side, side};
  }
  return {side, (nQubits + side - 1) / side};
}

std::size_t TilePlan::visitedCount() const {
  return static_cast<std::size_t>(std::count(visited.begin(), visited.end(), true));
}

TilePlan makeTilePlan(const Architecture& arch, int nQubits, BoxMode mode) {
  const auto [h, w] = boundingBox(nQubits, mode);
  if (h > arch.rows() || w > arch.cols()) {
    throw Error(ErrorKind::CircuitTooLarge,
                fmt::format("{}x{} bounding box exceeds the {}x{} array", h, w,
                            arch.rows(), arch.cols()));
  }
  const auto anchors = [](int extent, int size) {
    std::vector<int> out;
    for (int a = 0; a < extent; a += size) {
      out.push_back(std::min(a, extent - size));
    }
    return out;
  };
  TilePlan plan;
  plan.boxHeight = h;
  plan.boxWidth = w;
  for (const int r : anchors(arch.rows(), h)) {
    for (const int c : anchors(arch.cols(), w)) {
      plan.tiles.push_back({{r, c}, h, w});
    }
  }
  plan.resetVisits();
  return plan;
}

TilePlan makeDisjointPlan(const Architecture& arch, int nQubits, BoxMode mode) {
  if (nQubits < 1) {
    throw Error(ErrorKind::InvalidSize, "bounding box needs at least 1 qubit");
  }
  const auto preferred = boundingBox(nQubits, mode);
  struct Shape {
    int h;
    int w;
    int count;
  };
  std::optional<Shape> best;
  const auto better = [&](const Shape& a, const Shape& b) {
    if (a.count != b.count) {
      return a.count > b.count;
    }
    const bool aPref = std::pair{a.h, a.w} == preferred;
    const bool bPref = std::pair{b.h, b.w} == preferred;
    if (aPref != bPref) {
      return aPref;
    }
    if (a.h * a.w != b.h * b.w) {
      return a.h * a.w < b.h * b.w;
    }
    if (std::abs(a.h - a.w) != std::abs(b.h - b.w)) {
      return std::abs(a.h - a.w) < std::abs(b.h - b.w);
    }
    return a.h > b.h;
  };
  for (int h = 1; h <= arch.rows(); ++h) {
    for (int w = 1; w <= arch.cols(); ++w) {
      if (h * w < nQubits) {
        continue;
      }
      const Shape s{h, w, (arch.rows() / h) * (arch.cols() / w)};
      if (!best || better(s, *best)) {
        best = s;
      }
    }
  }
  if (!best) {
    throw Error(ErrorKind::CircuitTooLarge,
                fmt::format("{} qubits exceed the {}x{} array", nQubits,
                            arch.rows(), arch.cols()));
  }
  TilePlan plan;
  plan.boxHeight = best->h;
  plan.boxWidth = best->w;
  for (int r = 0; r + best->h <= arch.rows(); r += best->h) {
    for (int c = 0; c + best->w <= arch.cols(); c += best->w) {
      plan.tiles.push_back({{r, c}, best->h, best->w});
    }
  }
  plan.resetVisits();
  return plan;
}

RecoveryOutcome shiftRemapHardware(const CompiledCircuit& cc,
                                   const Architecture& arch,
                                   const LossState& loss, Site lostSite,
                                   const SiteSet* forbidden) {
  const SiteSet none = emptySet(arch);
  const SiteSet& forb = forbidden != nullptr ? *forbidden : none;
  const SiteSet used = cc.usedSites(arch);
  if (!used.contains(lostSite)) {
    return adapted(cc, 0, 0);
  }
  // Up, down, left, right.
  constexpr std::array<Site, 4> kDirections = {
      Site{-1, 0}, Site{1, 0}, Site{0, -1}, Site{0, 1}};
  // Non-lost sites along a direction, skipping lost runs short enough to hop.
  const auto ray = [&](Site step, std::size_t& reads) {
    std::vector<Site> out;
    Site last = lostSite;
    for (Site s{lostSite.row + step.row, lostSite.col + step.col}; arch.contains(s);
         s = {s.row + step.row, s.col + step.col}) {
      ++reads;
      if (forb.contains(s)) {
        break;
      }
      if (loss.isLost(s)) {
        continue;
      }
      if (!withinRange(squaredDistance(last, s), arch.dMax())) {
        break;
      }
      out.push_back(s);
      last = s;
    }
    return out;
  };
  std::size_t reads = 0;
  std::vector<Site> best;
  std::size_t bestCount = 0;
  for (const auto step : kDirections) {
    auto sites = ray(step, reads);
    const auto count = static_cast<std::size_t>(std::count_if(
        sites.begin(), sites.end(), [&](Site s) { return !used.contains(s); }));
    if (count > bestCount) {
      bestCount = count;
      best = std::move(sites);
    }
  }
  if (bestCount == 0) {
    return reloadOutcome(reads, 0);
  }
  std::vector<Site> chain{lostSite};
  for (const auto s : best) {
    chain.push_back(s);
    if (!used.contains(s)) {
      break;
    }
  }
  const auto moves = shiftAlong(chain);
  return adapted(relabel(cc, arch, moves), reads, moves.size());
}

RecoveryOutcome shiftRemapInteraction(const CompiledCircuit& cc,
                                      const Architecture& arch,
                                      const LossState& loss, Site lostSite,
                                      double d, const SiteSet* forbidden) {
  const SiteSet none = emptySet(arch);
  const SiteSet& forb = forbidden != nullptr ? *forbidden : none;
  const SiteSet used = cc.usedSites(arch);
  if (!used.contains(lostSite)) {
    return adapted(cc, 0, 0);
  }
  SiteSet blocked = loss.sites();
  blocked.merge(forb);
  SearchStats stats;
  const auto path = arch.nearestPath(
      lostSite, d, blocked,
      [&](Site t) { return isFree(t, arch, loss, used, forb); }, &stats);
  if (!path) {
    return reloadOutcome(stats.expansions, 0);
  }
  const auto moves = shiftAlong(*path);
  return adapted(relabel(cc, arch, moves), stats.expansions, moves.size());
}

RecoveryOutcome rerouteOutOfRange(const CompiledCircuit& cc,
                                  const Architecture& arch,
                                  const LossState& loss, double range,
                                  const SiteSet* forbidden) {
  const auto inRange = [&](const PlacedGate& g) {
    for (std::size_t i = 0; i < g.sites.size(); ++i) {
      for (std::size_t j = i + 1; j < g.sites.size(); ++j) {
        if (!withinRange(squaredDistance(g.sites[i], g.sites[j]), range)) {
          return false;
        }
      }
    }
    return true;
  };
  const bool clean = std::all_of(cc.steps.begin(), cc.steps.end(), [&](const TimeStep& t) {
    return std::all_of(t.gates.begin(), t.gates.end(), inRange);
  });
  if (clean) {
    return adapted(cc, 0, 0);
  }

  SiteSet base = loss.sites();
  if (forbidden != nullptr) {
    base.merge(*forbidden);
  }
  std::size_t reads = 0;
  std::size_t writes = 0;
  CompiledCircuit out = cc;
  out.steps.clear();
  const auto single = [&](PlacedGate g) {
    out.steps.push_back({{std::move(g)}, Duration{}});
  };

  for (const auto& step : cc.steps) {
    std::vector<PlacedGate> fine;
    std::vector<PlacedGate> far;
    for (const auto& g : step.gates) {
      (inRange(g) ? fine : far).push_back(g);
    }
    if (far.empty()) {
      out.steps.push_back(step);
      continue;
    }
    for (auto& sub : packFirstFit(arch, std::move(fine))) {
      out.steps.push_back({std::move(sub), Duration{}});
    }
    for (auto g : far) {
      std::vector<PlacedGate> swaps;
      for (std::size_t k = 1; k < g.sites.size(); ++k) {
        const auto anchors = std::span<const Site>(g.sites.data(), k);
        const auto reaches = [&](Site t) {
          return std::all_of(anchors.begin(), anchors.end(), [&](Site a) {
            return withinRange(squaredDistance(t, a), range);
          });
        };
        if (reaches(g.sites[k])) {
          continue;
        }
        SiteSet blocked = base;
        for (std::size_t j = 0; j < g.sites.size(); ++j) {
          if (j != k) {
            blocked.insert(g.sites[j]);
          }
        }
        SearchStats stats;
        const auto path = arch.nearestPath(g.sites[k], range, blocked, reaches, &stats);
        reads += stats.expansions;
        if (!path) {
          return reloadOutcome(reads, writes);
        }
        for (std::size_t j = 0; j + 1 < path->size(); ++j) {
          swaps.push_back({GateKind::SWAP, {(*path)[j], (*path)[j + 1]}, {}, -1,
                           GateOrigin::Patch});
        }
        g.sites[k] = path->back();
      }
      writes += 2 * swaps.size();
      for (const auto& sw : swaps) {
        single(sw);
      }
      single(g);
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) {
        single(*it);
      }
    }
  }
  finalizeTiming(out);
  return adapted(std::move(out), reads, writes);
}

RecoveryOutcome relocate(const Circuit& circuit, TilePlan& plan,
                         const Architecture& arch, const LossState& loss,
                         double dEff, const GateDurations& durations,
                         const ErrorModel& model, double minSuccess,
                         const SiteSet* avoid) {
  std::size_t reads = 0;
  for (std::size_t i = 0; i < plan.tiles.size(); ++i) {
    const Region& tile = plan.tiles[i];
    bool clash = false;
    if (avoid != nullptr) {
      for (const auto s : avoid->sites()) {
        clash = clash || tile.contains(s);
      }
    }
    if (plan.visited[i] || clash) {
      continue;
    }
    plan.visited[i] = true;
    reads += static_cast<std::size_t>(tile.height * tile.width);
    CompileOptions options;
    options.region = tile;
    options.loss = loss;
    options.dEff = dEff;
    options.durations = durations;
    std::optional<CompiledCircuit> cc;
    try {
      cc = compile(circuit, arch, options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientAtoms &&
          e.kind() != ErrorKind::RoutingFailure) {
        throw;
      }
      continue;
    }
    if (estimateSuccess(*cc, model) < minSuccess) {
      continue;
    }
    RecoveryOutcome out;
    out.kind = RecoveryKind::Relocated;
    out.tile = static_cast<int>(i);
    out.reads = reads;
    out.writes = static_cast<std::size_t>(circuit.nQubits + cc->swapCount);
    out.circuit = std::move(cc);
    return out;
  }
  return reloadOutcome(reads, 0);
}

std::vector<RecoveryOutcome>
buildParallel(const Circuit& circuit, TilePlan& plan, int instances,
              const Architecture& arch, const LossState& loss, double dEff,
              const GateDurations& durations) {
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < plan.tiles.size() &&
                          picked.size() < static_cast<std::size_t>(instances);
       ++i) {
    const bool clash = std::any_of(picked.begin(), picked.end(), [&](std::size_t j) {
      return plan.tiles[j].overlaps(plan.tiles[i]);
    });
    if (!clash) {
      picked.push_back(i);
    }
  }
  if (picked.size() < static_cast<std::size_t>(instances)) {
    throw Error(ErrorKind::NotEnoughDisjointTiles,
                fmt::format("{} instances requested, {} disjoint tiles available",
                            instances, picked.size()));
  }
  std::vector<RecoveryOutcome> out;
  for (const auto i : picked) {
    CompileOptions options;
    options.region = plan.tiles[i];
    options.loss = loss;
    options.dEff = dEff;
    options.durations = durations;
    RecoveryOutcome r;
    r.kind = RecoveryKind::Relocated;
    r.tile = static_cast<int>(i);
    r.circuit = compile(circuit, arch, options);
    r.reads = static_cast<std::size_t>(plan.tiles[i].height * plan.tiles[i].width);
    r.writes = static_cast<std::size_t>(circuit.nQubits + r.circuit->swapCount);
    plan.visited[i] = true;
    out.push_back(std::move(r));
  }
  return out;
}

Duration recoveryCost(std::size_t reads, std::size_t writes,
                      const TimingModel& timing) {
  return static_cast<double>(reads) * timing.tableRead +
         static_cast<double>(writes) * timing.tableWrite;
}

Duration recoveryCost(const RecoveryOutcome& outcome, const TimingModel& timing) {
  return recoveryCost(outcome.reads, outcome.writes, timing);
}

StrategyEngine::StrategyEngine(const Architecture& arch, Circuit circuit,
                               Strategy strategy, ErrorModel model,
                               GateDurations durations)
    : arch_(&arch), circuit_(std::move(circuit)), strategy_(strategy),
      model_(model), durations_(durations) {
  strategy_.validate(arch);
  model_.validate();
  circuit_.validate();
  dEff_ = strategy_.compileDistance(arch);
  if (strategy_.kind == StrategyKind::FullParallel) {
    plan_ = makeDisjointPlan(arch, circuit_.nQubits, strategy_.mode);
  } else if (strategy_.usesTiles()) {
    plan_ = makeTilePlan(arch, circuit_.nQubits, strategy_.mode);
  }
  std::vector<TracePoint> discard;
  try {
    reset(discard);
  } catch (const Error& e) {
    if (e.isValidation()) {
      throw;
    }
    throw Error(ErrorKind::NonterminatingConfig,
                fmt::format("circuit cannot run on a fresh array: {}", e.what()));
  }
  reference_ = instances_.front().success;
}

void StrategyEngine::setInstance(std::size_t i, CompiledCircuit cc, int tile,
                                 bool placed) {
  Instance inst;
  inst.used = cc.usedSites(*arch_);
  inst.success = estimateSuccess(cc, model_);
  inst.placed = placed ? inst.success : instances_[i].placed;
  inst.circuit = std::move(cc);
  inst.tile = tile;
  instances_[i] = std::move(inst);
}

void StrategyEngine::reset(std::vector<TracePoint>& trace) {
  const LossState clean(*arch_);
  plan_.resetVisits();
  instances_.clear();
  switch (strategy_.kind) {
  case StrategyKind::RelocateTiles: {
    auto r = relocate(circuit_, plan_, *arch_, clean, dEff_, durations_, model_, 0.0);
    if (r.kind != RecoveryKind::Relocated) {
      throw Error(ErrorKind::NonterminatingConfig,
                  "circuit does not fit the first tile of a fresh array");
    }
    instances_.resize(1);
    setInstance(0, std::move(*r.circuit), r.tile);
    break;
  }
  case StrategyKind::PartialParallel:
  case StrategyKind::FullParallel: {
    const int k = strategy_.kind == StrategyKind::FullParallel
                      ? static_cast<int>(plan_.tiles.size())
                      : strategy_.instances;
    auto built = buildParallel(circuit_, plan_, k, *arch_, clean, dEff_, durations_);
    instances_.resize(built.size());
    for (std::size_t i = 0; i < built.size(); ++i) {
      setInstance(i, std::move(*built[i].circuit), built[i].tile);
    }
    break;
  }
  default: {
    CompileOptions options;
    options.loss = clean;
    options.dEff = dEff_;
    options.durations = durations_;
    instances_.resize(1);
    setInstance(0, compile(circuit_, *arch_, options), -1);
    break;
  }
  }
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    trace.push_back({0, instances_[i].success, TraceEvent::Start, static_cast<int>(i)});
  }
}

SiteSet StrategyEngine::othersUsed(std::size_t i) const {
  SiteSet out(*arch_);
  for (std::size_t j = 0; j < instances_.size(); ++j) {
    if (j != i) {
      out.merge(instances_[j].used);
    }
  }
  return out;
}

StrategyEngine::Adaptation StrategyEngine::adapt(const CompiledCircuit& cc,
                                                 const LossState& loss,
                                                 const SiteSet& newlyLost,
                                                 const SiteSet* forbidden) const {
  Adaptation out;
  CompiledCircuit cur = cc;
  for (const auto s : newlyLost.sites()) {
    if (!cur.usedSites(*arch_).contains(s)) {
      continue;
    }
    const auto r = strategy_.innerMethod() == InnerMethod::HardwareShift
                       ? shiftRemapHardware(cur, *arch_, loss, s, forbidden)
                       : shiftRemapInteraction(cur, *arch_, loss, s, arch_->dMax(),
                                               forbidden);
    out.reads += r.reads;
    out.writes += r.writes;
    if (r.kind == RecoveryKind::ReloadRequired) {
      return out;
    }
    cur = *r.circuit;
  }
  const auto r = rerouteOutOfRange(cur, *arch_, loss, arch_->dMax(), forbidden);
  out.reads += r.reads;
  out.writes += r.writes;
  if (r.kind == RecoveryKind::Adapted) {
    out.circuit = *r.circuit;
  }
  return out;
}

RecoveryReport StrategyEngine::recover(const LossState& loss,
                                       const SiteSet& newlyLost) {
  RecoveryReport report;
  std::vector<std::size_t> affected;
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (instances_[i].used.intersects(newlyLost)) {
      affected.push_back(i);
    }
  }
  if (affected.empty()) {
    return report;
  }
  report.invoked = true;
  const std::size_t lost = loss.count();
  const double minSuccess = strategy_.threshold * reference_;
  const auto fail = [&](std::size_t i, double p) {
    report.trace.push_back({lost, p, TraceEvent::Failed, static_cast<int>(i)});
    report.attempts.push_back({lost, false});
    report.reload = true;
    return report;
  };

  if (strategy_.kind == StrategyKind::ReloadAlways) {
    return fail(affected.front(), 0.0);
  }
  if (strategy_.kind == StrategyKind::Recompile) {
    const auto start = std::chrono::steady_clock::now();
    std::optional<CompiledCircuit> cc;
    try {
      CompileOptions options;
      options.loss = loss;
      options.dEff = dEff_;
      options.durations = durations_;
      cc = compile(circuit_, *arch_, options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientAtoms &&
          e.kind() != ErrorKind::RoutingFailure) {
        throw;
      }
    }
    report.hostTime = std::chrono::steady_clock::now() - start;
    const double p = cc ? estimateSuccess(*cc, model_) : 0.0;
    if (!cc || p < minSuccess) {
      return fail(0, p);
    }
    setInstance(0, std::move(*cc), -1);
    report.trace.push_back({lost, p, TraceEvent::Adapted, 0});
    report.attempts.push_back({lost, true});
    return report;
  }

  for (const auto i : affected) {
    const SiteSet forbidden = othersUsed(i);
    auto a = adapt(instances_[i].circuit, loss, newlyLost, &forbidden);
    report.reads += a.reads;
    report.writes += a.writes;
    const double p = a.circuit ? estimateSuccess(*a.circuit, model_) : 0.0;
    if (a.circuit && p >= strategy_.threshold * instances_[i].placed) {
      setInstance(i, std::move(*a.circuit), instances_[i].tile, false);
      report.trace.push_back({lost, p, TraceEvent::Adapted, static_cast<int>(i)});
      report.attempts.push_back({lost, true});
      continue;
    }
    if (strategy_.kind != StrategyKind::RelocateTiles &&
        strategy_.kind != StrategyKind::PartialParallel) {
      return fail(i, p);
    }
    report.trace.push_back({lost, p, TraceEvent::Failed, static_cast<int>(i)});
    auto r = relocate(circuit_, plan_, *arch_, loss, dEff_, durations_, model_,
                      std::max(minSuccess, p), &forbidden);
    report.reads += r.reads;
    report.writes += r.writes;
    if (r.kind != RecoveryKind::Relocated) {
      report.attempts.push_back({lost, false});
      report.reload = true;
      return report;
    }
    setInstance(i, std::move(*r.circuit), r.tile);
    ++report.relocations;
    report.trace.push_back(
        {lost, instances_[i].success, TraceEvent::Relocated, static_cast<int>(i)});
    report.attempts.push_back({lost, true});
  }
  return report;
}

} // namespace naloss
