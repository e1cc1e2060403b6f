#pragma once

#include "naloss/arch.hpp"
#include "naloss/compiler.hpp"
#include "naloss/timing.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace naloss {

enum class BoxMode { Loose, Tight };
enum class InnerMethod { HardwareShift, InteractionShift };

enum class StrategyKind {
  ReloadAlways,
  Recompile,
  HardwareShift,
  InteractionShift,
  RerouteSmallerD,
  RelocateTiles,
  FullParallel,
  PartialParallel,
};

std::string_view toString(StrategyKind kind);
std::string_view toString(BoxMode mode);
std::string_view toString(InnerMethod method);
std::optional<BoxMode> parseBoxMode(std::string_view name);
std::optional<InnerMethod> parseInnerMethod(std::string_view name);

/**
 * @brief How a trial copes with lost atoms.
 * @details Unset knobs take per-kind defaults: the compile distance is
 * dMax - 1 for reroute, relocate and partial-parallel and dMax otherwise; the
 * inner method is hardware shift except for the parallel kinds.
 */
struct Strategy {
  StrategyKind kind = StrategyKind::RerouteSmallerD;
  BoxMode mode = BoxMode::Loose;
  double threshold = 0.5;
  std::optional<InnerMethod> inner;
  int instances = 2;
  double dEff = 0.0; ///< 0 selects the per-kind default

  /// Accepts reload, recompile, hardware-shift, interaction-shift, reroute,
  /// relocate[-loose|-tight], full-parallel[-loose|-tight] and
  /// partial-parallel[-loose|-tight]. Throws Error(InvalidConfig).
  static Strategy parse(std::string_view name);

  /// Stable identifier used in result tables.
  [[nodiscard]] std::string label() const;
  [[nodiscard]] InnerMethod innerMethod() const;
  [[nodiscard]] double compileDistance(const Architecture& arch) const;
  [[nodiscard]] bool usesTiles() const noexcept;
  /// Throws Error(InvalidConfig).
  void validate(const Architecture& arch) const;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Loose: ceil(sqrt n) square. Tight: ceil(sqrt n) rows by ceil(n / rows).
std::pair<int, int> boundingBox(int nQubits, BoxMode mode);

/// Candidate regions for focused use, visited at most once per reload.
struct TilePlan {
  int boxHeight = 0;
  int boxWidth = 0;
  std::vector<Region> tiles;
  std::vector<bool> visited;

  void resetVisits() { visited.assign(tiles.size(), false); }
  [[nodiscard]] std::size_t visitedCount() const;
};

/**
 * Row-major tiles at strides of the bounding box; the last tile on each axis
 * is clamped to the array edge. Throws Error(CircuitTooLarge).
 */
TilePlan makeTilePlan(const Architecture& arch, int nQubits, BoxMode mode);

/**
 * Pairwise-disjoint tiles for running as many copies as possible at once.
 * The box shape maximizes floor(rows/h) * floor(cols/w); ties prefer the
 * mode's bounding box, then the smaller area, the squarer box, the taller box.
 */
TilePlan makeDisjointPlan(const Architecture& arch, int nQubits, BoxMode mode);

enum class RecoveryKind { Adapted, Relocated, ReloadRequired };
std::string_view toString(RecoveryKind kind);

struct RecoveryOutcome {
  RecoveryKind kind = RecoveryKind::ReloadRequired;
  std::optional<CompiledCircuit> circuit;
  int tile = -1;
  std::size_t reads = 0;
  std::size_t writes = 0;
  Duration computeTime{}; ///< measured host time, only for recompilation
};

/**
 * Moves the qubit on `lostSite` one site along the axis direction with the
 * most free sites, pushing the mapped qubits in front of it up to the first
 * free site. Lost sites are skipped; a forbidden site, or a run of lost
 * sites too long to hop within dMax, ends a direction. Ties go up, down,
 * left, right. Gates are relabeled; none are added.
 */
RecoveryOutcome shiftRemapHardware(const CompiledCircuit& cc,
                                   const Architecture& arch,
                                   const LossState& loss, Site lostSite,
                                   const SiteSet* forbidden = nullptr);

/// Shifts mapped qubits one position along the shortest interaction path
/// (range d) from `lostSite` to the nearest free site.
RecoveryOutcome shiftRemapInteraction(const CompiledCircuit& cc,
                                      const Architecture& arch,
                                      const LossState& loss, Site lostSite,
                                      double d,
                                      const SiteSet* forbidden = nullptr);

/**
 * Brings every gate back within `range` by swapping operands along shortest
 * paths of non-lost atoms, running the gate and swapping back. Patches run
 * after the other gates of their step so the mapping between steps is kept.
 */
RecoveryOutcome rerouteOutOfRange(const CompiledCircuit& cc,
                                  const Architecture& arch,
                                  const LossState& loss, double range,
                                  const SiteSet* forbidden = nullptr);

/**
 * Compiles into the next unvisited tile (row-major) containing none of
 * `avoid`. Tiles that cannot hold the circuit or whose estimate is below
 * `minSuccess` are marked visited and skipped. ReloadRequired once every
 * tile has been visited.
 */
RecoveryOutcome relocate(const Circuit& circuit, TilePlan& plan,
                         const Architecture& arch, const LossState& loss,
                         double dEff, const GateDurations& durations,
                         const ErrorModel& model, double minSuccess,
                         const SiteSet* avoid = nullptr);

/// One instance per tile on the first `instances` pairwise-disjoint tiles,
/// returned as Relocated outcomes. Throws Error(NotEnoughDisjointTiles).
std::vector<RecoveryOutcome>
buildParallel(const Circuit& circuit, TilePlan& plan, int instances,
              const Architecture& arch, const LossState& loss, double dEff,
              const GateDurations& durations);

Duration recoveryCost(std::size_t reads, std::size_t writes,
                      const TimingModel& timing);
Duration recoveryCost(const RecoveryOutcome& outcome, const TimingModel& timing);

enum class TraceEvent { Start, Adapted, Failed, Relocated, Reload };
std::string_view toString(TraceEvent event);

/// Estimated success of one instance after a recovery decision.
struct TracePoint {
  std::size_t atomsLost = 0;
  double probability = 0.0;
  TraceEvent event = TraceEvent::Start;
  int instance = 0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Whether recovery from a loss event kept the circuit running.
struct RecoveryAttempt {
  std::size_t atomsLost = 0;
  bool succeeded = false;

  friend bool operator==(const RecoveryAttempt&, const RecoveryAttempt&) = default;
};

struct RecoveryReport {
  bool reload = false;
  bool invoked = false;
  std::size_t reads = 0;
  std::size_t writes = 0;
  int relocations = 0;
  Duration hostTime{};
  std::vector<TracePoint> trace;
  std::vector<RecoveryAttempt> attempts;
};

/// A running copy of the circuit.
struct Instance {
  CompiledCircuit circuit;
  SiteSet used;
  int tile = -1;
  double success = 0.0;
  /// Estimate when the instance was placed; the threshold is relative to it.
  double placed = 0.0;
};

/**
 * @brief Strategy state of one trial.
 * @details Owns the tile plan and the running instances. reset() prepares a
 * freshly loaded array; recover() reacts to the atoms lost in one shot.
 */
class StrategyEngine {
public:
  /// Throws Error(NonterminatingConfig) if the circuit cannot run on a
  /// fresh array under this strategy.
  StrategyEngine(const Architecture& arch, Circuit circuit, Strategy strategy,
                 ErrorModel model, GateDurations durations);

  void reset(std::vector<TracePoint>& trace);
  RecoveryReport recover(const LossState& loss, const SiteSet& newlyLost);

  [[nodiscard]] const std::vector<Instance>& instances() const noexcept {
    return instances_;
  }
  /// Success estimate of the loss-free compilation each cycle starts from.
  [[nodiscard]] double reference() const noexcept { return reference_; }
  [[nodiscard]] const Strategy& strategy() const noexcept { return strategy_; }
  [[nodiscard]] const TilePlan& plan() const noexcept { return plan_; }

private:
  struct Adaptation {
    std::optional<CompiledCircuit> circuit;
    std::size_t reads = 0;
    std::size_t writes = 0;
  };
  Adaptation adapt(const CompiledCircuit& cc, const LossState& loss,
                   const SiteSet& newlyLost, const SiteSet* forbidden) const;
  [[nodiscard]] SiteSet othersUsed(std::size_t i) const;
  void setInstance(std::size_t i, CompiledCircuit cc, int tile, bool placed = true);

  const Architecture* arch_;
  Circuit circuit_;
  Strategy strategy_;
  ErrorModel model_;
  GateDurations durations_;
  double dEff_ = 0.0;
  double reference_ = 0.0;
  TilePlan plan_;
  std::vector<Instance> instances_;
};

} // namespace naloss
