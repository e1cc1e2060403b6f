#pragma once

#include "naloss/arch.hpp"
#include "naloss/circuits.hpp"
#include "naloss/timing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace naloss {

/// Program qubit -> site. Injective; sites are in bounds and not lost.
struct Mapping {
  std::vector<Site> sites;

  [[nodiscard]] std::size_t size() const noexcept { return sites.size(); }
  [[nodiscard]] Site operator[](std::size_t q) const { return sites[q]; }

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// Axis-aligned block of sites.
struct Region {
  Site origin;
  int height = 0;
  int width = 0;

  static Region whole(const Architecture& arch) {
    return {{0, 0}, arch.rows(), arch.cols()};
  }
  [[nodiscard]] bool contains(Site s) const noexcept {
    return s.row >= origin.row && s.row < origin.row + height &&
           s.col >= origin.col && s.col < origin.col + width;
  }
  [[nodiscard]] bool fits(const Architecture& arch) const noexcept {
    return height >= 1 && width >= 1 && arch.contains(origin) &&
           origin.row + height <= arch.rows() &&
           origin.col + width <= arch.cols();
  }
  [[nodiscard]] bool overlaps(const Region& o) const noexcept {
    return origin.row < o.origin.row + o.height &&
           o.origin.row < origin.row + height &&
           origin.col < o.origin.col + o.width &&
           o.origin.col < origin.col + width;
  }
  /// Sites outside this region (the complement within the array).
  [[nodiscard]] SiteSet outside(const Architecture& arch) const;

  friend bool operator==(const Region&, const Region&) = default;
};

/// Gate fidelities and ground-state coherence times.
struct ErrorModel {
  double oneQubitFidelity = 0.996;
  double twoQubitFidelity = 0.965;
  Duration t1Ground = std::chrono::seconds(7);
  Duration t2Ground = std::chrono::seconds(30);

  /// Throws Error(InvalidConfig).
  void validate() const;
  friend bool operator==(const ErrorModel&, const ErrorModel&) = default;
};

enum class GateOrigin {
  Source,  ///< gate of the input circuit
  Routing, ///< permanent SWAP inserted by the compiler
  Patch,   ///< swap-out / swap-back inserted while adapting to loss
};

struct PlacedGate {
  GateKind kind = GateKind::X;
  std::vector<Site> sites;
  std::vector<double> params;
  int sourceIndex = -1; ///< index into the source circuit, -1 for SWAPs
  GateOrigin origin = GateOrigin::Source;

  friend bool operator==(const PlacedGate&, const PlacedGate&) = default;
};

/// Gates that run concurrently.
struct TimeStep {
  std::vector<PlacedGate> gates;
  Duration duration{};

  friend bool operator==(const TimeStep&, const TimeStep&) = default;
};

/**
 * @brief A circuit placed on sites and scheduled.
 * @details groundTime[q] is the total duration minus the time of the steps in
 * which program qubit q takes part in a gate.
 */
struct CompiledCircuit {
  Circuit source;
  Mapping initialMapping;
  Mapping mapping; ///< after all SWAPs
  std::vector<TimeStep> steps;
  Duration totalDuration{};
  std::vector<Duration> groundTime;
  int swapCount = 0;
  double dEff = 0.0;
  GateDurations durations;

  [[nodiscard]] std::size_t gateCount() const;
  /// Every site that any gate or either mapping touches.
  [[nodiscard]] SiteSet usedSites(const Architecture& arch) const;
  /// Final sites of measured qubits.
  [[nodiscard]] std::vector<Site> measuredSites() const;

  friend bool operator==(const CompiledCircuit&, const CompiledCircuit&) = default;
};

struct CompileOptions {
  std::optional<Region> region; ///< whole array when empty
  LossState loss;               ///< may be default-constructed for no loss
  double dEff = 0.0;            ///< 0 selects the architecture's dMax
  GateDurations durations;
};

Duration gateDuration(GateKind kind, const GateDurations& durations);
double gateFidelity(GateKind kind, const ErrorModel& model);

/**
 * Greedy placement: qubits by descending two-qubit interaction count, the
 * first at the region center, each next one on the free site minimizing the
 * summed distance to its placed partners. Ties go row-major.
 * Throws Error(InsufficientAtoms) if the region has too few usable sites.
 */
Mapping mapCircuit(const Circuit& circuit, const Architecture& arch,
                   const std::optional<Region>& region, const LossState& loss);

/**
 * Inserts permanent SWAPs along shortest interaction paths (range dEff,
 * avoiding lost sites and sites outside the region) and packs gates
 * as-soon-as-possible subject to restriction zones.
 * Throws Error(RoutingFailure) when a required path does not exist.
 */
CompiledCircuit routeAndSchedule(const Circuit& circuit, const Mapping& mapping,
                                 const Architecture& arch, double dEff,
                                 const LossState& loss,
                                 const std::optional<Region>& region = std::nullopt,
                                 const GateDurations& durations = {});

/// exp(-dg/T1 - dg/T2): chance a qubit idle for dg keeps its state.
double decoherenceFactor(Duration groundTime, const ErrorModel& model);

/// Product of gate fidelities times the ground-state survival of each qubit.
double estimateSuccess(const CompiledCircuit& cc, const ErrorModel& model);

/// mapCircuit followed by routeAndSchedule.
CompiledCircuit compile(const Circuit& circuit, const Architecture& arch,
                        const CompileOptions& options = {});

/// As-soon-as-possible packing of gates given in dependency order.
std::vector<TimeStep> scheduleAsap(const Architecture& arch,
                                   const std::vector<PlacedGate>& gates);

/// Recomputes step durations, total duration, ground times, swap count and
/// the final mapping by replaying the schedule from the initial mapping.
void finalizeTiming(CompiledCircuit& cc);

/// True if two gates may share a time step (disjoint sites, neither inside
/// the other's restriction zone).
bool compatible(const Architecture& arch, const PlacedGate& a,
                const PlacedGate& b);

/**
 * Checks every structural invariant of a compiled circuit: mapping validity,
 * per-step disjointness and restriction zones, gate range <= `range`,
 * per-qubit dependency order and the ground-time bookkeeping.
 * Returns a description of the first violation, or nullopt.
 */
std::optional<std::string> checkCompiled(const CompiledCircuit& cc,
                                         const Architecture& arch,
                                         const LossState& loss, double range);

} // namespace naloss
