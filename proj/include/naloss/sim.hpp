#pragma once

#include "naloss/arch.hpp"
#include "naloss/circuits.hpp"
#include "naloss/compiler.hpp"
#include "naloss/loss.hpp"
#include "naloss/mitigation.hpp"
#include "naloss/timing.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace naloss {

/// What the shot target counts.
enum class CountMode { Successful, Attempted };
std::string_view toString(CountMode mode);
std::optional<CountMode> parseCountMode(std::string_view name);

struct SimConfig {
  LossRates rates;
  TimingModel timing;
  ErrorModel model;
  int shotTarget = 500;
  CountMode countMode = CountMode::Successful;
  /// Aggregate shots allowed per trial before giving up; 0 picks a default.
  std::size_t maxShots = 0;

  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Everything one trial needs except its seed.
struct TrialSpec {
  Architecture arch;
  Circuit circuit;
  Strategy strategy;
  SimConfig sim;
};

struct TimeBreakdown {
  Duration execution{};
  Duration fluorescence{};
  Duration reload{};
  Duration strategy{};

  [[nodiscard]] Duration total() const {
    return execution + fluorescence + reload + strategy;
  }
  [[nodiscard]] Duration overhead() const { return fluorescence + reload + strategy; }
  friend bool operator==(const TimeBreakdown&, const TimeBreakdown&) = default;
};

/**
 * @brief Event log of one Monte Carlo trial.
 * @details Shots are counted per instance: successfulShots + discardedShots
 * instance-shots were attempted over `aggregateShots` array executions.
 * cycleShots holds the successful shots of each completed reload cycle; the
 * trailing cycle that reached the target is in openCycleShots. The initial
 * load is charged one reload time but is not counted in `reloads`.
 */
struct TrialRecord {
  std::uint64_t seed = 0;
  int instances = 1;
  int successfulShots = 0;
  int discardedShots = 0;
  int aggregateShots = 0;
  int reloads = 0;
  int relocations = 0;
  std::vector<int> cycleShots;
  int openCycleShots = 0;
  TimeBreakdown time;
  std::vector<TracePoint> trace;
  std::vector<RecoveryAttempt> recoveries;
  /// Host time spent recompiling; reported separately, never in `time`.
  Duration recompileHostTime{};

  [[nodiscard]] double avgShotsPerReload() const;
  [[nodiscard]] int attemptedShots() const { return successfulShots + discardedShots; }
};

/// Runs shots until the target is met. Throws Error(NonterminatingConfig)
/// for configurations that cannot make progress.
TrialRecord runTrial(const TrialSpec& spec, std::uint64_t seed);

/// Trial i uses seed baseSeed + i; records come back in trial order.
/// threads = 0 uses the hardware concurrency.
std::vector<TrialRecord> runTrials(const TrialSpec& spec, int trials,
                                   std::uint64_t baseSeed, unsigned threads = 0);

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard deviation (n - 1 convention, 0 for n = 1).
Stat describe(const std::vector<double>& values);

struct SummaryStats {
  std::size_t trials = 0;
  Stat avgShotsPerReload;
  Stat successfulShots;
  Stat reloads;
  Stat relocations;
  Stat execution;
  Stat fluorescence;
  Stat reload;
  Stat strategy;
  Stat overhead;
  Stat total;
  /// Success estimates pooled by atoms lost (start, adapted, relocated points).
  std::map<std::size_t, Stat> curve;
};

/// Throws Error(EmptyInput) for no records.
SummaryStats summarize(const std::vector<TrialRecord>& records);

/// The additive time decomposition of one trial.
TimeBreakdown overheadComponents(const TrialRecord& record);

} // namespace naloss
