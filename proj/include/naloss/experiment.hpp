#pragma once

#include "naloss/arch.hpp"
#include "naloss/circuits.hpp"
#include "naloss/compiler.hpp"
#include "naloss/mitigation.hpp"
#include "naloss/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace naloss {

struct BenchmarkSpec {
  BenchmarkKind kind = BenchmarkKind::Cuccaro;
  int size = 10;
  std::uint64_t seed = 0;
  double density = 0.2; ///< QAOA edge probability

  [[nodiscard]] Circuit build() const;
  friend bool operator==(const BenchmarkSpec&, const BenchmarkSpec&) = default;
};

/**
 * @brief Everything a simulate or sweep run needs.
 * @details Defaults are the device constants used throughout the library;
 * a JSON config may set any subset of keys and flags override both.
 */
struct ExperimentConfig {
  int rows = 10;
  int cols = 10;
  double dMax = 4.0;
  RestrictionRule rule = RestrictionRule::HalfGateSpan;
  BenchmarkSpec benchmark;
  Strategy strategy;
  SimConfig sim;
  int trials = 50;
  std::uint64_t baseSeed = 0;
  unsigned threads = 0;
  std::string resultsPath = "results.csv";
  std::string curvesPath = "curves.csv";

  /// Throws Error with a validation kind.
  void validate() const;
  [[nodiscard]] Architecture architecture() const;
  [[nodiscard]] TrialSpec trialSpec() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string_view toString(RestrictionRule rule);
std::optional<RestrictionRule> parseRestrictionRule(std::string_view name);

/// Pretty-printed JSON with every key present.
std::string configToJson(const ExperimentConfig& config);

/**
 * Applies the keys of a JSON document on top of `base`. Unknown keys and
 * wrongly typed values throw Error(InvalidConfig).
 */
ExperimentConfig configFromJson(std::string_view json, ExperimentConfig base = {});

/// {"n_qubits", "gates": [{"kind", "qubits", "params"}], "measured"}.
std::string circuitToJson(const Circuit& circuit);
/// Throws Error(InvalidCircuit) on malformed input.
Circuit circuitFromJson(std::string_view json);

/// Mapping tables, steps with placed gates and durations, swap count.
std::string compiledToJson(const CompiledCircuit& cc, double successEstimate);

/// Column names of the per-trial results table, in order.
const std::vector<std::string>& resultsColumns();
/// Column names of the success-curve table, in order.
const std::vector<std::string>& curveColumns();

void writeResultsHeader(std::ostream& out);
void writeResultsRows(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<TrialRecord>& records);
void writeCurvesHeader(std::ostream& out);
void writeCurveRows(std::ostream& out, const ExperimentConfig& config,
                    const SummaryStats& stats);

/// Human-readable means and standard deviations.
void writeSummary(std::ostream& out, const ExperimentConfig& config,
                  const SummaryStats& stats);

enum class SweepAxis { Strategy, DMax, Size, Instances };
std::string_view toString(SweepAxis axis);
std::optional<SweepAxis> parseSweepAxis(std::string_view name);

/// One configuration per value. Throws Error(EmptyInput) for no values and
/// Error(InvalidConfig) for values that do not parse.
std::vector<ExperimentConfig> expandSweep(const ExperimentConfig& base,
                                          SweepAxis axis,
                                          const std::vector<std::string>& values);

} // namespace naloss
