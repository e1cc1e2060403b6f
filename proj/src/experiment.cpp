#include "naloss/experiment.hpp"

#include "naloss/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <ostream>

namespace naloss {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void badConfig(const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, what);
}

template <class T> T parseNumber(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    badConfig(fmt::format("cannot read {} from '{}'", what, text));
  }
  return value;
}

/// Calls fn(key, value) for each member, rejecting non-objects.
template <class Fn> void eachMember(const json& j, std::string_view where, Fn fn) {
  if (!j.is_object()) {
    badConfig(fmt::format("'{}' must be an object", where));
  }
  for (const auto& [key, value] : j.items()) {
    if (!fn(key, value)) {
      badConfig(fmt::format("unknown key '{}' in '{}'", key, where));
    }
  }
}

double number(const json& v, std::string_view key) {
  if (!v.is_number()) {
    badConfig(fmt::format("'{}' must be a number", key));
  }
  return v.get<double>();
}

template <class Int> Int integer(const json& v, std::string_view key) {
  if (!v.is_number_integer()) {
    badConfig(fmt::format("'{}' must be an integer", key));
  }
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) {
      return v.get<Int>();
    }
    if (v.get<std::int64_t>() < 0) {
      badConfig(fmt::format("'{}' must not be negative", key));
    }
  }
  return v.get<Int>();
}

std::string text(const json& v, std::string_view key) {
  if (!v.is_string()) {
    badConfig(fmt::format("'{}' must be a string", key));
  }
  return v.get<std::string>();
}

template <class T, class Parse>
T named(const json& v, std::string_view key, Parse parse) {
  const auto s = text(v, key);
  const auto out = parse(s);
  if (!out) {
    badConfig(fmt::format("unknown {} '{}'", key, s));
  }
  return *out;
}

Duration seconds(const json& v, std::string_view key) {
  const double s = number(v, key);
  return Duration(s);
}

/// Takes the kind from a strategy name, and the box mode only if it is spelled out.
void applyStrategyName(Strategy& strategy, std::string_view name) {
  const auto parsed = Strategy::parse(name);
  strategy.kind = parsed.kind;
  if (name.ends_with("-loose") || name.ends_with("-tight")) {
    strategy.mode = parsed.mode;
  }
}

ordered_json mappingJson(const Mapping& m) {
  auto out = ordered_json::array();
  for (std::size_t q = 0; q < m.size(); ++q) {
    out.push_back({{"qubit", q}, {"row", m[q].row}, {"col", m[q].col}});
  }
  return out;
}

std::string_view originName(GateOrigin origin) {
  switch (origin) {
  case GateOrigin::Source:
    return "source";
  case GateOrigin::Routing:
    return "routing";
  case GateOrigin::Patch:
    return "patch";
  }
  return "?";
}

} // namespace

Circuit BenchmarkSpec::build() const {
  return makeBenchmark(kind, size, seed, density);
}

std::string_view toString(RestrictionRule rule) {
  return rule == RestrictionRule::HalfGateSpan ? "half-span" : "half-pitch";
}

std::optional<RestrictionRule> parseRestrictionRule(std::string_view name) {
  if (name == "half-span") {
    return RestrictionRule::HalfGateSpan;
  }
  if (name == "half-pitch") {
    return RestrictionRule::HalfPitch;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  const auto arch = architecture();
  if (!(benchmark.density >= 0.0 && benchmark.density <= 1.0)) {
    badConfig("benchmark density must lie in [0, 1]");
  }
  const auto circuit = benchmark.build();
  if (static_cast<std::size_t>(circuit.nQubits) > arch.numSites()) {
    throw Error(ErrorKind::CircuitTooLarge,
                fmt::format("{} qubits do not fit a {}x{} array",
                            circuit.nQubits, rows, cols));
  }
  strategy.validate(arch);
  sim.validate();
  if (trials < 1) {
    badConfig("trials must be at least 1");
  }
}

Architecture ExperimentConfig::architecture() const {
  return Architecture::grid(rows, cols, dMax, rule);
}

TrialSpec ExperimentConfig::trialSpec() const {
  return TrialSpec{architecture(), benchmark.build(), strategy, sim};
}

std::string configToJson(const ExperimentConfig& c) {
  const auto& t = c.sim.timing;
  ordered_json inner = nullptr;
  if (c.strategy.inner) {
    inner = std::string(toString(*c.strategy.inner));
  }
  ordered_json j = {
      {"architecture",
       {{"rows", c.rows},
        {"cols", c.cols},
        {"d_max", c.dMax},
        {"restriction", toString(c.rule)}}},
      {"benchmark",
       {{"kind", toString(c.benchmark.kind)},
        {"size", c.benchmark.size},
        {"seed", c.benchmark.seed},
        {"density", c.benchmark.density}}},
      {"strategy",
       {{"kind", toString(c.strategy.kind)},
        {"mode", toString(c.strategy.mode)},
        {"threshold", c.strategy.threshold},
        {"inner", inner},
        {"instances", c.strategy.instances},
        {"d_eff", c.strategy.dEff}}},
      {"rates", {{"p_env", c.sim.rates.pEnv}, {"p_meas", c.sim.rates.pMeas}}},
      {"timing",
       {{"fluorescence_s", t.fluorescence.count()},
        {"reload_s", t.reload.count()},
        {"table_read_s", t.tableRead.count()},
        {"table_write_s", t.tableWrite.count()},
        {"gate_1q_s", t.gates.oneQubit.count()},
        {"gate_2q_s", t.gates.twoQubit.count()},
        {"gate_3q_s", t.gates.threeQubit.count()},
        {"swap_s", t.gates.swap.count()}}},
      {"error_model",
       {{"f1q", c.sim.model.oneQubitFidelity},
        {"f2q", c.sim.model.twoQubitFidelity},
        {"t1_s", c.sim.model.t1Ground.count()},
        {"t2_s", c.sim.model.t2Ground.count()}}},
      {"shot_target", c.sim.shotTarget},
      {"count_mode", toString(c.sim.countMode)},
      {"max_shots", c.sim.maxShots},
      {"trials", c.trials},
      {"base_seed", c.baseSeed},
      {"threads", c.threads},
      {"output", {{"results", c.resultsPath}, {"curves", c.curvesPath}}},
  };
  return j.dump(2) + "\n";
}

ExperimentConfig configFromJson(std::string_view document, ExperimentConfig c) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::exception& e) {
    badConfig(fmt::format("config is not valid JSON: {}", e.what()));
  }
  auto& t = c.sim.timing;
  auto& m = c.sim.model;
  eachMember(root, "config", [&](const std::string& key, const json& v) {
    if (key == "architecture") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "rows") c.rows = integer<int>(x, k);
        else if (k == "cols") c.cols = integer<int>(x, k);
        else if (k == "d_max") c.dMax = number(x, k);
        else if (k == "restriction") c.rule = named<RestrictionRule>(x, k, parseRestrictionRule);
        else return false;
        return true;
      });
    } else if (key == "benchmark") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "kind") c.benchmark.kind = named<BenchmarkKind>(x, k, parseBenchmarkKind);
        else if (k == "size") c.benchmark.size = integer<int>(x, k);
        else if (k == "seed") c.benchmark.seed = integer<std::uint64_t>(x, k);
        else if (k == "density") c.benchmark.density = number(x, k);
        else return false;
        return true;
      });
    } else if (key == "strategy") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "kind") {
          applyStrategyName(c.strategy, text(x, k));
        } else if (k == "mode") {
          c.strategy.mode = named<BoxMode>(x, k, parseBoxMode);
        } else if (k == "threshold") {
          c.strategy.threshold = number(x, k);
        } else if (k == "inner") {
          if (x.is_null()) {
            c.strategy.inner.reset();
          } else {
            c.strategy.inner = named<InnerMethod>(x, k, parseInnerMethod);
          }
        } else if (k == "instances") {
          c.strategy.instances = integer<int>(x, k);
        } else if (k == "d_eff") {
          c.strategy.dEff = number(x, k);
        } else {
          return false;
        }
        return true;
      });
    } else if (key == "rates") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "p_env") c.sim.rates.pEnv = number(x, k);
        else if (k == "p_meas") c.sim.rates.pMeas = number(x, k);
        else return false;
        return true;
      });
    } else if (key == "timing") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "fluorescence_s") t.fluorescence = seconds(x, k);
        else if (k == "reload_s") t.reload = seconds(x, k);
        else if (k == "table_read_s") t.tableRead = seconds(x, k);
        else if (k == "table_write_s") t.tableWrite = seconds(x, k);
        else if (k == "gate_1q_s") t.gates.oneQubit = seconds(x, k);
        else if (k == "gate_2q_s") t.gates.twoQubit = seconds(x, k);
        else if (k == "gate_3q_s") t.gates.threeQubit = seconds(x, k);
        else if (k == "swap_s") t.gates.swap = seconds(x, k);
        else return false;
        return true;
      });
    } else if (key == "error_model") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "f1q") m.oneQubitFidelity = number(x, k);
        else if (k == "f2q") m.twoQubitFidelity = number(x, k);
        else if (k == "t1_s") m.t1Ground = seconds(x, k);
        else if (k == "t2_s") m.t2Ground = seconds(x, k);
        else return false;
        return true;
      });
    } else if (key == "shot_target") {
      c.sim.shotTarget = integer<int>(v, key);
    } else if (key == "count_mode") {
      c.sim.countMode = named<CountMode>(v, key, parseCountMode);
    } else if (key == "max_shots") {
      c.sim.maxShots = integer<std::size_t>(v, key);
    } else if (key == "trials") {
      c.trials = integer<int>(v, key);
    } else if (key == "base_seed") {
      c.baseSeed = integer<std::uint64_t>(v, key);
    } else if (key == "threads") {
      c.threads = integer<unsigned>(v, key);
    } else if (key == "output") {
      eachMember(v, key, [&](const std::string& k, const json& x) {
        if (k == "results") c.resultsPath = text(x, k);
        else if (k == "curves") c.curvesPath = text(x, k);
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  return c;
}

std::string circuitToJson(const Circuit& circuit) {
  auto gates = ordered_json::array();
  for (const auto& g : circuit.gates) {
    gates.push_back({{"kind", toString(g.kind)},
                     {"qubits", g.qubits},
                     {"params", g.params}});
  }
  ordered_json j = {{"n_qubits", circuit.nQubits},
                    {"gates", gates},
                    {"measured", circuit.measured}};
  return j.dump(2) + "\n";
}

Circuit circuitFromJson(std::string_view document) {
  Circuit c;
  try {
    const auto j = json::parse(document);
    c.nQubits = j.at("n_qubits").get<int>();
    for (const auto& g : j.at("gates")) {
      const auto name = g.at("kind").get<std::string>();
      const auto kind = parseGateKind(name);
      if (!kind) {
        throw Error(ErrorKind::InvalidCircuit, fmt::format("unknown gate '{}'", name));
      }
      Gate gate{*kind, g.at("qubits").get<std::vector<int>>(), {}};
      if (g.contains("params")) {
        gate.params = g.at("params").get<std::vector<double>>();
      }
      c.gates.push_back(std::move(gate));
    }
    c.measured = j.at("measured").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidCircuit, fmt::format("bad circuit JSON: {}", e.what()));
  }
  c.validate();
  return c;
}

std::string compiledToJson(const CompiledCircuit& cc, double successEstimate) {
  auto steps = ordered_json::array();
  for (const auto& step : cc.steps) {
    auto gates = ordered_json::array();
    for (const auto& g : step.gates) {
      auto sites = ordered_json::array();
      for (const auto s : g.sites) {
        sites.push_back({s.row, s.col});
      }
      gates.push_back({{"kind", toString(g.kind)},
                       {"sites", sites},
                       {"params", g.params},
                       {"origin", originName(g.origin)},
                       {"source_index", g.sourceIndex}});
    }
    steps.push_back({{"duration_s", step.duration.count()}, {"gates", gates}});
  }
  auto ground = ordered_json::array();
  for (const auto d : cc.groundTime) {
    ground.push_back(d.count());
  }
  ordered_json j = {{"n_qubits", cc.source.nQubits},
                    {"d_eff", cc.dEff},
                    {"swap_count", cc.swapCount},
                    {"total_duration_s", cc.totalDuration.count()},
                    {"success_estimate", successEstimate},
                    {"initial_mapping", mappingJson(cc.initialMapping)},
                    {"final_mapping", mappingJson(cc.mapping)},
                    {"ground_time_s", ground},
                    {"steps", steps}};
  return j.dump(2) + "\n";
}

const std::vector<std::string>& resultsColumns() {
  static const std::vector<std::string> cols{
      "trial",          "benchmark",        "n_qubits",   "dmax",
      "strategy",       "shots_target",     "successful_shots",
      "reloads",        "relocations",      "avg_shots_per_reload",
      "t_exec_s",       "t_fluor_s",        "t_reload_s", "t_strategy_s",
      "t_total_s"};
  return cols;
}

const std::vector<std::string>& curveColumns() {
  static const std::vector<std::string> cols{"benchmark", "strategy", "atoms_lost",
                                             "mean_prob", "std_prob"};
  return cols;
}

void writeResultsHeader(std::ostream& out) {
  out << fmt::format("{}\n", fmt::join(resultsColumns(), ","));
}

void writeResultsRows(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<TrialRecord>& records) {
  const auto nQubits = config.benchmark.build().nQubits;
  const auto bench = toString(config.benchmark.kind);
  const auto label = config.strategy.label();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i, bench,
                       nQubits, config.dMax, label, config.sim.shotTarget,
                       r.successfulShots, r.reloads, r.relocations,
                       r.avgShotsPerReload(), r.time.execution.count(),
                       r.time.fluorescence.count(), r.time.reload.count(),
                       r.time.strategy.count(), r.time.total().count());
  }
}

void writeCurvesHeader(std::ostream& out) {
  out << fmt::format("{}\n", fmt::join(curveColumns(), ","));
}

void writeCurveRows(std::ostream& out, const ExperimentConfig& config,
                    const SummaryStats& stats) {
  const auto bench = toString(config.benchmark.kind);
  const auto label = config.strategy.label();
  for (const auto& [lost, stat] : stats.curve) {
    out << fmt::format("{},{},{},{},{}\n", bench, label, lost, stat.mean, stat.std);
  }
}

void writeSummary(std::ostream& out, const ExperimentConfig& config,
                  const SummaryStats& s) {
  out << fmt::format("{}-{} on {}x{}, dmax {}, {}, {} trials of {} shots\n",
                     toString(config.benchmark.kind), config.benchmark.size,
                     config.rows, config.cols, config.dMax, config.strategy.label(),
                     s.trials, config.sim.shotTarget);
  const auto row = [&](std::string_view name, const Stat& st) {
    out << fmt::format("  {:<22}{:>14.4f} +/- {:.4f}\n", name, st.mean, st.std);
  };
  row("avg_shots_per_reload", s.avgShotsPerReload);
  row("successful_shots", s.successfulShots);
  row("reloads", s.reloads);
  row("relocations", s.relocations);
  row("t_exec_s", s.execution);
  row("t_fluor_s", s.fluorescence);
  row("t_reload_s", s.reload);
  row("t_strategy_s", s.strategy);
  row("t_overhead_s", s.overhead);
  row("t_total_s", s.total);
}

std::string_view toString(SweepAxis axis) {
  switch (axis) {
  case SweepAxis::Strategy:
    return "strategy";
  case SweepAxis::DMax:
    return "dmax";
  case SweepAxis::Size:
    return "size";
  case SweepAxis::Instances:
    return "instances";
  }
  return "?";
}

std::optional<SweepAxis> parseSweepAxis(std::string_view name) {
  for (const auto a : {SweepAxis::Strategy, SweepAxis::DMax, SweepAxis::Size,
                       SweepAxis::Instances}) {
    if (toString(a) == name) {
      return a;
    }
  }
  return std::nullopt;
}

std::vector<ExperimentConfig> expandSweep(const ExperimentConfig& base, SweepAxis axis,
                                          const std::vector<std::string>& values) {
  if (values.empty()) {
    throw Error(ErrorKind::EmptyInput,
                fmt::format("sweep over {} has no values", toString(axis)));
  }
  std::vector<ExperimentConfig> out;
  for (const auto& v : values) {
    auto c = base;
    switch (axis) {
    case SweepAxis::Strategy: {
      applyStrategyName(c.strategy, v);
      break;
    }
    case SweepAxis::DMax:
      c.dMax = parseNumber<double>(v, "dmax");
      break;
    case SweepAxis::Size:
      c.benchmark.size = parseNumber<int>(v, "size");
      break;
    case SweepAxis::Instances:
      c.strategy.instances = parseNumber<int>(v, "instances");
      break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

} // namespace naloss
