#include "naloss/sim.hpp"

#include "naloss/error.hpp"
#include "naloss/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace naloss {

std::string_view toString(CountMode mode) {
  return mode == CountMode::Successful ? "successful" : "attempted";
}

std::optional<CountMode> parseCountMode(std::string_view name) {
  if (name == "successful") {
    return CountMode::Successful;
  }
  if (name == "attempted") {
    return CountMode::Attempted;
  }
  return std::nullopt;
}

void SimConfig::validate() const {
  rates.validate();
  model.validate();
  if (shotTarget < 1) {
    throw Error(ErrorKind::InvalidConfig, "shot target must be at least 1");
  }
  const auto nonNegative = [](Duration d) { return d.count() >= 0.0; };
  if (!nonNegative(timing.fluorescence) || !nonNegative(timing.reload) ||
      !nonNegative(timing.tableRead) || !nonNegative(timing.tableWrite) ||
      !nonNegative(timing.gates.oneQubit) || !nonNegative(timing.gates.twoQubit) ||
      !nonNegative(timing.gates.threeQubit) || !nonNegative(timing.gates.swap)) {
    throw Error(ErrorKind::InvalidConfig, "times must be non-negative");
  }
}

double TrialRecord::avgShotsPerReload() const {
  if (cycleShots.empty()) {
    return static_cast<double>(openCycleShots);
  }
  const double sum = std::accumulate(cycleShots.begin(), cycleShots.end(), 0.0);
  return sum / static_cast<double>(cycleShots.size());
}

TrialRecord runTrial(const TrialSpec& spec, std::uint64_t seed) {
  spec.sim.validate();
  const auto& arch = spec.arch;
  const auto& sim = spec.sim;
  if (sim.countMode == CountMode::Successful &&
      (sim.rates.pEnv >= 1.0 || (sim.rates.pMeas >= 1.0 && !spec.circuit.measured.empty()))) {
    throw Error(ErrorKind::NonterminatingConfig,
                "every shot loses a computational atom, no shot can succeed");
  }
  const std::size_t maxShots =
      sim.maxShots > 0 ? sim.maxShots
                       : std::max<std::size_t>(1'000'000,
                                               1000 * static_cast<std::size_t>(sim.shotTarget));

  StrategyEngine engine(arch, spec.circuit, spec.strategy, sim.model, sim.timing.gates);
  TrialRecord rec;
  rec.seed = seed;
  rec.time.reload += sim.timing.reload;
  engine.reset(rec.trace);
  rec.instances = static_cast<int>(engine.instances().size());

  Rng rng(seed);
  LossState loss(arch);
  int cycle = 0;
  const auto progress = [&] {
    return sim.countMode == CountMode::Successful ? rec.successfulShots
                                                  : rec.attemptedShots();
  };
  std::vector<Site> measured;
  while (progress() < sim.shotTarget) {
    if (static_cast<std::size_t>(rec.aggregateShots) >= maxShots) {
      throw Error(ErrorKind::NonterminatingConfig,
                  "shot target not reached within the shot limit");
    }
    ++rec.aggregateShots;

    Duration exec{};
    measured.clear();
    for (const auto& inst : engine.instances()) {
      exec = std::max(exec, inst.circuit.totalDuration);
      for (const auto s : inst.circuit.measuredSites()) {
        measured.push_back(s);
      }
    }
    rec.time.execution += exec;

    SiteSet present(arch);
    for (std::size_t i = 0; i < arch.numSites(); ++i) {
      if (!loss.sites().containsIndex(i)) {
        present.insert(arch.site(i));
      }
    }
    const SiteSet newlyLost = sampleShotLosses(rng, arch, present, measured, sim.rates);
    for (const auto s : newlyLost.sites()) {
      loss.markLost(s);
    }
    for (const auto& inst : engine.instances()) {
      if (progress() >= sim.shotTarget) {
        break;
      }
      if (inst.used.intersects(newlyLost)) {
        ++rec.discardedShots;
      } else {
        ++rec.successfulShots;
        ++cycle;
      }
    }
    rec.time.fluorescence += sim.timing.fluorescence;

    auto report = engine.recover(loss, newlyLost);
    rec.time.strategy += recoveryCost(report.reads, report.writes, sim.timing);
    rec.recompileHostTime += report.hostTime;
    rec.relocations += report.relocations;
    rec.trace.insert(rec.trace.end(), report.trace.begin(), report.trace.end());
    rec.recoveries.insert(rec.recoveries.end(), report.attempts.begin(),
                          report.attempts.end());
    if (report.reload && progress() < sim.shotTarget) {
      ++rec.reloads;
      rec.time.reload += sim.timing.reload;
      rec.cycleShots.push_back(cycle);
      cycle = 0;
      loss.clear();
      rec.trace.push_back({0, 0.0, TraceEvent::Reload, 0});
      engine.reset(rec.trace);
    }
  }
  rec.openCycleShots = cycle;
  return rec;
}

std::vector<TrialRecord> runTrials(const TrialSpec& spec, int trials,
                                   std::uint64_t baseSeed, unsigned threads) {
  if (trials < 1) {
    throw Error(ErrorKind::InvalidConfig, "trial count must be at least 1");
  }
  if (threads == 0) {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
  std::vector<TrialRecord> out(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  const auto work = [&](unsigned worker) {
    for (auto i = static_cast<std::size_t>(worker); i < out.size(); i += threads) {
      try {
        out[i] = runTrial(spec, baseSeed + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back(work, w);
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

Stat describe(const std::vector<double>& values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) {
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (const double v : values) {
      sq += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

SummaryStats summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorKind::EmptyInput, "no trial records to summarize");
  }
  const auto collect = [&](auto fn) {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) {
      v.push_back(fn(r));
    }
    return describe(v);
  };
  SummaryStats s;
  s.trials = records.size();
  s.avgShotsPerReload = collect([](const TrialRecord& r) { return r.avgShotsPerReload(); });
  s.successfulShots = collect([](const TrialRecord& r) { return double(r.successfulShots); });
  s.reloads = collect([](const TrialRecord& r) { return double(r.reloads); });
  s.relocations = collect([](const TrialRecord& r) { return double(r.relocations); });
  s.execution = collect([](const TrialRecord& r) { return r.time.execution.count(); });
  s.fluorescence = collect([](const TrialRecord& r) { return r.time.fluorescence.count(); });
  s.reload = collect([](const TrialRecord& r) { return r.time.reload.count(); });
  s.strategy = collect([](const TrialRecord& r) { return r.time.strategy.count(); });
  s.overhead = collect([](const TrialRecord& r) { return r.time.overhead().count(); });
  s.total = collect([](const TrialRecord& r) { return r.time.total().count(); });

  std::map<std::size_t, std::vector<double>> pooled;
  for (const auto& r : records) {
    for (const auto& p : r.trace) {
      if (p.event == TraceEvent::Start || p.event == TraceEvent::Adapted ||
          p.event == TraceEvent::Relocated) {
        pooled[p.atomsLost].push_back(p.probability);
      }
    }
  }
  for (const auto& [lost, values] : pooled) {
    s.curve[lost] = describe(values);
  }
  return s;
}

TimeBreakdown overheadComponents(const TrialRecord& record) { return record.time; }

} // namespace naloss
