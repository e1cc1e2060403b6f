#include "naloss/error.hpp"
#include "naloss/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace naloss;

namespace {

TrialSpec spec(const std::string& strategy, Circuit c, int shots = 200) {
  TrialSpec s{Architecture::grid(10, 10, 4), std::move(c), Strategy::parse(strategy), {}};
  s.sim.shotTarget = shots;
  return s;
}

double secs(Duration d) { return d.count(); }

void expectKind(ErrorKind kind, auto fn) {
  try {
    fn();
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

} // namespace

TEST(Trial, LosslessNeverReloads) {
  auto s = spec("reroute", cuccaroTotal(10), 300);
  s.sim.rates = {0.0, 0.0};
  const auto r = runTrial(s, 1);
  EXPECT_EQ(r.reloads, 0);
  EXPECT_EQ(r.successfulShots, 300);
  EXPECT_EQ(r.discardedShots, 0);
  EXPECT_EQ(r.aggregateShots, 300);
  EXPECT_EQ(r.openCycleShots, 300);
  EXPECT_EQ(r.avgShotsPerReload(), 300.0);
  EXPECT_NEAR(secs(r.time.fluorescence), 300 * 0.006, 1e-9);
  EXPECT_NEAR(secs(r.time.reload), 0.32, 1e-12); // initial load only
  EXPECT_EQ(secs(r.time.strategy), 0.0);
}

TEST(Trial, ReloadAlwaysAccounting) {
  auto s = spec("reload", linearVqe(10, 0), 400);
  const auto r = runTrial(s, 7);
  EXPECT_EQ(r.successfulShots, 400);
  EXPECT_EQ(r.relocations, 0);
  EXPECT_EQ(secs(r.time.strategy), 0.0);
  EXPECT_EQ(static_cast<int>(r.cycleShots.size()), r.reloads);
  // Every reload follows a shot that lost a used atom, which is discarded.
  EXPECT_EQ(r.discardedShots, r.reloads);
  int credited = r.openCycleShots;
  for (const int c : r.cycleShots) {
    credited += c;
  }
  EXPECT_EQ(credited, r.successfulShots);
}

TEST(Trial, TimeComponentsAddUp) {
  for (const auto* name : {"reload", "recompile", "hardware-shift", "interaction-shift",
                           "reroute", "relocate", "relocate-tight", "full-parallel",
                           "partial-parallel"}) {
    auto s = spec(name, cuccaroTotal(10), 150);
    const auto r = runTrial(s, 3);
    const TimingModel t;
    EXPECT_NEAR(secs(r.time.fluorescence), r.aggregateShots * secs(t.fluorescence), 1e-9)
        << name;
    EXPECT_NEAR(secs(r.time.reload), (r.reloads + 1) * secs(t.reload), 1e-9) << name;
    EXPECT_GE(secs(r.time.strategy), 0.0);
    EXPECT_GT(secs(r.time.execution), 0.0);
    const auto b = overheadComponents(r);
    EXPECT_EQ(b, r.time);
    EXPECT_NEAR(secs(b.total()),
                secs(b.execution) + secs(b.fluorescence) + secs(b.reload) + secs(b.strategy),
                1e-12);
    EXPECT_EQ(r.successfulShots, 150) << name;
  }
}

TEST(Trial, FluorescenceFloor) {
  const double tf = 0.006;
  for (const auto* name : {"reload", "reroute", "relocate"}) {
    auto s = spec(name, cnuTotal(10), 300);
    const auto r = runTrial(s, 11);
    EXPECT_GE(secs(r.time.fluorescence) + 1e-12, r.successfulShots * tf);
    if (r.discardedShots == 0) {
      EXPECT_NEAR(secs(r.time.fluorescence), r.successfulShots * tf, 1e-9);
    } else {
      EXPECT_GT(secs(r.time.fluorescence), r.successfulShots * tf);
    }
  }
}

TEST(Trial, SameSeedSameRecord) {
  const auto s = spec("relocate", cuccaroTotal(10), 200);
  const auto a = runTrial(s, 42);
  const auto b = runTrial(s, 42);
  EXPECT_EQ(a.successfulShots, b.successfulShots);
  EXPECT_EQ(a.discardedShots, b.discardedShots);
  EXPECT_EQ(a.cycleShots, b.cycleShots);
  EXPECT_EQ(a.time, b.time);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.recoveries, b.recoveries);
}

TEST(Trial, ThreadCountDoesNotMatter) {
  const auto s = spec("reroute", qaoa(10, 0.2, 1), 150);
  const auto one = runTrials(s, 6, 100, 1);
  const auto four = runTrials(s, 6, 100, 4);
  ASSERT_EQ(one.size(), 6u);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].seed, 100 + i);
    EXPECT_EQ(one[i].time, four[i].time);
    EXPECT_EQ(one[i].cycleShots, four[i].cycleShots);
    EXPECT_EQ(one[i].trace, four[i].trace);
  }
}

TEST(Trial, FullParallelCreditsEveryInstance) {
  auto s = spec("full-parallel", cuccaroTotal(10), 100);
  s.sim.rates = {0.0, 0.0};
  const auto r = runTrial(s, 5);
  EXPECT_EQ(r.instances, 10);
  EXPECT_EQ(r.aggregateShots, 10);
  EXPECT_EQ(r.successfulShots, 100);

  auto p = spec("partial-parallel", cuccaroTotal(10), 101);
  p.sim.rates = {0.0, 0.0};
  const auto q = runTrial(p, 5);
  EXPECT_EQ(q.instances, 2);
  EXPECT_EQ(q.aggregateShots, 51); // ceil(101 / 2)
  EXPECT_EQ(q.successfulShots, 101);
}

TEST(Trial, AttemptedCountMode) {
  auto s = spec("reroute", cuccaroTotal(10), 300);
  s.sim.rates = {0.01, 0.1};
  s.sim.countMode = CountMode::Attempted;
  const auto r = runTrial(s, 9);
  EXPECT_EQ(r.attemptedShots(), 300);
  EXPECT_LT(r.successfulShots, 300);
}

TEST(Trial, CertainLossIsRejected) {
  auto s = spec("reroute", cuccaroTotal(10));
  s.sim.rates = {0.0, 1.0};
  expectKind(ErrorKind::NonterminatingConfig, [&] { (void)runTrial(s, 0); });
  s.sim.rates = {1.0, 0.0};
  expectKind(ErrorKind::NonterminatingConfig, [&] { (void)runTrial(s, 0); });
}

TEST(Trial, ShotLimitStopsRunawayTrials) {
  auto s = spec("reload", cuccaroTotal(10), 100);
  s.sim.rates = {0.3, 0.0};
  s.sim.maxShots = 50;
  expectKind(ErrorKind::NonterminatingConfig, [&] { (void)runTrial(s, 0); });
}

TEST(Trial, BadSimConfig) {
  auto s = spec("reroute", cuccaroTotal(10));
  s.sim.shotTarget = 0;
  expectKind(ErrorKind::InvalidConfig, [&] { (void)runTrial(s, 0); });
  s = spec("reroute", cuccaroTotal(10));
  s.sim.timing.reload = Duration{-1};
  expectKind(ErrorKind::InvalidConfig, [&] { (void)runTrial(s, 0); });
  expectKind(ErrorKind::InvalidConfig, [&] { (void)runTrials(spec("reroute", cuccaroTotal(10)), 0, 0); });
}

TEST(Summary, SingleRecordHasZeroSpread) {
  TrialRecord r;
  r.cycleShots = {10, 30};
  r.successfulShots = 40;
  const auto s = summarize({r});
  EXPECT_EQ(s.trials, 1u);
  EXPECT_EQ(s.avgShotsPerReload.mean, 20.0);
  EXPECT_EQ(s.avgShotsPerReload.std, 0.0);
}

TEST(Summary, MeanAndSampleStd) {
  TrialRecord a;
  a.cycleShots = {10};
  TrialRecord b;
  b.cycleShots = {30};
  const auto s = summarize({a, b});
  EXPECT_EQ(s.avgShotsPerReload.mean, 20.0);
  EXPECT_NEAR(s.avgShotsPerReload.std, std::sqrt(200.0), 1e-12);
  const auto d = describe({1, 2, 3, 4});
  EXPECT_EQ(d.mean, 2.5);
  EXPECT_NEAR(d.std, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(d.count, 4u);
}

TEST(Summary, EmptyInput) {
  expectKind(ErrorKind::EmptyInput, [] { (void)summarize({}); });
}

TEST(Summary, OpenCycleFallback) {
  TrialRecord r;
  r.openCycleShots = 17;
  EXPECT_EQ(r.avgShotsPerReload(), 17.0);
}

TEST(Summary, CurvePoolsStartAdaptedRelocated) {
  TrialRecord r;
  r.trace = {{0, 0.8, TraceEvent::Start, 0},   {1, 0.7, TraceEvent::Adapted, 0},
             {2, 0.0, TraceEvent::Failed, 0},  {2, 0.9, TraceEvent::Relocated, 0},
             {2, 0.0, TraceEvent::Reload, 0},  {1, 0.5, TraceEvent::Adapted, 0}};
  const auto s = summarize({r});
  ASSERT_EQ(s.curve.size(), 3u);
  EXPECT_EQ(s.curve.at(0).mean, 0.8);
  EXPECT_NEAR(s.curve.at(1).mean, 0.6, 1e-12);
  EXPECT_EQ(s.curve.at(1).count, 2u);
  EXPECT_EQ(s.curve.at(2).mean, 0.9);
}
