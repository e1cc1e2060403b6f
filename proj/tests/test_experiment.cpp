#include "naloss/error.hpp"
#include "naloss/experiment.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace naloss;

namespace {

void expectKind(ErrorKind kind, auto fn) {
  try {
    fn();
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

std::vector<std::string> splitLine(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    out.push_back(cell);
  }
  return out;
}

} // namespace

TEST(Config, DefaultsMatchDeviceConstants) {
  const ExperimentConfig c;
  EXPECT_EQ(c.rows, 10);
  EXPECT_EQ(c.cols, 10);
  EXPECT_EQ(c.sim.rates.pEnv, 0.00068);
  EXPECT_EQ(c.sim.rates.pMeas, 0.02);
  EXPECT_EQ(c.sim.timing.fluorescence.count(), 0.006);
  EXPECT_EQ(c.sim.timing.reload.count(), 0.32);
  EXPECT_EQ(c.sim.model.oneQubitFidelity, 0.996);
  EXPECT_EQ(c.sim.model.twoQubitFidelity, 0.965);
  EXPECT_EQ(c.sim.shotTarget, 500);
  EXPECT_EQ(c.trials, 50);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTripIsExact) {
  ExperimentConfig c;
  c.rows = 8;
  c.dMax = 3.5;
  c.rule = RestrictionRule::HalfPitch;
  c.benchmark = {BenchmarkKind::QAOA, 12, 9, 0.35};
  c.strategy = Strategy::parse("partial-parallel-tight");
  c.strategy.instances = 3;
  c.strategy.threshold = 0.7;
  c.strategy.inner = InnerMethod::HardwareShift;
  c.strategy.dEff = 2.5;
  c.sim.rates = {0.001, 0.03};
  c.sim.timing.tableRead = Duration{41e-9};
  c.sim.model.t2Ground = Duration{12.5};
  c.sim.countMode = CountMode::Attempted;
  c.sim.maxShots = 12345;
  c.trials = 7;
  c.baseSeed = 99;
  c.threads = 2;
  c.resultsPath = "a.csv";
  c.curvesPath = "b.csv";
  const auto text = configToJson(c);
  EXPECT_EQ(configFromJson(text), c);
  EXPECT_EQ(configToJson(configFromJson(text)), text);
  EXPECT_EQ(configFromJson(configToJson(ExperimentConfig{})), ExperimentConfig{});
}

TEST(Config, PartialDocumentKeepsBase) {
  ExperimentConfig base;
  base.trials = 3;
  const auto c = configFromJson(R"({"strategy": {"kind": "relocate"}, "shot_target": 50})", base);
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.sim.shotTarget, 50);
  EXPECT_EQ(c.strategy.kind, StrategyKind::RelocateTiles);
  EXPECT_EQ(c.rows, 10);
}

TEST(Config, BadDocumentsRejected) {
  for (const auto* doc : {R"({"bogus": 1})", R"({"architecture": {"rows": "ten"}})",
                          R"({"strategy": {"kind": "teleport"}})", R"([1, 2])", "{",
                          R"({"rates": {"p_env": 0.1, "extra": 2}})"}) {
    expectKind(ErrorKind::InvalidConfig, [&] { (void)configFromJson(doc); });
  }
}

TEST(Config, ValidationCatchesBadValues) {
  ExperimentConfig c;
  c.trials = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.sim.rates.pMeas = 2;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.strategy.threshold = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.rows = 0;
  expectKind(ErrorKind::InvalidDimension, [&] { c.validate(); });
}

TEST(CircuitJson, RoundTrip) {
  for (const auto& c : {cuccaroTotal(10), cnuTotal(12), qaoa(8, 0.5, 3), linearVqe(6, 1)}) {
    EXPECT_EQ(circuitFromJson(circuitToJson(c)), c);
  }
}

TEST(CircuitJson, MalformedRejected) {
  for (const auto* doc :
       {"{}", R"({"n_qubits": 2, "gates": [{"kind": "cx", "qubits": [0, 0]}]})",
        R"({"n_qubits": 2, "gates": [{"kind": "warp", "qubits": [0]}]})", "nope"}) {
    expectKind(ErrorKind::InvalidCircuit, [&] { (void)circuitFromJson(doc); });
  }
}

TEST(CompiledJson, CarriesMappingAndSteps) {
  const auto a = Architecture::grid(10, 10, 4);
  const auto cc = compile(cuccaroTotal(10), a, {});
  const auto j = nlohmann::json::parse(compiledToJson(cc, 0.5));
  EXPECT_EQ(j.at("n_qubits"), 10);
  EXPECT_EQ(j.at("swap_count"), cc.swapCount);
  EXPECT_EQ(j.at("initial_mapping").size(), 10u);
  EXPECT_EQ(j.at("steps").size(), cc.steps.size());
  EXPECT_EQ(j.at("success_estimate"), 0.5);
}

TEST(Csv, ResultsRowsMatchColumns) {
  ExperimentConfig c;
  c.sim.shotTarget = 40;
  c.trials = 3;
  const auto records = runTrials(c.trialSpec(), c.trials, c.baseSeed, 1);
  std::ostringstream out;
  writeResultsHeader(out);
  writeResultsRows(out, c, records);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(splitLine(line), resultsColumns());
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cells = splitLine(line);
    ASSERT_EQ(cells.size(), resultsColumns().size());
    EXPECT_EQ(cells[0], std::to_string(rows));
    EXPECT_EQ(cells[1], "cuccaro");
    EXPECT_EQ(cells[4], c.strategy.label());
    EXPECT_EQ(std::stoi(cells[6]), 40);
    const double total = std::stod(cells[14]);
    const double parts =
        std::stod(cells[10]) + std::stod(cells[11]) + std::stod(cells[12]) + std::stod(cells[13]);
    EXPECT_NEAR(total, parts, 1e-9 * total);
    ++rows;
  }
  EXPECT_EQ(rows, 3);

  std::ostringstream curves;
  writeCurvesHeader(curves);
  writeCurveRows(curves, c, summarize(records));
  std::istringstream cin(curves.str());
  std::getline(cin, line);
  EXPECT_EQ(splitLine(line), curveColumns());
  ASSERT_TRUE(std::getline(cin, line));
  EXPECT_EQ(splitLine(line)[2], "0");
}

TEST(Sweep, ExpandsEachAxis) {
  const ExperimentConfig base;
  const auto s = expandSweep(base, SweepAxis::Strategy, {"reroute", "relocate-tight"});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].strategy.kind, StrategyKind::RerouteSmallerD);
  EXPECT_EQ(s[1].strategy.mode, BoxMode::Tight);
  const auto d = expandSweep(base, SweepAxis::DMax, {"3", "5"});
  EXPECT_EQ(d[1].dMax, 5.0);
  const auto n = expandSweep(base, SweepAxis::Size, {"10", "20", "30"});
  EXPECT_EQ(n[2].benchmark.size, 30);
  const auto k = expandSweep(base, SweepAxis::Instances, {"1", "2", "3"});
  EXPECT_EQ(k[0].strategy.instances, 1);
  for (const auto a : {SweepAxis::Strategy, SweepAxis::DMax, SweepAxis::Size,
                       SweepAxis::Instances}) {
    EXPECT_EQ(parseSweepAxis(toString(a)), a);
  }
}

TEST(Sweep, EmptyAndBadValues) {
  expectKind(ErrorKind::EmptyInput, [] { (void)expandSweep({}, SweepAxis::DMax, {}); });
  expectKind(ErrorKind::InvalidConfig, [] { (void)expandSweep({}, SweepAxis::DMax, {"x"}); });
  expectKind(ErrorKind::InvalidConfig,
             [] { (void)expandSweep({}, SweepAxis::Strategy, {"nonsense"}); });
}
