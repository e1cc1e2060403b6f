#include "naloss/cli.hpp"

#include "naloss/error.hpp"
#include "naloss/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <iterator>
#include <ostream>
#include <sstream>

namespace naloss {

namespace {

using Setter = std::function<void(ExperimentConfig&)>;

/// I/O problems are runtime failures, not validation errors.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open '{}'", path));
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << content) || !f.flush()) {
    throw IoError(fmt::format("cannot write '{}'", path));
  }
}

/// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    writeFile(path, content);
  }
}

template <class T, class Fn>
void deferred(CLI::App* app, std::vector<Setter>& setters, const std::string& name,
              const std::string& help, Fn apply) {
  app->add_option_function<T>(
      name,
      [&setters, apply](const T& v) {
        setters.push_back([apply, v](ExperimentConfig& c) { apply(c, v); });
      },
      help);
}

std::pair<int, int> parseArch(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x != std::string::npos) {
      std::size_t used = 0;
      const int rows = std::stoi(text.substr(0, x), &used);
      if (used == x) {
        const auto rest = text.substr(x + 1);
        const int cols = std::stoi(rest, &used);
        if (used == rest.size()) {
          return {rows, cols};
        }
      }
    }
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorKind::InvalidConfig,
              fmt::format("--arch expects ROWSxCOLS, got '{}'", text));
}

template <class T, class Parse>
T parseNamed(const std::string& text, std::string_view what, Parse parse) {
  const auto v = parse(text);
  if (!v) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("unknown {} '{}'", what, text));
  }
  return *v;
}

void addArchOptions(CLI::App* app, std::vector<Setter>& s) {
  deferred<std::string>(app, s, "--arch", "array size as ROWSxCOLS (10x10)",
                        [](ExperimentConfig& c, const std::string& v) {
                          std::tie(c.rows, c.cols) = parseArch(v);
                        });
  deferred<int>(app, s, "--rows", "array rows (10)",
                [](ExperimentConfig& c, int v) { c.rows = v; });
  deferred<int>(app, s, "--cols", "array columns (10)",
                [](ExperimentConfig& c, int v) { c.cols = v; });
  deferred<double>(app, s, "--dmax", "maximum interaction distance (4)",
                   [](ExperimentConfig& c, double v) { c.dMax = v; });
  deferred<std::string>(app, s, "--restriction", "half-span or half-pitch (half-span)",
                        [](ExperimentConfig& c, const std::string& v) {
                          c.rule = parseNamed<RestrictionRule>(v, "restriction rule",
                                                               parseRestrictionRule);
                        });
}

void addBenchmarkOptions(CLI::App* app, std::vector<Setter>& s) {
  deferred<std::string>(app, s, "--bench,--kind", "cnu, cuccaro, qaoa or linear-vqe (cuccaro)",
                        [](ExperimentConfig& c, const std::string& v) {
                          c.benchmark.kind = parseNamed<BenchmarkKind>(
                              v, "benchmark", parseBenchmarkKind);
                        });
  deferred<int>(app, s, "--size", "total qubits (10)",
                [](ExperimentConfig& c, int v) { c.benchmark.size = v; });
  deferred<std::uint64_t>(app, s, "--bench-seed", "generator seed for qaoa and linear-vqe (0)",
                          [](ExperimentConfig& c, std::uint64_t v) { c.benchmark.seed = v; });
  deferred<double>(app, s, "--density", "qaoa edge probability (0.2)",
                   [](ExperimentConfig& c, double v) { c.benchmark.density = v; });
}

void addDeviceOptions(CLI::App* app, std::vector<Setter>& s) {
  using C = ExperimentConfig;
  const auto ms = [](double v) { return Duration(v * 1e-3); };
  const auto us = [](double v) { return Duration(v * 1e-6); };
  const auto ns = [](double v) { return Duration(v * 1e-9); };
  deferred<double>(app, s, "--p-env", "per-shot loss of any atom (0.00068)",
                   [](C& c, double v) { c.sim.rates.pEnv = v; });
  deferred<double>(app, s, "--p-meas", "extra per-shot loss of measured atoms (0.02)",
                   [](C& c, double v) { c.sim.rates.pMeas = v; });
  deferred<double>(app, s, "--t-fluor-ms", "fluorescence imaging time (6)",
                   [ms](C& c, double v) { c.sim.timing.fluorescence = ms(v); });
  deferred<double>(app, s, "--t-reload-ms", "array reload time (320)",
                   [ms](C& c, double v) { c.sim.timing.reload = ms(v); });
  deferred<double>(app, s, "--t-read-ns", "lookup-table read (40)",
                   [ns](C& c, double v) { c.sim.timing.tableRead = ns(v); });
  deferred<double>(app, s, "--t-write-ns", "lookup-table write (45)",
                   [ns](C& c, double v) { c.sim.timing.tableWrite = ns(v); });
  deferred<double>(app, s, "--t-1q-us", "one-qubit gate time (2)",
                   [us](C& c, double v) { c.sim.timing.gates.oneQubit = us(v); });
  deferred<double>(app, s, "--t-2q-us", "two-qubit gate time (3)",
                   [us](C& c, double v) { c.sim.timing.gates.twoQubit = us(v); });
  deferred<double>(app, s, "--t-3q-us", "three-qubit gate time (5)",
                   [us](C& c, double v) { c.sim.timing.gates.threeQubit = us(v); });
  deferred<double>(app, s, "--t-swap-us", "SWAP time (9)",
                   [us](C& c, double v) { c.sim.timing.gates.swap = us(v); });
  deferred<double>(app, s, "--f1q", "one-qubit gate fidelity (0.996)",
                   [](C& c, double v) { c.sim.model.oneQubitFidelity = v; });
  deferred<double>(app, s, "--f2q", "two-qubit gate fidelity (0.965)",
                   [](C& c, double v) { c.sim.model.twoQubitFidelity = v; });
  deferred<double>(app, s, "--t1-s", "ground-state T1 (7)",
                   [](C& c, double v) { c.sim.model.t1Ground = Duration(v); });
  deferred<double>(app, s, "--t2-s", "ground-state T2 (30)",
                   [](C& c, double v) { c.sim.model.t2Ground = Duration(v); });
}

void addStrategyOptions(CLI::App* app, std::vector<Setter>& s) {
  using C = ExperimentConfig;
  deferred<std::string>(app, s, "--strategy",
                        "reload, recompile, hardware-shift, interaction-shift, reroute, "
                        "relocate[-loose|-tight], full-parallel[...], partial-parallel[...]",
                        [](C& c, const std::string& v) {
                          const auto parsed = Strategy::parse(v);
                          c.strategy.kind = parsed.kind;
                          if (v.ends_with("-loose") || v.ends_with("-tight")) {
                            c.strategy.mode = parsed.mode;
                          }
                        });
  deferred<std::string>(app, s, "--mode", "tile bounding box: loose or tight (loose)",
                        [](C& c, const std::string& v) {
                          c.strategy.mode = parseNamed<BoxMode>(v, "box mode", parseBoxMode);
                        });
  deferred<double>(app, s, "--threshold", "fraction of the placed estimate to keep (0.5)",
                   [](C& c, double v) { c.strategy.threshold = v; });
  deferred<std::string>(app, s, "--inner", "hardware-shift or interaction-shift",
                        [](C& c, const std::string& v) {
                          c.strategy.inner =
                              parseNamed<InnerMethod>(v, "inner method", parseInnerMethod);
                        });
  deferred<int>(app, s, "--instances", "copies for partial-parallel (2)",
                [](C& c, int v) { c.strategy.instances = v; });
  deferred<double>(app, s, "--deff", "compile distance, 0 for the strategy default",
                   [](C& c, double v) { c.strategy.dEff = v; });
}

void addRunOptions(CLI::App* app, std::vector<Setter>& s) {
  using C = ExperimentConfig;
  deferred<int>(app, s, "--shots", "shot target per trial (500)",
                [](C& c, int v) { c.sim.shotTarget = v; });
  deferred<std::string>(app, s, "--count-mode", "successful or attempted (successful)",
                        [](C& c, const std::string& v) {
                          c.sim.countMode =
                              parseNamed<CountMode>(v, "count mode", parseCountMode);
                        });
  deferred<std::size_t>(app, s, "--max-shots", "aggregate shot cap per trial, 0 for auto",
                        [](C& c, std::size_t v) { c.sim.maxShots = v; });
  deferred<int>(app, s, "--trials", "number of trials (50)",
                [](C& c, int v) { c.trials = v; });
  deferred<std::uint64_t>(app, s, "--seed", "base seed; trial i uses seed + i (0)",
                          [](C& c, std::uint64_t v) { c.baseSeed = v; });
  deferred<unsigned>(app, s, "--threads", "worker threads, 0 for all cores",
                     [](C& c, unsigned v) { c.threads = v; });
}

ExperimentConfig resolve(const std::string& configPath, const std::vector<Setter>& setters) {
  ExperimentConfig c;
  if (!configPath.empty()) {
    c = configFromJson(readFile(configPath), c);
  }
  for (const auto& set : setters) {
    set(c);
  }
  return c;
}

struct RunOutput {
  std::string results;
  std::string curves;
  std::string summary;
};

RunOutput runExperiment(const ExperimentConfig& c) {
  c.validate();
  const auto records = runTrials(c.trialSpec(), c.trials, c.baseSeed, c.threads);
  const auto stats = summarize(records);
  std::ostringstream results, curves, summary;
  writeResultsRows(results, c, records);
  writeCurveRows(curves, c, stats);
  writeSummary(summary, c, stats);
  return {results.str(), curves.str(), summary.str()};
}

} // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Atom-loss aware compilation and shot simulation for neutral atom arrays",
               "naloss"};
  app.require_subcommand(1);
  std::vector<Setter> setters;
  std::string configPath;
  std::string outPath;

  auto* bench = app.add_subcommand("bench", "write a benchmark circuit as JSON");
  std::string benchKind;
  int benchSize = 0;
  std::uint64_t benchSeed = 0;
  double benchDensity = 0.2;
  bench->add_option("--kind", benchKind, "cnu, cuccaro, qaoa or linear-vqe")->required();
  bench->add_option("--size", benchSize, "total qubits")->required();
  bench->add_option("--seed", benchSeed, "generator seed (0)");
  bench->add_option("--density", benchDensity, "qaoa edge probability (0.2)");
  bench->add_option("--out,-o", outPath, "output file (stdout)");

  auto* compileCmd = app.add_subcommand("compile", "compile a circuit onto the array");
  std::string circuitPath;
  compileCmd->add_option("--circuit", circuitPath, "circuit JSON (else --bench/--size)");
  compileCmd->add_option("--config", configPath, "JSON experiment config");
  compileCmd->add_option("--out,-o", outPath, "output file (stdout)");
  addArchOptions(compileCmd, setters);
  addBenchmarkOptions(compileCmd, setters);
  addDeviceOptions(compileCmd, setters);
  addStrategyOptions(compileCmd, setters);

  auto* simulate = app.add_subcommand("simulate", "run trials and write result tables");
  std::string resultsPath, curvesPath, saveConfig;
  simulate->add_option("--config", configPath, "JSON experiment config");
  simulate->add_option("--out,-o", resultsPath, "per-trial results CSV");
  simulate->add_option("--curves", curvesPath, "success-vs-atoms-lost CSV");
  simulate->add_option("--save-config", saveConfig, "write the resolved config as JSON");
  for (auto* f : {addArchOptions, addBenchmarkOptions, addDeviceOptions,
                  addStrategyOptions, addRunOptions}) {
    f(simulate, setters);
  }

  auto* sweep = app.add_subcommand("sweep", "run one experiment per value of an axis");
  std::string axisName;
  std::vector<std::string> values;
  sweep->add_option("--config", configPath, "JSON experiment config");
  sweep->add_option("--axis", axisName, "strategy, dmax, size or instances")->required();
  sweep->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',')
      ->allow_extra_args(false);
  sweep->add_option("--out,-o", resultsPath, "long-form results CSV");
  sweep->add_option("--curves", curvesPath, "long-form curves CSV");
  for (auto* f : {addArchOptions, addBenchmarkOptions, addDeviceOptions,
                  addStrategyOptions, addRunOptions}) {
    f(sweep, setters);
  }

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        out << app.help(); // --help may name a subcommand; print the full help
        return kExitOk;
      }
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    }

    if (bench->parsed()) {
      const auto kind = parseNamed<BenchmarkKind>(benchKind, "benchmark", parseBenchmarkKind);
      const auto circuit = BenchmarkSpec{kind, benchSize, benchSeed, benchDensity}.build();
      emit(outPath, circuitToJson(circuit), out);
      return kExitOk;
    }

    auto config = resolve(configPath, setters);

    if (compileCmd->parsed()) {
      const auto arch = config.architecture();
      const auto circuit = circuitPath.empty() ? config.benchmark.build()
                                               : circuitFromJson(readFile(circuitPath));
      config.strategy.validate(arch);
      config.sim.model.validate();
      CompileOptions opts;
      opts.dEff = config.strategy.compileDistance(arch);
      opts.durations = config.sim.timing.gates;
      const auto cc = compile(circuit, arch, opts);
      emit(outPath, compiledToJson(cc, estimateSuccess(cc, config.sim.model)), out);
      return kExitOk;
    }

    if (simulate->parsed()) {
      if (!resultsPath.empty()) {
        config.resultsPath = resultsPath;
      }
      if (!curvesPath.empty()) {
        config.curvesPath = curvesPath;
      }
      config.validate();
      if (!saveConfig.empty()) {
        writeFile(saveConfig, configToJson(config));
      }
      const auto run = runExperiment(config);
      std::ostringstream results, curves;
      writeResultsHeader(results);
      writeCurvesHeader(curves);
      writeFile(config.resultsPath, results.str() + run.results);
      writeFile(config.curvesPath, curves.str() + run.curves);
      out << run.summary;
      return kExitOk;
    }

    // sweep
    const auto axis = parseNamed<SweepAxis>(axisName, "sweep axis", parseSweepAxis);
    std::erase_if(values, [](const std::string& v) { return v.empty(); });
    const auto configs = expandSweep(config, axis, values);
    for (const auto& c : configs) {
      c.validate(); // fail before spending time on any run
    }
    std::ostringstream results, curves;
    writeResultsHeader(results);
    writeCurvesHeader(curves);
    for (const auto& c : configs) {
      const auto run = runExperiment(c);
      results << run.results;
      curves << run.curves;
      out << run.summary;
    }
    writeFile(resultsPath.empty() ? config.resultsPath : resultsPath, results.str());
    writeFile(curvesPath.empty() ? config.curvesPath : curvesPath, curves.str());
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.isValidation() ? kExitValidation : kExitRuntime;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

} // namespace naloss
