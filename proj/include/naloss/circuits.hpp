#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace naloss {

/// Native gate set. Arity is capped at three; larger gates are rejected.
enum class GateKind { RX, RY, RZ, X, H, CX, CZ, SWAP, CCX, CCZ };

int arity(GateKind kind);
int paramCount(GateKind kind);
std::string_view toString(GateKind kind);
std::optional<GateKind> parseGateKind(std::string_view name);

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> qubits;
  std::vector<double> params;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Hardware-agnostic program in the native gate set.
struct Circuit {
  int nQubits = 0;
  std::vector<Gate> gates;
  std::vector<int> measured;

  /// Throws Error(InvalidCircuit) on arity, index or measurement violations.
  void validate() const;
  [[nodiscard]] std::size_t countArity(int k) const;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Builds a circuit with every qubit measured.
Circuit makeCircuit(int nQubits, std::vector<Gate> gates);

/// Benchmark families that scale to arbitrary size.
enum class BenchmarkKind { CNU, Cuccaro, QAOA, LinearVQE };

std::string_view toString(BenchmarkKind kind);
std::optional<BenchmarkKind> parseBenchmarkKind(std::string_view name);

/// Log-depth generalized Toffoli: nControls controls, nControls - 1 scratch
/// qubits and one target (2 * nControls qubits).
Circuit cnu(int nControls);
/// Largest generalized Toffoli whose qubit count fits in totalQubits.
Circuit cnuTotal(int totalQubits);

/// Ripple-carry adder on two nBits registers (2 * nBits + 2 qubits).
Circuit cuccaro(int nBits);
Circuit cuccaroTotal(int totalQubits);

/// One QAOA layer over a seeded Erdos-Renyi graph.
Circuit qaoa(int n, double density, std::uint64_t seed);

/// One linear-entanglement VQE iteration.
Circuit linearVqe(int n, std::uint64_t seed);

/// Generator entry point keyed on total qubit count.
Circuit makeBenchmark(BenchmarkKind kind, int totalQubits, std::uint64_t seed,
                      double qaoaDensity = 0.2);

} // namespace naloss
