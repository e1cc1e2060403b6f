#include "naloss/circuits.hpp"

#include "naloss/error.hpp"
#include "naloss/random.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numbers>
#include <string>
#include <utility>

namespace naloss {

namespace {

constexpr std::array kGateNames = {
    std::pair{GateKind::RX, "rx"},   std::pair{GateKind::RY, "ry"},
    std::pair{GateKind::RZ, "rz"},   std::pair{GateKind::X, "x"},
    std::pair{GateKind::H, "h"},     std::pair{GateKind::CX, "cx"},
    std::pair{GateKind::CZ, "cz"},   std::pair{GateKind::SWAP, "swap"},
    std::pair{GateKind::CCX, "ccx"}, std::pair{GateKind::CCZ, "ccz"},
};

constexpr std::array kBenchmarkNames = {
    std::pair{BenchmarkKind::CNU, "cnu"},
    std::pair{BenchmarkKind::Cuccaro, "cuccaro"},
    std::pair{BenchmarkKind::QAOA, "qaoa"},
    std::pair{BenchmarkKind::LinearVQE, "linear-vqe"},
};

Gate g1(GateKind k, int q, double angle = 0.0) {
  Gate g{k, {q}, {}};
  if (paramCount(k) == 1) {
    g.params.push_back(angle);
  }
  return g;
}
Gate g2(GateKind k, int a, int b) { return Gate{k, {a, b}, {}}; }
Gate ccx(int a, int b, int t) { return Gate{GateKind::CCX, {a, b, t}, {}}; }

double randomAngle(Rng& rng) { return 2.0 * std::numbers::pi * uniform01(rng); }

} // namespace

int arity(GateKind kind) {
  switch (kind) {
  case GateKind::RX:
  case GateKind::RY:
  case GateKind::RZ:
  case GateKind::X:
  case GateKind::H:
    return 1;
  case GateKind::CX:
  case GateKind::CZ:
  case GateKind::SWAP:
    return 2;
  case GateKind::CCX:
  case GateKind::CCZ:
    return 3;
  }
  return 0;
}

int paramCount(GateKind kind) {
  return (kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ)
             ? 1
             : 0;
}

std::string_view toString(GateKind kind) {
  for (const auto& [k, name] : kGateNames) {
    if (k == kind) {
      return name;
    }
  }
  return "?";
}

std::optional<GateKind> parseGateKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& [k, n] : kGateNames) {
    if (lower == n) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view toString(BenchmarkKind kind) {
  for (const auto& [k, name] : kBenchmarkNames) {
    if (k == kind) {
      return name;
    }
  }
  return "?";
}

std::optional<BenchmarkKind> parseBenchmarkKind(std::string_view name) {
  for (const auto& [k, n] : kBenchmarkNames) {
    if (name == n) {
      return k;
    }
  }
  if (name == "linear_vqe" || name == "vqe") {
    return BenchmarkKind::LinearVQE;
  }
  return std::nullopt;
}

void Circuit::validate() const {
  if (nQubits < 1) {
    throw Error(ErrorKind::InvalidCircuit, "circuit needs at least one qubit");
  }
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    const auto where = " (gate " + std::to_string(i) + ")";
    if (static_cast<int>(g.qubits.size()) != arity(g.kind)) {
      throw Error(ErrorKind::InvalidCircuit,
                  std::string(toString(g.kind)) + " has wrong arity" + where);
    }
    if (static_cast<int>(g.params.size()) != paramCount(g.kind)) {
      throw Error(ErrorKind::InvalidCircuit,
                  std::string(toString(g.kind)) + " has wrong parameter count" +
                      where);
    }
    for (std::size_t a = 0; a < g.qubits.size(); ++a) {
      if (g.qubits[a] < 0 || g.qubits[a] >= nQubits) {
        throw Error(ErrorKind::InvalidCircuit, "qubit index out of range" + where);
      }
      for (std::size_t b = a + 1; b < g.qubits.size(); ++b) {
        if (g.qubits[a] == g.qubits[b]) {
          throw Error(ErrorKind::InvalidCircuit, "repeated qubit" + where);
        }
      }
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(nQubits), false);
  for (const int q : measured) {
    if (q < 0 || q >= nQubits || seen[static_cast<std::size_t>(q)]) {
      throw Error(ErrorKind::InvalidCircuit, "invalid measured qubit set");
    }
    seen[static_cast<std::size_t>(q)] = true;
  }
}

std::size_t Circuit::countArity(int k) const {
  return static_cast<std::size_t>(std::count_if(
      gates.begin(), gates.end(), [k](const Gate& g) { return arity(g.kind) == k; }));
}

Circuit makeCircuit(int nQubits, std::vector<Gate> gates) {
  Circuit c{nQubits, std::move(gates), {}};
  for (int q = 0; q < nQubits; ++q) {
    c.measured.push_back(q);
  }
  return c;
}

Circuit cnu(int nControls) {
  if (nControls < 2) {
    throw Error(ErrorKind::InvalidSize, "CNU needs at least 2 controls");
  }
  const int target = 2 * nControls - 1;
  int nextScratch = nControls;
  std::vector<Gate> forward;
  std::vector<int> level(static_cast<std::size_t>(nControls));
  for (int i = 0; i < nControls; ++i) {
    level[static_cast<std::size_t>(i)] = i;
  }
  // Pair up the current level into fresh scratch qubits until one remains.
  while (level.size() > 1) {
    std::vector<int> next;
    std::size_t i = 0;
    for (; i + 1 < level.size(); i += 2) {
      forward.push_back(ccx(level[i], level[i + 1], nextScratch));
      next.push_back(nextScratch++);
    }
    if (i < level.size()) {
      next.push_back(level[i]);
    }
    level = std::move(next);
  }
  std::vector<Gate> gates = forward;
  gates.push_back(g2(GateKind::CX, level.front(), target));
  gates.insert(gates.end(), forward.rbegin(), forward.rend());
  return makeCircuit(2 * nControls, std::move(gates));
}

Circuit cnuTotal(int totalQubits) {
  if (totalQubits < 4) {
    throw Error(ErrorKind::InvalidSize, "CNU needs at least 4 qubits");
  }
  return cnu(totalQubits / 2);
}

Circuit cuccaro(int nBits) {
  if (nBits < 1) {
    throw Error(ErrorKind::InvalidSize, "Cuccaro adder needs at least 1 bit");
  }
  // Layout: carry-in 0, then (b_i, a_i) pairs, carry-out last.
  const auto b = [](int i) { return 1 + 2 * i; };
  const auto a = [](int i) { return 2 + 2 * i; };
  const int carryIn = 0;
  const int carryOut = 2 * nBits + 1;
  std::vector<Gate> gates;
  const auto maj = [&](int c, int bb, int aa) {
    gates.push_back(g2(GateKind::CX, aa, bb));
    gates.push_back(g2(GateKind::CX, aa, c));
    gates.push_back(ccx(c, bb, aa));
  };
  const auto uma = [&](int c, int bb, int aa) {
    gates.push_back(ccx(c, bb, aa));
    gates.push_back(g2(GateKind::CX, aa, c));
    gates.push_back(g2(GateKind::CX, c, bb));
  };
  maj(carryIn, b(0), a(0));
  for (int i = 1; i < nBits; ++i) {
    maj(a(i - 1), b(i), a(i));
  }
  gates.push_back(g2(GateKind::CX, a(nBits - 1), carryOut));
  for (int i = nBits - 1; i >= 1; --i) {
    uma(a(i - 1), b(i), a(i));
  }
  uma(carryIn, b(0), a(0));
  return makeCircuit(2 * nBits + 2, std::move(gates));
}

Circuit cuccaroTotal(int totalQubits) {
  if (totalQubits < 4) {
    throw Error(ErrorKind::InvalidSize, "Cuccaro adder needs at least 4 qubits");
  }
  return cuccaro((totalQubits - 2) / 2);
}

Circuit qaoa(int n, double density, std::uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorKind::InvalidSize, "QAOA needs at least 2 qubits");
  }
  if (!(density >= 0.0 && density <= 1.0)) {
    throw Error(ErrorKind::InvalidSize, "edge density must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (bernoulli(rng, density)) {
        edges.emplace_back(u, v);
      }
    }
  }
  const double gamma = randomAngle(rng);
  const double beta = randomAngle(rng);
  std::vector<Gate> gates;
  for (int q = 0; q < n; ++q) {
    gates.push_back(g1(GateKind::H, q));
  }
  for (const auto& [u, v] : edges) {
    gates.push_back(g2(GateKind::CX, u, v));
    gates.push_back(g1(GateKind::RZ, v, gamma));
    gates.push_back(g2(GateKind::CX, u, v));
  }
  for (int q = 0; q < n; ++q) {
    gates.push_back(g1(GateKind::RX, q, beta));
  }
  return makeCircuit(n, std::move(gates));
}

Circuit linearVqe(int n, std::uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorKind::InvalidSize, "linear VQE needs at least 2 qubits");
  }
  Rng rng(seed);
  std::vector<Gate> gates;
  const auto rotationLayer = [&] {
    for (int q = 0; q < n; ++q) {
      gates.push_back(g1(GateKind::RY, q, randomAngle(rng)));
      gates.push_back(g1(GateKind::RZ, q, randomAngle(rng)));
    }
  };
  rotationLayer();
  for (int q = 0; q + 1 < n; ++q) {
    gates.push_back(g2(GateKind::CX, q, q + 1));
  }
  rotationLayer();
  return makeCircuit(n, std::move(gates));
}

Circuit makeBenchmark(BenchmarkKind kind, int totalQubits, std::uint64_t seed,
                      double qaoaDensity) {
  switch (kind) {
  case BenchmarkKind::CNU:
    return cnuTotal(totalQubits);
  case BenchmarkKind::Cuccaro:
    return cuccaroTotal(totalQubits);
  case BenchmarkKind::QAOA:
    return qaoa(totalQubits, qaoaDensity, seed);
  case BenchmarkKind::LinearVQE:
    return linearVqe(totalQubits, seed);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown benchmark kind");
}

} // namespace naloss
