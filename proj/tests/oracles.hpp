#pragma once

// Reference implementations written independently of the library, plus
// hand-rolled random generators for the property tests.

#include "naloss/arch.hpp"
#include "naloss/circuits.hpp"
#include "naloss/compiler.hpp"
#include "naloss/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Cell = std::pair<int, int>;
using CellSet = std::set<Cell>;

inline bool reach(Cell a, Cell b, double d) {
  const double dr = a.first - b.first;
  const double dc = a.second - b.second;
  return std::sqrt(dr * dr + dc * dc) <= d + 1e-9;
}

/// Every cell t != s of the grid within d of s, by scanning the whole grid.
inline CellSet neighbors(int rows, int cols, Cell s, double d) {
  CellSet out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (Cell{r, c} != s && reach(s, {r, c}, d)) {
        out.insert({r, c});
      }
    }
  }
  return out;
}

/// Hop counts from src over edges of range d avoiding `forbidden`; -1 if
/// unreachable. Adjacency is recomputed by brute force at each node.
inline std::map<Cell, int> bfs(int rows, int cols, double d, const CellSet& forbidden,
                               Cell src) {
  std::map<Cell, int> dist;
  dist[src] = 0;
  std::deque<Cell> q{src};
  while (!q.empty()) {
    const Cell cur = q.front();
    q.pop_front();
    for (const auto& t : neighbors(rows, cols, cur, d)) {
      if (forbidden.count(t) == 0 && dist.count(t) == 0) {
        dist[t] = dist[cur] + 1;
        q.push_back(t);
      }
    }
  }
  return dist;
}

inline double decoherence(double dgSeconds, double t1, double t2) {
  return std::exp(-dgSeconds / t1) * std::exp(-dgSeconds / t2);
}

/// Success estimate recomputed from the placed gates alone: step durations,
/// per-qubit busy time by replaying SWAPs, fidelities by gate kind.
inline double success(const naloss::CompiledCircuit& cc, const naloss::ErrorModel& m,
                      const naloss::GateDurations& dur = {}) {
  using naloss::GateKind;
  std::map<naloss::Site, int> occupant;
  for (std::size_t q = 0; q < cc.initialMapping.size(); ++q) {
    occupant[cc.initialMapping[q]] = static_cast<int>(q);
  }
  std::vector<double> busy(cc.initialMapping.size(), 0.0);
  double total = 0.0;
  double p = 1.0;
  for (const auto& step : cc.steps) {
    double len = 0.0;
    for (const auto& g : step.gates) {
      double t = 0.0;
      double f = 1.0;
      if (g.kind == GateKind::SWAP) {
        t = dur.swap.count();
        f = m.twoQubitFidelity * m.twoQubitFidelity * m.twoQubitFidelity;
      } else if (g.sites.size() == 1) {
        t = dur.oneQubit.count();
        f = m.oneQubitFidelity;
      } else if (g.sites.size() == 2) {
        t = dur.twoQubit.count();
        f = m.twoQubitFidelity;
      } else {
        t = dur.threeQubit.count();
        f = m.twoQubitFidelity * m.twoQubitFidelity;
      }
      p *= f;
      len = std::max(len, t);
    }
    for (const auto& g : step.gates) {
      for (const auto s : g.sites) {
        if (const auto it = occupant.find(s); it != occupant.end()) {
          busy[static_cast<std::size_t>(it->second)] += len;
        }
      }
      if (g.kind == GateKind::SWAP && g.origin != naloss::GateOrigin::Source) {
        const auto a = occupant.find(g.sites[0]);
        const auto b = occupant.find(g.sites[1]);
        const int qa = a == occupant.end() ? -1 : a->second;
        const int qb = b == occupant.end() ? -1 : b->second;
        occupant.erase(g.sites[0]);
        occupant.erase(g.sites[1]);
        if (qa >= 0) {
          occupant[g.sites[1]] = qa;
        }
        if (qb >= 0) {
          occupant[g.sites[0]] = qb;
        }
      }
    }
    total += len;
  }
  for (const double b : busy) {
    p *= decoherence(total - b, m.t1Ground.count(), m.t2Ground.count());
  }
  return p;
}

/// Replays inserted SWAPs from the initial mapping and checks that each source
/// gate acts on the sites its qubits occupy at that moment, within `range`.
/// Returns an empty string when everything agrees.
inline std::string replayProblem(const naloss::CompiledCircuit& cc, double range) {
  std::vector<naloss::Site> where = cc.initialMapping.sites;
  std::vector<int> next(where.size(), 0);
  std::map<naloss::Site, int> occupant;
  for (std::size_t q = 0; q < where.size(); ++q) {
    occupant[where[q]] = static_cast<int>(q);
  }
  std::size_t seen = 0;
  for (const auto& step : cc.steps) {
    for (const auto& g : step.gates) {
      for (const auto a : g.sites) {
        for (const auto b : g.sites) {
          if (!reach({a.row, a.col}, {b.row, b.col}, range)) {
            return "gate spans beyond range";
          }
        }
      }
      if (g.sourceIndex >= 0 && g.origin == naloss::GateOrigin::Source) {
        const auto& src = cc.source.gates[static_cast<std::size_t>(g.sourceIndex)];
        for (std::size_t k = 0; k < src.qubits.size(); ++k) {
          if (where[static_cast<std::size_t>(src.qubits[k])] != g.sites[k]) {
            return "gate " + std::to_string(g.sourceIndex) + " misplaced";
          }
        }
        ++seen;
      }
      if (g.kind == naloss::GateKind::SWAP && g.origin != naloss::GateOrigin::Source) {
        const auto a = occupant.find(g.sites[0]);
        const auto b = occupant.find(g.sites[1]);
        const int qa = a == occupant.end() ? -1 : a->second;
        const int qb = b == occupant.end() ? -1 : b->second;
        occupant.erase(g.sites[0]);
        occupant.erase(g.sites[1]);
        if (qa >= 0) {
          occupant[g.sites[1]] = qa;
          where[static_cast<std::size_t>(qa)] = g.sites[1];
        }
        if (qb >= 0) {
          occupant[g.sites[0]] = qb;
          where[static_cast<std::size_t>(qb)] = g.sites[0];
        }
      }
    }
  }
  if (seen != cc.source.gates.size()) {
    return "saw " + std::to_string(seen) + " of " + std::to_string(cc.source.gates.size()) + " source gates";
  }
  if (where != cc.mapping.sites) {
    return "final mapping disagrees with replay";
  }
  return {};
}

/// Lexicographically smallest shortest path built from oracle hop counts.
inline std::vector<Cell> shortestPath(int rows, int cols, double d, const CellSet& forbidden,
                                      Cell src, Cell dst) {
  const auto toDst = bfs(rows, cols, d, forbidden, dst);
  std::vector<Cell> path{src};
  Cell cur = src;
  while (cur != dst) {
    const int want = toDst.at(cur) - 1;
    for (const auto& t : neighbors(rows, cols, cur, d)) { // ordered set
      const auto it = toDst.find(t);
      if (it != toDst.end() && it->second == want && (forbidden.count(t) == 0 || t == dst)) {
        cur = t;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

// ---- generators ----

inline int uniformInt(naloss::Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(naloss::uniform01(rng) * (hi - lo + 1));
}

/// Distinct qubits drawn without replacement.
inline std::vector<int> pickQubits(naloss::Rng& rng, int n, int k) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  for (int i = 0; i < k; ++i) {
    std::swap(all[static_cast<std::size_t>(i)],
              all[static_cast<std::size_t>(uniformInt(rng, i, n - 1))]);
  }
  all.resize(static_cast<std::size_t>(k));
  return all;
}

/// Mixed-arity circuit over the native gate set.
inline naloss::Circuit randomCircuit(naloss::Rng& rng, int n, int gates) {
  using naloss::GateKind;
  static const GateKind one[] = {GateKind::H, GateKind::X, GateKind::RZ, GateKind::RY};
  static const GateKind two[] = {GateKind::CX, GateKind::CZ, GateKind::SWAP};
  static const GateKind three[] = {GateKind::CCX, GateKind::CCZ};
  std::vector<naloss::Gate> out;
  for (int i = 0; i < gates; ++i) {
    int k = uniformInt(rng, 1, 10) <= 3 ? 1 : 2;
    if (n >= 3 && uniformInt(rng, 1, 10) == 1) {
      k = 3;
    }
    k = std::min(k, n);
    naloss::Gate g;
    g.kind = k == 1 ? one[uniformInt(rng, 0, 3)]
                    : (k == 2 ? two[uniformInt(rng, 0, 2)] : three[uniformInt(rng, 0, 1)]);
    g.qubits = pickQubits(rng, n, k);
    if (naloss::paramCount(g.kind) > 0) {
      g.params = {naloss::uniform01(rng) * 6.28};
    }
    out.push_back(std::move(g));
  }
  return naloss::makeCircuit(n, std::move(out));
}

/// k distinct lost sites, none of them in `keep`.
inline naloss::LossState randomLoss(naloss::Rng& rng, const naloss::Architecture& arch,
                                    int k, const std::vector<naloss::Site>& keep = {}) {
  naloss::LossState loss(arch);
  std::vector<naloss::Site> pool;
  for (const auto s : arch.sites()) {
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) {
      pool.push_back(s);
    }
  }
  k = std::min<int>(k, static_cast<int>(pool.size()));
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(uniformInt(rng, i, static_cast<int>(pool.size()) - 1));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    loss.markLost(pool[static_cast<std::size_t>(i)]);
  }
  return loss;
}

inline CellSet cells(const naloss::SiteSet& s) {
  CellSet out;
  for (const auto x : s.sites()) {
    out.insert({x.row, x.col});
  }
  return out;
}

} // namespace oracle
