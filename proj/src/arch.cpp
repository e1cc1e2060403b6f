#include "naloss/arch.hpp"

#include "naloss/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace naloss {

namespace {
constexpr int kUnreached = std::numeric_limits<int>::max();
} // namespace

double distance(Site a, Site b) {
  return std::sqrt(static_cast<double>(squaredDistance(a, b)));
}

bool withinRange(int sq, double d) {
  return static_cast<double>(sq) <= d * d + 1e-9;
}

Architecture Architecture::grid(int rows, int cols, double dMax,
                                RestrictionRule rule) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::InvalidDimension,
                "grid needs at least one row and one column, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!(dMax >= 1.0)) {
    throw Error(ErrorKind::InvalidDimension,
                "maximum interaction distance must be >= 1, got " +
                    std::to_string(dMax));
  }
  return Architecture(rows, cols, dMax, rule);
}

std::vector<Site> Architecture::sites() const {
  std::vector<Site> out;
  out.reserve(numSites());
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out.push_back({r, c});
    }
  }
  return out;
}

std::vector<Site> Architecture::offsetsWithin(double d) {
  const int reach = static_cast<int>(std::floor(d + 1e-9));
  std::vector<Site> offsets;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if ((dr != 0 || dc != 0) && withinRange(dr * dr + dc * dc, d)) {
        offsets.push_back({dr, dc});
      }
    }
  }
  return offsets;
}

std::vector<Site> Architecture::neighbors(Site s, double d) const {
  std::vector<Site> out;
  for (const auto off : offsetsWithin(d)) {
    const Site t{s.row + off.row, s.col + off.col};
    if (contains(t)) {
      out.push_back(t);
    }
  }
  return out;
}

void Architecture::restrictionZone(std::span<const Site> gateSites,
                                   std::vector<std::size_t>& out) const {
  if (gateSites.empty()) {
    return;
  }
  // Zone membership: 4 * dist^2 <= spanSq, i.e. dist <= sqrt(spanSq) / 2.
  int spanSq = 1;
  if (rule_ == RestrictionRule::HalfGateSpan) {
    for (std::size_t i = 0; i < gateSites.size(); ++i) {
      for (std::size_t j = i + 1; j < gateSites.size(); ++j) {
        spanSq = std::max(spanSq, squaredDistance(gateSites[i], gateSites[j]));
      }
    }
  }
  if (spanSq < 4) {
    return; // radius below one spacing reaches no other site
  }
  const int reach = static_cast<int>(std::sqrt(static_cast<double>(spanSq)) / 2.0 + 1e-9);
  const auto first = out.size();
  for (const auto g : gateSites) {
    for (int r = std::max(0, g.row - reach); r <= std::min(rows_ - 1, g.row + reach); ++r) {
      for (int c = std::max(0, g.col - reach); c <= std::min(cols_ - 1, g.col + reach); ++c) {
        const Site t{r, c};
        if (4 * squaredDistance(t, g) > spanSq) {
          continue;
        }
        if (std::find(gateSites.begin(), gateSites.end(), t) != gateSites.end()) {
          continue;
        }
        out.push_back(index(t));
      }
    }
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
  out.erase(std::unique(out.begin() + static_cast<std::ptrdiff_t>(first), out.end()),
            out.end());
}

SiteSet Architecture::blockedSites(std::span<const Site> gateSites) const {
  for (std::size_t i = 0; i < gateSites.size(); ++i) {
    if (!contains(gateSites[i])) {
      throw Error(ErrorKind::InvalidDimension, "gate site outside the array");
    }
    for (std::size_t j = i + 1; j < gateSites.size(); ++j) {
      if (!withinRange(squaredDistance(gateSites[i], gateSites[j]), dMax_)) {
        throw Error(ErrorKind::OutOfRangeInteraction,
                    "gate atoms are farther apart than the maximum "
                    "interaction distance");
      }
    }
  }
  std::vector<std::size_t> zone;
  restrictionZone(gateSites, zone);
  SiteSet out(*this);
  for (const auto i : zone) {
    out.insert(site(i));
  }
  return out;
}

std::vector<int> Architecture::hopDistances(Site from, double d,
                                            const SiteSet& forbidden,
                                            SearchStats* stats) const {
  std::vector<int> dist(numSites(), kUnreached);
  const auto offsets = offsetsWithin(d);
  std::deque<Site> queue;
  dist[index(from)] = 0;
  queue.push_back(from);
  while (!queue.empty()) {
    const Site cur = queue.front();
    queue.pop_front();
    if (stats != nullptr) {
      ++stats->expansions;
    }
    const int next = dist[index(cur)] + 1;
    for (const auto off : offsets) {
      const Site t{cur.row + off.row, cur.col + off.col};
      if (!contains(t) || forbidden.contains(t)) {
        continue;
      }
      auto& slot = dist[index(t)];
      if (slot == kUnreached) {
        slot = next;
        queue.push_back(t);
      }
    }
  }
  return dist;
}

std::vector<Site>
Architecture::lexicographicPath(Site src, Site dst, double d,
                                const SiteSet& forbidden,
                                const std::vector<int>& toDst) const {
  const auto offsets = offsetsWithin(d);
  std::vector<Site> path{src};
  Site cur = src;
  while (cur != dst) {
    const int want = toDst[index(cur)] - 1;
    // Offsets are row-major, so the first match is the smallest site.
    for (const auto off : offsets) {
      const Site t{cur.row + off.row, cur.col + off.col};
      if (contains(t) && !forbidden.contains(t) && toDst[index(t)] == want) {
        cur = t;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

std::optional<std::vector<Site>>
Architecture::shortestInteractionPath(Site src, Site dst, double d,
                                      const SiteSet& forbidden,
                                      SearchStats* stats) const {
  if (src == dst) {
    return std::vector<Site>{src};
  }
  if (forbidden.contains(dst)) {
    return std::nullopt;
  }
  // Distances to dst; src itself may sit on a forbidden (e.g. lost) site.
  SiteSet blocked = forbidden;
  blocked.erase(src);
  const auto toDst = hopDistances(dst, d, blocked, stats);
  if (toDst[index(src)] == kUnreached) {
    return std::nullopt;
  }
  return lexicographicPath(src, dst, d, blocked, toDst);
}

std::optional<std::vector<Site>>
Architecture::nearestPath(Site src, double d, const SiteSet& forbidden,
                          const std::function<bool(Site)>& isTarget,
                          SearchStats* stats) const {
  if (isTarget(src)) {
    return std::vector<Site>{src};
  }
  const auto fromSrc = hopDistances(src, d, forbidden, stats);
  int bestHops = kUnreached;
  std::optional<Site> best;
  int bestSq = 0;
  for (std::size_t i = 0; i < fromSrc.size(); ++i) {
    if (fromSrc[i] == kUnreached || fromSrc[i] == 0 || fromSrc[i] > bestHops) {
      continue;
    }
    const Site t = site(i);
    const int sq = squaredDistance(src, t);
    if ((fromSrc[i] < bestHops || sq < bestSq) && isTarget(t)) {
      bestHops = fromSrc[i];
      bestSq = sq;
      best = t;
    }
  }
  if (!best) {
    return std::nullopt;
  }
  return shortestInteractionPath(src, *best, d, forbidden, stats);
}

SiteSet::SiteSet(const Architecture& arch, std::span<const Site> sites)
    : SiteSet(arch) {
  for (const auto s : sites) {
    insert(s);
  }
}

void SiteSet::insert(Site s) {
  auto& bit = bits_.at(indexOf(s));
  if (bit == 0) {
    bit = 1;
    ++count_;
  }
}

void SiteSet::erase(Site s) {
  if (!contains(s)) {
    return;
  }
  bits_[indexOf(s)] = 0;
  --count_;
}

bool SiteSet::contains(Site s) const {
  if (s.row < 0 || s.col < 0 || s.col >= cols_) {
    return false;
  }
  return containsIndex(indexOf(s));
}

void SiteSet::clear() {
  std::fill(bits_.begin(), bits_.end(), 0);
  count_ = 0;
}

void SiteSet::merge(const SiteSet& other) {
  for (std::size_t i = 0; i < other.bits_.size() && i < bits_.size(); ++i) {
    if (other.bits_[i] != 0 && bits_[i] == 0) {
      bits_[i] = 1;
      ++count_;
    }
  }
}

bool SiteSet::intersects(const SiteSet& other) const {
  const auto n = std::min(bits_.size(), other.bits_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (bits_[i] != 0 && other.bits_[i] != 0) {
      return true;
    }
  }
  return false;
}

std::vector<Site> SiteSet::sites() const {
  std::vector<Site> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] != 0) {
      out.push_back({static_cast<int>(i / static_cast<std::size_t>(cols_)),
                     static_cast<int>(i % static_cast<std::size_t>(cols_))});
    }
  }
  return out;
}

} // namespace naloss
