#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace naloss {

/// Coordinate of one trapped atom on the grid.
struct Site {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Site&, const Site&) = default;
};

/// Euclidean distance in units of the lattice spacing.
double distance(Site a, Site b);

/// Squared Euclidean distance; exact in integers.
constexpr int squaredDistance(Site a, Site b) {
  const int dr = a.row - b.row;
  const int dc = a.col - b.col;
  return dr * dr + dc * dc;
}

/// True if sites at squared distance `sq` are within range `d`.
bool withinRange(int sq, double d);

/// How the restriction radius around a multi-qubit gate is derived.
enum class RestrictionRule {
  /// Half of the largest pairwise separation of the interacting atoms.
  HalfGateSpan,
  /// Half of the lattice spacing, independent of the gate.
  HalfPitch,
};

class SiteSet;

/// Node-expansion counter for graph searches (feeds the lookup-table cost).
struct SearchStats {
  std::size_t expansions = 0;
};

/**
 * @brief Rectangular neutral atom array with unit spacing.
 * @details Immutable after construction. Two atoms may take part in the same
 * multi-qubit gate when their Euclidean distance is at most dMax.
 */
class Architecture {
public:
  /// Throws Error(InvalidDimension) for rows/cols < 1 or dMax < 1.
  static Architecture grid(int rows, int cols, double dMax,
                           RestrictionRule rule = RestrictionRule::HalfGateSpan);

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] double dMax() const noexcept { return dMax_; }
  [[nodiscard]] RestrictionRule restrictionRule() const noexcept {
    return rule_;
  }
  [[nodiscard]] std::size_t numSites() const noexcept {
    return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  }

  [[nodiscard]] bool contains(Site s) const noexcept {
    return s.row >= 0 && s.row < rows_ && s.col >= 0 && s.col < cols_;
  }
  [[nodiscard]] std::size_t index(Site s) const noexcept {
    return static_cast<std::size_t>(s.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(s.col);
  }
  [[nodiscard]] Site site(std::size_t index) const noexcept {
    return Site{static_cast<int>(index / static_cast<std::size_t>(cols_)),
                static_cast<int>(index % static_cast<std::size_t>(cols_))};
  }
  /// All sites in row-major order.
  [[nodiscard]] std::vector<Site> sites() const;

  /// Sites t != s with distance(s, t) <= d, row-major.
  [[nodiscard]] std::vector<Site> neighbors(Site s, double d) const;

  /**
   * Restriction zone of a gate acting on `gateSites`: every other site within
   * r/2 of any gate atom, r being the largest pairwise separation (or the
   * spacing for the half-pitch rule and for single-qubit gates).
   * Throws Error(OutOfRangeInteraction) if a pair exceeds dMax.
   */
  [[nodiscard]] SiteSet blockedSites(std::span<const Site> gateSites) const;

  /// Same as blockedSites but tolerates out-of-range pairs; appends indices.
  void restrictionZone(std::span<const Site> gateSites,
                       std::vector<std::size_t>& out) const;

  /**
   * Minimum-hop path src -> dst over interaction edges of range d that avoids
   * `forbidden`. Among equal-length paths the lexicographically smallest site
   * sequence is returned. nullopt when dst is unreachable.
   */
  [[nodiscard]] std::optional<std::vector<Site>>
  shortestInteractionPath(Site src, Site dst, double d,
                          const SiteSet& forbidden,
                          SearchStats* stats = nullptr) const;

  /**
   * Breadth-first search from src to the nearest site satisfying `isTarget`.
   * Ties at equal hop count go to the target closest to src, then to the
   * row-major smallest; the path to it is the lexicographically smallest.
   */
  [[nodiscard]] std::optional<std::vector<Site>>
  nearestPath(Site src, double d, const SiteSet& forbidden,
              const std::function<bool(Site)>& isTarget,
              SearchStats* stats = nullptr) const;

private:
  Architecture(int rows, int cols, double dMax, RestrictionRule rule)
      : rows_(rows), cols_(cols), dMax_(dMax), rule_(rule) {}

  /// Offsets (dr, dc) != 0 with norm <= d, sorted row-major.
  static std::vector<Site> offsetsWithin(double d);

  std::vector<int> hopDistances(Site from, double d,
                                const SiteSet& forbidden,
                                SearchStats* stats) const;
  std::vector<Site> lexicographicPath(Site src, Site dst, double d,
                                      const SiteSet& forbidden,
                                      const std::vector<int>& toDst) const;

  int rows_;
  int cols_;
  double dMax_;
  RestrictionRule rule_;
};

/// Set of sites of one architecture, stored as a row-major bitmap.
class SiteSet {
public:
  SiteSet() = default;
  explicit SiteSet(const Architecture& arch)
      : cols_(arch.cols()), bits_(arch.numSites(), 0) {}
  SiteSet(const Architecture& arch, std::span<const Site> sites);

  void insert(Site s);
  void erase(Site s);
  [[nodiscard]] bool contains(Site s) const;
  [[nodiscard]] bool containsIndex(std::size_t i) const {
    return i < bits_.size() && bits_[i] != 0;
  }
  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] bool empty() const noexcept { return count_ == 0; }
  [[nodiscard]] std::size_t capacity() const noexcept { return bits_.size(); }
  void clear();
  void merge(const SiteSet& other);
  [[nodiscard]] bool intersects(const SiteSet& other) const;
  /// Members in row-major order.
  [[nodiscard]] std::vector<Site> sites() const;

  friend bool operator==(const SiteSet& a, const SiteSet& b) {
    return a.bits_ == b.bits_;
  }

private:
  [[nodiscard]] std::size_t indexOf(Site s) const {
    return static_cast<std::size_t>(s.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(s.col);
  }

  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

/**
 * @brief Which atoms of the array are gone.
 * @details Grows monotonically between reloads and is emptied by a reload.
 */
class LossState {
public:
  LossState() = default;
  explicit LossState(const Architecture& arch) : lost_(arch) {}

  void markLost(Site s) { lost_.insert(s); }
  [[nodiscard]] bool isLost(Site s) const { return lost_.contains(s); }
  [[nodiscard]] std::size_t count() const noexcept { return lost_.size(); }
  void clear() { lost_.clear(); }
  [[nodiscard]] const SiteSet& sites() const noexcept { return lost_; }

private:
  SiteSet lost_;
};

} // namespace naloss
