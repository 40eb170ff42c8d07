#pragma once

#include <cstddef>
#include <istream>
#include <vector>

#include "photostyle/image.hpp"

namespace photostyle {

inline constexpr std::size_t kMinMatches = 5;
inline constexpr double kDefaultMatchFraction = 0.7;

enum class Side { input, reference };

struct Match {
  PixelLoc input;
  PixelLoc ref;
  double score = 0.0;
  friend bool operator==(const Match&, const Match&) = default;
};

/// Scored correspondences between the input and reference images. The
/// position of an entry is its matched-point id; ids are always 0..n-1.
/// Immutable after construction.
class MatchedPointSet {
 public:
  /// Throws ValidationError on out-of-bounds locations or negative scores.
  MatchedPointSet(std::vector<Match> entries, Dims input_dims, Dims ref_dims);

  std::size_t size() const { return entries_.size(); }
  const Match& operator[](std::size_t id) const { return entries_[id]; }
  const std::vector<Match>& entries() const { return entries_; }
  Dims input_dims() const { return input_dims_; }
  Dims ref_dims() const { return ref_dims_; }
  Dims dims(Side side) const { return side == Side::input ? input_dims_ : ref_dims_; }
  PixelLoc loc(std::size_t id, Side side) const {
    return side == Side::input ? entries_[id].input : entries_[id].ref;
  }

  /// Ids of the k entries nearest to `loc` on `side`, ascending by Euclidean
  /// distance, ties to the lower id. Requires k <= size().
  std::vector<int> nearest(Side side, PixelLoc loc, std::size_t k) const;

 private:
  // Uniform bucket grid over one side's locations.
  struct Grid {
    int cell = 1;
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<int>> buckets;
  };

  Grid build_grid(Side side) const;
  std::vector<int> nearest_brute(Side side, PixelLoc loc, std::size_t k) const;
  std::vector<int> nearest_grid(const Grid& grid, Side side, PixelLoc loc, std::size_t k) const;

  std::vector<Match> entries_;
  Dims input_dims_;
  Dims ref_dims_;
  Grid input_grid_;
  Grid ref_grid_;
};

/// Sets at or above this size answer nearest() through the bucket grid.
inline constexpr std::size_t kGridIndexThreshold = 1000;

/// Parses `x_input y_input x_ref y_ref score` lines (x = column, y = row,
/// zero-based). '#' lines and blank lines are skipped. Duplicate input
/// locations keep the highest-scoring line. Throws ParseError,
/// ValidationError or InsufficientMatchesError.
MatchedPointSet load_matches(std::istream& text, Dims input_dims, Dims ref_dims);

/// Keeps the ceil(fraction * n) highest-scoring entries (ties to earlier
/// entries), preserving their relative order. Ids are reindexed densely.
MatchedPointSet filter_top_fraction(const MatchedPointSet& set, double fraction);

/// Free-function form of MatchedPointSet::nearest.
std::vector<int> nearest_matches(const MatchedPointSet& set, Side side, PixelLoc loc, std::size_t k);

}  // namespace photostyle
