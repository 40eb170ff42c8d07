#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "photostyle/features.hpp"
#include "photostyle/image.hpp"
#include "photostyle/matches.hpp"

namespace photostyle {

inline constexpr int kUncovered = -1;

enum class OriginKind { seed, partition };

/// Where a superpixel came from: the matched point it was grown around, or
/// the co-clustering cluster it was partitioned into.
struct SuperpixelOrigin {
  OriginKind kind = OriginKind::seed;
  int index = 0;
  friend bool operator==(const SuperpixelOrigin&, const SuperpixelOrigin&) = default;
};

/// Per-pixel superpixel ids (kUncovered for none). Ids are dense 0..count-1.
class SuperpixelLabelMap {
 public:
  SuperpixelLabelMap() = default;
  explicit SuperpixelLabelMap(Dims dims) : dims_(dims), labels_(dims.area(), kUncovered) {}

  Dims dims() const { return dims_; }
  std::size_t pixel_count() const { return labels_.size(); }
  int count() const { return static_cast<int>(origins_.size()); }

  int label(std::size_t idx) const { return labels_[idx]; }
  int label(PixelLoc p) const { return labels_[static_cast<std::size_t>(p.row) * dims_.width + p.col]; }
  bool covered(std::size_t idx) const { return labels_[idx] != kUncovered; }
  std::size_t uncovered_count() const;
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<SuperpixelOrigin>& origins() const { return origins_; }
  const SuperpixelOrigin& origin(int id) const { return origins_[static_cast<std::size_t>(id)]; }

  /// Appends a new superpixel and returns its id.
  int add_superpixel(SuperpixelOrigin origin);
  void assign(std::size_t idx, int id) { labels_[idx] = id; }

  /// Member pixel indices of every superpixel.
  std::vector<std::vector<std::size_t>> members() const;

  /// Throws ValidationError if an id is out of range or has no pixels.
  void validate() const;

 private:
  Dims dims_;
  std::vector<int> labels_;
  std::vector<SuperpixelOrigin> origins_;
};

/// Positive magnitude of the weighted style-related distance over the
/// M, T, C, DV and La terms. Zero for identical locations.
double seed_distance(const PixelFeatureBank& bank, PixelLoc pixel, PixelLoc match, const FeatureWeights& weights);

/// 2 * ceil(diagonal / sqrt(match_count)).
int default_seed_window(Dims dims, std::size_t match_count);

struct SeedThresholdSampling {
  double percentile = 0.6;
  std::size_t samples = 1000;
  std::uint64_t rng_seed = 0;
};

/// Minimum seed distance of each sampled pixel (drawn with replacement) over
/// the matched points whose window contains it; pixels outside every window
/// are skipped.
std::vector<double> sampled_seed_distances(const PixelFeatureBank& bank, const MatchedPointSet& matches, Side side,
                                           const FeatureWeights& weights, int window_radius,
                                           const SeedThresholdSampling& sampling);

/// Nearest-rank percentile (p in (0,1]); 0 for an empty sample.
double nearest_rank_percentile(std::vector<double> values, double percentile);

/// Data-driven threshold for one image: the sampling percentile of
/// sampled_seed_distances.
double auto_seed_threshold(const PixelFeatureBank& bank, const MatchedPointSet& matches, Side side,
                           const FeatureWeights& weights, int window_radius, const SeedThresholdSampling& sampling);

/// One threshold for an image pair: the percentile of both images' samples
/// pooled, each drawn with the same seed and its default window.
double auto_seed_threshold(const PixelFeatureBank& bank_in, const PixelFeatureBank& bank_ref,
                           const MatchedPointSet& matches, const FeatureWeights& weights,
                           const SeedThresholdSampling& sampling);

/// Labels each pixel within `t_cluster` of some matched point (searched in a
/// square window of `window_radius`) with the arg-min matched point's seed
/// superpixel; ties go to the lower matched-point id. Matched-point pixels
/// always carry their own seed.
SuperpixelLabelMap grow_seeds(const PixelFeatureBank& bank, const MatchedPointSet& matches, Side side,
                              const FeatureWeights& weights, double t_cluster, int window_radius);

}  // namespace photostyle
