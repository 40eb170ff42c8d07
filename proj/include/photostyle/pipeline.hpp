#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "photostyle/bipartite.hpp"
#include "photostyle/features.hpp"
#include "photostyle/image.hpp"
#include "photostyle/matches.hpp"
#include "photostyle/matching.hpp"
#include "photostyle/seeds.hpp"
#include "photostyle/transfer.hpp"

namespace photostyle {

inline constexpr std::size_t kDefaultSuperpixelArea = 300;

struct PipelineConfig {
  FeatureWeights weights;
  double match_fraction = kDefaultMatchFraction;
  int patch_side = kDefaultPatchSide;
  /// nullopt: percentile of seed distances sampled from both images.
  std::optional<double> t_cluster;
  std::size_t target_superpixel_area = kDefaultSuperpixelArea;
  /// Pixel-graph sampling stride; 0 picks 1 or 2 per side by uncovered count.
  int stride = 0;
  double epsilon_edge = kDefaultEpsilonEdge;
  int guided_radius = kDefaultGuidedRadius;
  double guided_eps = kDefaultGuidedEps;
  double sigma_floor = kDefaultSigmaFloor;
  double log_floor = 1e-6;
  std::uint64_t rng_seed = 0;
  std::vector<FeatureToggle> feature_toggles = all_feature_toggles();

  /// Throws ValidationError for any field outside its domain.
  void validate() const;
  /// Weights with the toggle mask applied.
  FeatureWeights effective_weights() const;
};

/// Where to cut the flow short. Every mode still produces a styled image:
///  seeds     - uncovered pixels join their nearest matched point's seed;
///              seeds pair by matched-point id
///  partition - partition clusters pair by cluster index, seeds by
///              matched-point id (no superpixel-level matching)
///  match     - full correspondence, no boundary smoothing
enum class StopAfter { none, seeds, partition, match };

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

struct RunReport {
  std::vector<StageTiming> timings;
  std::size_t matches_loaded = 0;
  std::size_t matches_kept = 0;
  double t_cluster = 0.0;
  int seed_superpixels_input = 0;
  int seed_superpixels_reference = 0;
  int partition_clusters = 0;
  bool partition_skipped = false;
  std::size_t graph_x_nodes = 0;
  std::size_t graph_y_nodes = 0;
  std::size_t graph_edges = 0;
  int svd_restarts = 0;
  int input_superpixels = 0;
  int reference_superpixels = 0;
  int matched_pairs = 0;
  int fallback_count = 0;

  /// "key: value" lines, one per field; timings as "stage.<name>_ms".
  void write(std::ostream& out) const;
};

struct Intermediates {
  SuperpixelLabelMap seeds_input;
  SuperpixelLabelMap seeds_reference;
  SuperpixelLabelMap labels_input;
  SuperpixelLabelMap labels_reference;
  BipartiteAffinity pixel_graph;
  CorrespondenceTable table;
  Eigen::MatrixXd affinity;  // input superpixels x reference superpixels
  LabPlane lab_input;
  LabPlane lab_reference;
  LabPlane transferred;  // before smoothing
};

struct RunResult {
  ImagePlane styled;
  LabPlane styled_lab;
  RunReport report;
  Intermediates intermediates;
};

/// Correspondence used by the partition-only ablation: seeds pair with the
/// reference seed at the same matched point, clusters with the same cluster
/// index. Unpaired input superpixels fall back to the highest affinity.
CorrespondenceTable provisional_correspondence(const SuperpixelLabelMap& labels_in,
                                               const SuperpixelLabelMap& labels_ref, const MatchedPointSet& matches,
                                               const Eigen::MatrixXd& exponent);

/// Runs the whole flow on already parsed matches (before confidence filtering).
/// Errors are rethrown as StageError carrying the stage name.
RunResult run(const ImagePlane& input, const ImagePlane& reference, const MatchedPointSet& matches,
              const PipelineConfig& config, StopAfter stop_after = StopAfter::none);

/// Same, parsing the match file first (stage "matches").
RunResult run(const ImagePlane& input, const ImagePlane& reference, std::istream& matches_text,
              const PipelineConfig& config, StopAfter stop_after = StopAfter::none);

}  // namespace photostyle
