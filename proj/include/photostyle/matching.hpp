#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "photostyle/features.hpp"
#include "photostyle/image.hpp"
#include "photostyle/matches.hpp"
#include "photostyle/seeds.hpp"

namespace photostyle {

/// Per-channel mean and population standard deviation in l-alpha-beta.
struct ChannelStats {
  Triple mean{};
  Triple stddev{};
};

/// Population statistics of `lab` over the given pixel indices.
ChannelStats compute_stats(const LabPlane& lab, const std::vector<std::size_t>& pixels);

struct SuperpixelDescriptor {
  int id = 0;
  Side side = Side::input;
  std::size_t pixel_count = 0;
  StyleFreeFeature mean_f;
  ChannelStats lab_stats;
};

/// One descriptor per superpixel id. Every pixel must be labelled.
std::vector<SuperpixelDescriptor> aggregate_superpixels(const PixelFeatureBank& bank, const SuperpixelLabelMap& labels,
                                                        const LabPlane& lab, Side side);

double superpixel_affinity(const SuperpixelDescriptor& a, const SuperpixelDescriptor& b, const FeatureWeights& weights);

/// Input-side ids on rows, reference-side ids on columns.
struct AffinityMatrix {
  Eigen::MatrixXd affinity;
  /// The exponent before exp(); ranks pairs even where exp() underflows.
  Eigen::MatrixXd exponent;
};

AffinityMatrix superpixel_affinities(const std::vector<SuperpixelDescriptor>& inputs,
                                     const std::vector<SuperpixelDescriptor>& refs, const FeatureWeights& weights);

inline constexpr double kDefaultEpsilonEdge = 1e-4;

class CorrespondenceTable {
 public:
  /// One-to-one pairs surviving the edge threshold.
  std::map<int, int> pairs;
  /// Reference id used for each input id that is not in `pairs`.
  std::map<int, int> fallback;
  /// Raw assignment per input row (-1 for a dummy column).
  std::vector<int> assignment;
  /// Minimum total cost of the padded square instance.
  double total_cost = 0.0;

  /// Throws ValidationError for ids that resolve nowhere.
  int resolve(int input_id) const;
  bool resolves_all(int input_count) const;
};

/// Minimum-cost square assignment (cost[row][col]); returns col per row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Sum of cost(row, assignment[row]) over rows, in row order.
double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment);

/// cost = 1 - affinity, padded to square with cost 1. Pairs below
/// epsilon_edge or on dummies fall back to the highest-affinity reference
/// (ranked by `exponent` when given, so underflowed rows still rank).
CorrespondenceTable hungarian_match(const Eigen::MatrixXd& affinity, double epsilon_edge,
                                    const Eigen::MatrixXd* exponent = nullptr);

/// Writes "input_id ref_id affinity" for every input id.
void write_correspondences(std::ostream& out, const CorrespondenceTable& table, const Eigen::MatrixXd& affinity);

}  // namespace photostyle
