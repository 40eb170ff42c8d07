#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "photostyle/features.hpp"
#include "photostyle/seeds.hpp"

namespace photostyle {

struct BipartiteEdge {
  int x = 0;
  int y = 0;
  double weight = 0.0;
};

/// Weighted bipartite graph between n_x input-side and n_y reference-side nodes.
class BipartiteAffinity {
 public:
  BipartiteAffinity() = default;
  /// Throws ValidationError on out-of-range nodes, non-positive or
  /// non-finite weights, or duplicate (x, y) pairs.
  BipartiteAffinity(int n_x, int n_y, std::vector<BipartiteEdge> edges);

  int n_x() const { return n_x_; }
  int n_y() const { return n_y_; }
  const std::vector<BipartiteEdge>& edges() const { return edges_; }
  const std::vector<double>& deg_x() const { return deg_x_; }
  const std::vector<double>& deg_y() const { return deg_y_; }
  bool isolated_x(int i) const { return deg_x_[static_cast<std::size_t>(i)] == 0.0; }
  bool isolated_y(int j) const { return deg_y_[static_cast<std::size_t>(j)] == 0.0; }
  bool has_isolated() const;

  /// Graph restricted to non-isolated nodes, with the kept original indices.
  BipartiteAffinity without_isolated(std::vector<int>& kept_x, std::vector<int>& kept_y) const;

  /// D_X^-1/2 * Omega * D_Y^-1/2 (row-major, n_x x n_y).
  Eigen::SparseMatrix<double, Eigen::RowMajor> normalized_across_affinity() const;
  Eigen::MatrixXd dense_across_affinity() const;

 private:
  int n_x_ = 0;
  int n_y_ = 0;
  std::vector<BipartiteEdge> edges_;
  std::vector<double> deg_x_;
  std::vector<double> deg_y_;
};

/// Sum of the weighted squared differences over the S, T, La and Lr terms.
double affinity_exponent(const StyleFreeView& a, const StyleFreeView& b, const FeatureWeights& weights);

/// exp(-affinity_exponent); 1 exactly when the style-free features agree.
double pixel_affinity(const StyleFreeView& a, const StyleFreeView& b, const FeatureWeights& weights);

/// Stride 2 above this many uncovered pixels on a side, else 1.
inline constexpr std::size_t kAutoStrideThreshold = 20000;
int auto_stride(std::size_t uncovered_pixels);

/// Pixel-level graph over the sampled uncovered pixels of both images.
struct PixelGraph {
  BipartiteAffinity graph;
  std::vector<std::size_t> x_pixels;  // node -> input pixel index
  std::vector<std::size_t> y_pixels;  // node -> reference pixel index
  /// One side had no uncovered pixels; there is nothing to partition.
  bool degenerate = false;
};

/// Nodes are uncovered pixels with row % stride == 0 and col % stride == 0.
/// An edge joins p and q iff their nearest matched points have the same
/// id; edges whose affinity falls below the smallest normal double are omitted.
PixelGraph build_pixel_graph(const PixelFeatureBank& bank_in, const PixelFeatureBank& bank_ref,
                             const SuperpixelLabelMap& labels_in, const SuperpixelLabelMap& labels_ref,
                             const FeatureWeights& weights, int stride_in, int stride_ref);

/// Writes one "x y w" line per edge.
void write_edge_list(std::ostream& out, const BipartiteAffinity& g);

// ---------------------------------------------------------------------------
// Spectral co-clustering
// ---------------------------------------------------------------------------

enum class SvdMethod { automatic, dense, iterative };

struct CoClusterOptions {
  SvdMethod method = SvdMethod::automatic;
  /// automatic uses the dense SVD below this many nodes (n_x + n_y).
  int dense_node_limit = 500;
  int max_restarts = 500;
  double drift_tolerance = 1e-9;
  int kmeans_max_iterations = 100;
  double kmeans_tolerance = 1e-6;
  int kmeans_max_repairs = 10;
};

struct PartialSvd {
  Eigen::VectorXd values;  // descending
  Eigen::MatrixXd U;       // n_x x r
  Eigen::MatrixXd V;       // n_y x r
  int restarts = 0;        // 0 for the dense solver
};

/// Top-r singular triplets of the normalized across-affinity matrix.
/// Throws SvdConvergenceError when the iterative solver does not settle.
PartialSvd normalized_partial_svd(const BipartiteAffinity& g, int r, std::uint64_t seed,
                                  const CoClusterOptions& options = {});

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  int iterations = 0;
  int repairs = 0;
  double inertia = 0.0;
};

/// Lloyd iterations from a farthest-first start whose first center is the
/// point farthest from the centroid. Empty clusters are re-seeded from the
/// point farthest from its center, up to max_repairs times.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int max_iterations, double tolerance, int max_repairs);

struct CoClustering {
  int k = 0;
  std::vector<int> x_labels;
  std::vector<int> y_labels;
  /// Clusters with nodes on only one side (or none).
  std::vector<bool> one_sided;
  int repairs = 0;
  int svd_restarts = 0;
};

/// Requires k >= 1 and no isolated nodes. k = 1 puts every node in cluster 0.
/// A disconnected graph is clustered per connected component; the
/// max(k, components) clusters are shared out by node count, at least one each.
CoClustering co_cluster(const BipartiteAffinity& g, int k, std::uint64_t seed, const CoClusterOptions& options = {});

/// max(2, ceil(uncovered / target_area)).
int choose_k(std::size_t uncovered_count, std::size_t target_area);

}  // namespace photostyle
