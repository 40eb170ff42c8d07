#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "photostyle/image.hpp"
#include "photostyle/matches.hpp"

namespace photostyle {

inline constexpr std::size_t kNeighbourCount = 5;
inline constexpr std::size_t kTextureDim = 10;
inline constexpr int kDefaultPatchSide = 5;

/// Feature groups that can be switched off for ablation.
enum class FeatureToggle { color, distance, texture, patch, gradient };

/// Which distance/affinity terms contribute. A disabled term adds nothing.
struct FeatureTerms {
  bool M = true;
  bool T = true;
  bool C = true;
  bool DV = true;
  bool S = true;
  bool La = true;
  bool Lr = true;

  /// color -> C, distance -> La and Lr, texture -> T, patch -> M,
  /// gradient -> DV. S stays on while any of color/patch/gradient is on,
  /// since its basis is built from those appearance features.
  static FeatureTerms from_toggles(std::initializer_list<FeatureToggle> toggles);
  static FeatureTerms from_toggles(const std::vector<FeatureToggle>& toggles);
};

std::vector<FeatureToggle> all_feature_toggles();
/// Parses "color,distance,..."; throws ValidationError on unknown or empty lists.
std::vector<FeatureToggle> parse_feature_toggles(const std::string& list);
std::string to_string(FeatureToggle t);

struct FeatureWeights {
  double lambda_M = 0.1;
  double lambda_T = 0.001;
  double lambda_C = 0.0001;
  double lambda_DV = 1e-6;
  double lambda_S = 0.1;
  double lambda_La = 0.01;
  double lambda_Lr = 0.01;
  double n_alpha = 1000.0;
  double n_beta = 1e6;
  FeatureTerms terms;

  /// Throws ValidationError unless every lambda and ridge term is > 0.
  void validate() const;

  double inv_M() const { return terms.M ? 1.0 / lambda_M : 0.0; }
  double inv_T() const { return terms.T ? 1.0 / lambda_T : 0.0; }
  double inv_C() const { return terms.C ? 1.0 / lambda_C : 0.0; }
  double inv_DV() const { return terms.DV ? 1.0 / lambda_DV : 0.0; }
  double inv_S() const { return terms.S ? 1.0 / lambda_S : 0.0; }
  double inv_La() const { return terms.La ? 1.0 / lambda_La : 0.0; }
  double inv_Lr() const { return terms.Lr ? 1.0 / lambda_Lr : 0.0; }
};

// ---------------------------------------------------------------------------
// Sparse codes over matched-point ids
// ---------------------------------------------------------------------------

/// Non-owning sparse vector; ids strictly ascending.
struct SparseView {
  std::span<const int> ids;
  std::span<const double> values;
};

struct SparseCode {
  std::vector<int> ids;
  std::vector<double> values;

  SparseView view() const { return {ids, values}; }
  std::size_t nnz() const { return ids.size(); }
  /// Coefficient at `id`, zero when not stored.
  double at(int id) const;
};

double squared_distance(SparseView a, SparseView b);

/// Style-independent per-pixel feature f = [S, T, La, Lr].
struct StyleFreeView {
  SparseView S;
  std::span<const double> T;
  std::span<const double> La;
  SparseView Lr;
};

struct StyleFreeFeature {
  SparseCode S;
  std::array<double, kTextureDim> T{};
  std::array<double, 2> La{};
  SparseCode Lr;

  StyleFreeView view() const { return {S.view(), T, La, Lr.view()}; }
};

// ---------------------------------------------------------------------------
// Per-pixel building blocks
// ---------------------------------------------------------------------------

struct GradientField {
  ScalarPlane dx;
  ScalarPlane dy;
  ScalarPlane magnitude;
};

/// Central differences on the intensity plane, replicate boundaries.
GradientField compute_gradients(const ScalarPlane& intensity);

/// Row-major intensities of the patch_side x patch_side window, replicate padded.
std::vector<double> patch_intensity(const ScalarPlane& intensity, PixelLoc loc, int patch_side);
std::vector<double> patch_intensity(const ImagePlane& img, PixelLoc loc, int patch_side);

/// Row-major gradient magnitudes over the window.
std::vector<double> gradient_patch(const GradientField& grad, PixelLoc loc, int patch_side);
std::vector<double> gradient_patch(const ImagePlane& img, PixelLoc loc, int patch_side);

/// [std of patch intensity, mean gradient magnitude, 8-bin orientation
/// histogram (pi/4 bins over [0, 2pi), magnitude votes, L2 normalised)].
std::array<double, kTextureDim> texture_feature(const ScalarPlane& intensity, const GradientField& grad,
                                                PixelLoc loc, int patch_side);
std::array<double, kTextureDim> texture_feature(const ImagePlane& img, PixelLoc loc, int patch_side);

/// Ridge regression coefficients (B^T B + ridge I)^-1 B^T y for basis B (d x k).
/// Uses the d x d push-through form when d < k.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y, double ridge);

/// Coordinates of `loc` in the basis of its five nearest matched locations,
/// scattered onto their matched-point ids.
SparseCode relative_location(PixelLoc loc, const MatchedPointSet& matches, Side side, double n_alpha);

/// Appearance stack [M, C, I, DV] of one pixel.
std::vector<double> appearance_stack(const ImagePlane& img, PixelLoc loc, int patch_side);

/// Coordinates of the appearance stack of `loc` in the basis of the stacks
/// of its five nearest matched points (pixel-space nearness on `side`).
SparseCode llc_feature(PixelLoc loc, const ImagePlane& img, const MatchedPointSet& matches, Side side,
                       double n_beta, int patch_side);

// ---------------------------------------------------------------------------
// Feature bank
// ---------------------------------------------------------------------------

/// Every hierarchical feature of every pixel of one image. Immutable.
class PixelFeatureBank {
 public:
  Dims dims() const { return dims_; }
  int patch_side() const { return patch_side_; }
  std::size_t patch_dim() const { return patch_dim_; }
  std::size_t pixel_count() const { return dims_.area(); }
  std::size_t index(PixelLoc p) const { return static_cast<std::size_t>(p.row) * dims_.width + p.col; }
  PixelLoc loc(std::size_t idx) const {
    return {static_cast<int>(idx / dims_.width), static_cast<int>(idx % dims_.width)};
  }

  std::span<const double> M(std::size_t i) const { return slice(M_, i, patch_dim_); }
  std::span<const double> C(std::size_t i) const { return color_[i]; }
  double I(std::size_t i) const { return intensity_[i]; }
  std::span<const double> DV(std::size_t i) const { return slice(DV_, i, patch_dim_); }
  std::span<const double> T(std::size_t i) const { return slice(T_, i, kTextureDim); }
  std::span<const double> La(std::size_t i) const { return slice(La_, i, 2); }
  SparseView Lr(std::size_t i) const { return {slice(Lr_ids_, i, kNeighbourCount), slice(Lr_, i, kNeighbourCount)}; }
  SparseView S(std::size_t i) const { return {slice(S_ids_, i, kNeighbourCount), slice(S_, i, kNeighbourCount)}; }
  /// Matched-point ids of the five nearest matched points, nearest first.
  std::span<const int> neighbours(std::size_t i) const { return slice(neighbours_, i, kNeighbourCount); }
  int nearest_match(std::size_t i) const { return neighbours_[i * kNeighbourCount]; }

  StyleFreeView style_free(std::size_t i) const { return {S(i), T(i), La(i), Lr(i)}; }

  const ScalarPlane& intensity() const { return intensity_; }

  friend PixelFeatureBank build_feature_bank(const ImagePlane&, const MatchedPointSet&, Side,
                                             const FeatureWeights&, int);

 private:
  template <typename T>
  static std::span<const T> slice(const std::vector<T>& v, std::size_t i, std::size_t n) {
    return std::span<const T>(v).subspan(i * n, n);
  }

  Dims dims_;
  int patch_side_ = 0;
  std::size_t patch_dim_ = 0;
  std::vector<Triple> color_;
  ScalarPlane intensity_;
  std::vector<double> M_, DV_, T_, La_, Lr_, S_;
  std::vector<int> Lr_ids_, S_ids_, neighbours_;
};

/// Computes all features for every pixel of `img` on `side` of `matches`.
PixelFeatureBank build_feature_bank(const ImagePlane& img, const MatchedPointSet& matches, Side side,
                                    const FeatureWeights& weights, int patch_side = kDefaultPatchSide);

}  // namespace photostyle
