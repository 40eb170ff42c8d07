#include "photostyle/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "photostyle/color.hpp"
#include "photostyle/error.hpp"

namespace photostyle {

// ---------------------------------------------------------------------------
// Toggles and weights
// ---------------------------------------------------------------------------

FeatureTerms FeatureTerms::from_toggles(std::initializer_list<FeatureToggle> toggles) {
  return from_toggles(std::vector<FeatureToggle>(toggles));
}

FeatureTerms FeatureTerms::from_toggles(const std::vector<FeatureToggle>& toggles) {
  const auto has = [&](FeatureToggle t) { return std::find(toggles.begin(), toggles.end(), t) != toggles.end(); };
  FeatureTerms terms;
  terms.C = has(FeatureToggle::color);
  terms.La = terms.Lr = has(FeatureToggle::distance);
  terms.T = has(FeatureToggle::texture);
  terms.M = has(FeatureToggle::patch);
  terms.DV = has(FeatureToggle::gradient);
  terms.S = terms.C || terms.M || terms.DV;
  return terms;
}

std::vector<FeatureToggle> all_feature_toggles() {
  return {FeatureToggle::color, FeatureToggle::distance, FeatureToggle::texture, FeatureToggle::patch,
          FeatureToggle::gradient};
}

std::string to_string(FeatureToggle t) {
  switch (t) {
    case FeatureToggle::color: return "color";
    case FeatureToggle::distance: return "distance";
    case FeatureToggle::texture: return "texture";
    case FeatureToggle::patch: return "patch";
    case FeatureToggle::gradient: return "gradient";
  }
  return "?";
}

std::vector<FeatureToggle> parse_feature_toggles(const std::string& list) {
  std::vector<FeatureToggle> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    bool found = false;
    for (FeatureToggle t : all_feature_toggles()) {
      if (to_string(t) == item) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        found = true;
      }
    }
    if (!found) throw ValidationError("unknown feature toggle '" + item + "'");
  }
  if (out.empty()) throw ValidationError("feature toggle list must not be empty");
  return out;
}

void FeatureWeights::validate() const {
  for (double v : {lambda_M, lambda_T, lambda_C, lambda_DV, lambda_S, lambda_La, lambda_Lr, n_alpha, n_beta})
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("feature weights and ridge terms must be positive");
}

// ---------------------------------------------------------------------------
// Sparse codes
// ---------------------------------------------------------------------------

double SparseCode::at(int id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  return (it != ids.end() && *it == id) ? values[static_cast<std::size_t>(it - ids.begin())] : 0.0;
}

double squared_distance(SparseView a, SparseView b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.ids.size() || j < b.ids.size()) {
    double d;
    if (j == b.ids.size() || (i < a.ids.size() && a.ids[i] < b.ids[j])) {
      d = a.values[i++];
    } else if (i == a.ids.size() || b.ids[j] < a.ids[i]) {
      d = b.values[j++];
    } else {
      d = a.values[i++] - b.values[j++];
    }
    sum += d * d;
  }
  return sum;
}

namespace {

SparseCode scatter(std::span<const int> ids, const Eigen::VectorXd& coef) {
  std::vector<std::pair<int, double>> pairs(ids.size());
  for (std::size_t l = 0; l < ids.size(); ++l) pairs[l] = {ids[l], coef(static_cast<Eigen::Index>(l))};
  std::sort(pairs.begin(), pairs.end());
  SparseCode out;
  for (const auto& [id, v] : pairs) {
    out.ids.push_back(id);
    out.values.push_back(v);
  }
  return out;
}

void check_patch_side(int patch_side, int minimum) {
  if (patch_side < minimum || patch_side % 2 == 0)
    throw ValidationError("patch side must be odd and at least " + std::to_string(minimum));
}

}  // namespace

// ---------------------------------------------------------------------------
// Per-pixel features
// ---------------------------------------------------------------------------

GradientField compute_gradients(const ScalarPlane& intensity) {
  const int w = intensity.width();
  const int h = intensity.height();
  GradientField g{ScalarPlane(w, h), ScalarPlane(w, h), ScalarPlane(w, h)};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double dx = 0.5 * (intensity.clamped(r, c + 1) - intensity.clamped(r, c - 1));
      const double dy = 0.5 * (intensity.clamped(r + 1, c) - intensity.clamped(r - 1, c));
      g.dx.at(r, c) = dx;
      g.dy.at(r, c) = dy;
      g.magnitude.at(r, c) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return g;
}

std::vector<double> patch_intensity(const ScalarPlane& intensity, PixelLoc loc, int patch_side) {
  check_patch_side(patch_side, 1);
  const int half = patch_side / 2;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(patch_side) * patch_side);
  for (int dr = -half; dr <= half; ++dr)
    for (int dc = -half; dc <= half; ++dc) out.push_back(intensity.clamped(loc.row + dr, loc.col + dc));
  return out;
}

std::vector<double> patch_intensity(const ImagePlane& img, PixelLoc loc, int patch_side) {
  return patch_intensity(intensity_plane(img), loc, patch_side);
}

std::vector<double> gradient_patch(const GradientField& grad, PixelLoc loc, int patch_side) {
  return patch_intensity(grad.magnitude, loc, patch_side);
}

std::vector<double> gradient_patch(const ImagePlane& img, PixelLoc loc, int patch_side) {
  return gradient_patch(compute_gradients(intensity_plane(img)), loc, patch_side);
}

std::array<double, kTextureDim> texture_feature(const ScalarPlane& intensity, const GradientField& grad,
                                                PixelLoc loc, int patch_side) {
  check_patch_side(patch_side, 3);
  const int half = patch_side / 2;
  const double n = static_cast<double>(patch_side) * patch_side;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double bin_width = std::numbers::pi / 4.0;

  double sum = 0.0, mag_sum = 0.0;
  std::array<double, kTextureDim> out{};
  for (int dr = -half; dr <= half; ++dr) {
    for (int dc = -half; dc <= half; ++dc) {
      const int r = loc.row + dr, c = loc.col + dc;
      const double v = intensity.clamped(r, c);
      sum += v;
      const double mag = grad.magnitude.clamped(r, c);
      mag_sum += mag;
      if (mag > 0.0) {
        double angle = std::atan2(grad.dy.clamped(r, c), grad.dx.clamped(r, c));
        if (angle < 0.0) angle += two_pi;
        const int bin = std::min(7, static_cast<int>(angle / bin_width));
        out[2 + static_cast<std::size_t>(bin)] += mag;
      }
    }
  }
  const double mean = sum / n;
  double sq = 0.0;
  for (int dr = -half; dr <= half; ++dr) {
    for (int dc = -half; dc <= half; ++dc) {
      const double d = intensity.clamped(loc.row + dr, loc.col + dc) - mean;
      sq += d * d;
    }
  }
  out[0] = std::sqrt(sq / n);
  out[1] = mag_sum / n;
  double norm = 0.0;
  for (std::size_t b = 2; b < kTextureDim; ++b) norm += out[b] * out[b];
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (std::size_t b = 2; b < kTextureDim; ++b) out[b] /= norm;
  return out;
}

std::array<double, kTextureDim> texture_feature(const ImagePlane& img, PixelLoc loc, int patch_side) {
  const ScalarPlane intensity = intensity_plane(img);
  return texture_feature(intensity, compute_gradients(intensity), loc, patch_side);
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y, double ridge) {
  if (!(ridge > 0.0)) throw ValidationError("ridge parameter must be positive");
  const Eigen::Index d = basis.rows();
  const Eigen::Index k = basis.cols();
  if (d < k) {
    // (B^T B + rI)^-1 B^T == B^T (B B^T + rI)^-1, and the latter is smaller.
    Eigen::MatrixXd gram = basis * basis.transpose();
    gram.diagonal().array() += ridge;
    return basis.transpose() * gram.llt().solve(y);
  }
  Eigen::MatrixXd gram = basis.transpose() * basis;
  gram.diagonal().array() += ridge;
  return gram.llt().solve(basis.transpose() * y);
}

SparseCode relative_location(PixelLoc loc, const MatchedPointSet& matches, Side side, double n_alpha) {
  if (matches.size() < kNeighbourCount) throw InsufficientMatchesError(matches.size(), kNeighbourCount);
  const auto ids = matches.nearest(side, loc, kNeighbourCount);
  Eigen::MatrixXd tau(2, static_cast<Eigen::Index>(kNeighbourCount));
  for (std::size_t l = 0; l < kNeighbourCount; ++l) {
    const PixelLoc p = matches.loc(static_cast<std::size_t>(ids[l]), side);
    tau(0, static_cast<Eigen::Index>(l)) = p.row;
    tau(1, static_cast<Eigen::Index>(l)) = p.col;
  }
  const Eigen::Vector2d target(loc.row, loc.col);
  return scatter(ids, ridge_solve(tau, target, n_alpha));
}

namespace {

void append_stack(std::vector<double>& out, std::span<const double> M, const Triple& C, double I,
                  std::span<const double> DV) {
  out.insert(out.end(), M.begin(), M.end());
  out.insert(out.end(), C.begin(), C.end());
  out.push_back(I);
  out.insert(out.end(), DV.begin(), DV.end());
}

SparseCode llc_from_stacks(std::span<const int> ids, const std::vector<std::vector<double>>& basis_stacks,
                           const std::vector<double>& y, double n_beta) {
  const auto d = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd tau_f(d, static_cast<Eigen::Index>(ids.size()));
  for (std::size_t l = 0; l < ids.size(); ++l)
    tau_f.col(static_cast<Eigen::Index>(l)) = Eigen::Map<const Eigen::VectorXd>(basis_stacks[l].data(), d);
  return scatter(ids, ridge_solve(tau_f, Eigen::Map<const Eigen::VectorXd>(y.data(), d), n_beta));
}

}  // namespace

std::vector<double> appearance_stack(const ImagePlane& img, PixelLoc loc, int patch_side) {
  const ScalarPlane intensity = intensity_plane(img);
  const GradientField grad = compute_gradients(intensity);
  std::vector<double> out;
  append_stack(out, patch_intensity(intensity, loc, patch_side), img.at(loc), intensity.at(loc),
               gradient_patch(grad, loc, patch_side));
  return out;
}

SparseCode llc_feature(PixelLoc loc, const ImagePlane& img, const MatchedPointSet& matches, Side side,
                       double n_beta, int patch_side) {
  if (matches.size() < kNeighbourCount) throw InsufficientMatchesError(matches.size(), kNeighbourCount);
  const auto ids = matches.nearest(side, loc, kNeighbourCount);
  std::vector<std::vector<double>> basis;
  for (int id : ids) basis.push_back(appearance_stack(img, matches.loc(static_cast<std::size_t>(id), side), patch_side));
  return llc_from_stacks(ids, basis, appearance_stack(img, loc, patch_side), n_beta);
}

// ---------------------------------------------------------------------------
// Bank
// ---------------------------------------------------------------------------

PixelFeatureBank build_feature_bank(const ImagePlane& img, const MatchedPointSet& matches, Side side,
                                    const FeatureWeights& weights, int patch_side) {
  img.validate();
  weights.validate();
  check_patch_side(patch_side, 3);
  if (matches.dims(side) != img.dims()) throw ValidationError("match dimensions do not match the image");
  if (matches.size() < kNeighbourCount) throw InsufficientMatchesError(matches.size(), kNeighbourCount);

  PixelFeatureBank bank;
  const std::size_t n = img.size();
  const std::size_t pd = static_cast<std::size_t>(patch_side) * patch_side;
  bank.dims_ = img.dims();
  bank.patch_side_ = patch_side;
  bank.patch_dim_ = pd;
  bank.color_ = img.data();
  bank.intensity_ = intensity_plane(img);
  const GradientField grad = compute_gradients(bank.intensity_);

  bank.M_.resize(n * pd);
  bank.DV_.resize(n * pd);
  bank.T_.resize(n * kTextureDim);
  bank.La_.resize(n * 2);
  bank.Lr_.resize(n * kNeighbourCount);
  bank.S_.resize(n * kNeighbourCount);
  bank.Lr_ids_.resize(n * kNeighbourCount);
  bank.S_ids_.resize(n * kNeighbourCount);
  bank.neighbours_.resize(n * kNeighbourCount);

  const double h = img.height();
  const double w = img.width();
  for (std::size_t i = 0; i < n; ++i) {
    const PixelLoc p = bank.loc(i);
    const auto M = patch_intensity(bank.intensity_, p, patch_side);
    const auto DV = gradient_patch(grad, p, patch_side);
    std::copy(M.begin(), M.end(), bank.M_.begin() + static_cast<std::ptrdiff_t>(i * pd));
    std::copy(DV.begin(), DV.end(), bank.DV_.begin() + static_cast<std::ptrdiff_t>(i * pd));
    const auto T = texture_feature(bank.intensity_, grad, p, patch_side);
    std::copy(T.begin(), T.end(), bank.T_.begin() + static_cast<std::ptrdiff_t>(i * kTextureDim));
    bank.La_[2 * i] = p.row / h;
    bank.La_[2 * i + 1] = p.col / w;
  }

  // Appearance stacks of the matched points form the LLC bases.
  std::vector<std::vector<double>> match_stacks(matches.size());
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const std::size_t i = bank.index(matches.loc(m, side));
    append_stack(match_stacks[m], bank.M(i), img[i], bank.I(i), bank.DV(i));
  }

  std::vector<double> y;
  std::vector<std::vector<double>> basis(kNeighbourCount);
  for (std::size_t i = 0; i < n; ++i) {
    const PixelLoc p = bank.loc(i);
    const auto ids = matches.nearest(side, p, kNeighbourCount);
    std::copy(ids.begin(), ids.end(), bank.neighbours_.begin() + static_cast<std::ptrdiff_t>(i * kNeighbourCount));

    Eigen::Matrix<double, 2, Eigen::Dynamic> tau(2, static_cast<Eigen::Index>(kNeighbourCount));
    for (std::size_t l = 0; l < kNeighbourCount; ++l) {
      const PixelLoc q = matches.loc(static_cast<std::size_t>(ids[l]), side);
      tau(0, static_cast<Eigen::Index>(l)) = q.row;
      tau(1, static_cast<Eigen::Index>(l)) = q.col;
      basis[l] = match_stacks[static_cast<std::size_t>(ids[l])];
    }
    const SparseCode lr = scatter(ids, ridge_solve(tau, Eigen::Vector2d(p.row, p.col), weights.n_alpha));

    y.clear();
    append_stack(y, bank.M(i), img[i], bank.I(i), bank.DV(i));
    const SparseCode s = llc_from_stacks(ids, basis, y, weights.n_beta);

    for (std::size_t l = 0; l < kNeighbourCount; ++l) {
      bank.Lr_ids_[i * kNeighbourCount + l] = lr.ids[l];
      bank.Lr_[i * kNeighbourCount + l] = lr.values[l];
      bank.S_ids_[i * kNeighbourCount + l] = s.ids[l];
      bank.S_[i * kNeighbourCount + l] = s.values[l];
    }
  }
  return bank;
}

}  // namespace photostyle
