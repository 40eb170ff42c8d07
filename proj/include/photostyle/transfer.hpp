#pragma once

#include <cstddef>
#include <vector>

#include "photostyle/image.hpp"
#include "photostyle/matching.hpp"
#include "photostyle/seeds.hpp"

namespace photostyle {

inline constexpr double kDefaultSigmaFloor = 1e-6;
inline constexpr int kDefaultGuidedRadius = 8;
inline constexpr double kDefaultGuidedEps = 1e-4;

/// Per channel: (x - mean_in) * std_ref / max(std_in, sigma_floor) + mean_ref,
/// for the pixels in `mask` only.
void transfer_region(LabPlane& lab, const std::vector<std::size_t>& mask, const ChannelStats& stats_in,
                     const ChannelStats& stats_ref, double sigma_floor = kDefaultSigmaFloor);

/// Mean over the (2r+1)^2 window with replicate padding.
ScalarPlane box_mean(const ScalarPlane& src, int radius);

/// Guided filter: a = cov(I,p)/(var(I)+eps), b = mean(p) - a mean(I),
/// q = mean(a) I + mean(b). Windows with var + eps == 0 use a = 0.
ScalarPlane guided_filter(const ScalarPlane& guide, const ScalarPlane& src, int radius, double eps);

struct TransferOptions {
  double sigma_floor = kDefaultSigmaFloor;
  int guided_radius = kDefaultGuidedRadius;
  double guided_eps = kDefaultGuidedEps;
  /// Skip the smoothing pass; `styled` then equals `transferred`.
  bool smooth = true;
};

struct StylizeResult {
  LabPlane transferred;  // per-superpixel statistics transfer
  LabPlane styled;       // after boundary smoothing
};

/// Transfers every input superpixel against its corresponded reference
/// superpixel, then smooths the per-pixel change (transferred - input) of
/// each channel with the guided filter and adds it back to the input.
StylizeResult stylize(const LabPlane& lab_in, const LabPlane& lab_ref, const SuperpixelLabelMap& labels_in,
                      const SuperpixelLabelMap& labels_ref, const CorrespondenceTable& table,
                      const ScalarPlane& guide, const TransferOptions& options = {});

}  // namespace photostyle
