#include "photostyle/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "photostyle/error.hpp"

namespace photostyle {

void transfer_region(LabPlane& lab, const std::vector<std::size_t>& mask, const ChannelStats& stats_in,
                     const ChannelStats& stats_ref, double sigma_floor) {
  if (mask.empty()) throw ValidationError("transfer_region: empty mask");
  if (!(sigma_floor > 0.0)) throw ValidationError("sigma_floor must be positive");
  Triple scale{};
  for (int c = 0; c < 3; ++c) scale[c] = stats_ref.stddev[c] / std::max(stats_in.stddev[c], sigma_floor);
  for (std::size_t i : mask)
    for (int c = 0; c < 3; ++c) lab[i][c] = (lab[i][c] - stats_in.mean[c]) * scale[c] + stats_ref.mean[c];
}

ScalarPlane box_mean(const ScalarPlane& src, int radius) {
  if (radius < 0) throw ValidationError("box radius must be non-negative");
  const int w = src.width(), h = src.height();
  ScalarPlane out(w, h);
  if (radius == 0) return src;
  // Summed-area table over the replicate-padded image.
  const int pw = w + 2 * radius, ph = h + 2 * radius;
  std::vector<double> sat(static_cast<std::size_t>(pw + 1) * (ph + 1), 0.0);
  const auto S = [&](int r, int c) -> double& { return sat[static_cast<std::size_t>(r) * (pw + 1) + c]; };
  for (int r = 0; r < ph; ++r) {
    double row_sum = 0.0;
    for (int c = 0; c < pw; ++c) {
      row_sum += src.clamped(r - radius, c - radius);
      S(r + 1, c + 1) = S(r, c + 1) + row_sum;
    }
  }
  const int side = 2 * radius + 1;
  const double area = static_cast<double>(side) * side;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      out.at(r, c) = (S(r + side, c + side) - S(r, c + side) - S(r + side, c) + S(r, c)) / area;
  return out;
}

ScalarPlane guided_filter(const ScalarPlane& guide, const ScalarPlane& src, int radius, double eps) {
  if (guide.dims() != src.dims()) throw ValidationError("guided_filter: guide and source differ in size");
  if (!(eps >= 0.0)) throw ValidationError("guided_filter: eps must be non-negative");
  if (radius < 0) throw ValidationError("guided_filter: radius must be non-negative");
  if (radius == 0) return src;

  const int w = src.width(), h = src.height();
  ScalarPlane gg(w, h), gs(w, h);
  for (std::size_t i = 0; i < src.size(); ++i) {
    gg[i] = guide[i] * guide[i];
    gs[i] = guide[i] * src[i];
  }
  const ScalarPlane mean_g = box_mean(guide, radius);
  const ScalarPlane mean_s = box_mean(src, radius);
  const ScalarPlane mean_gg = box_mean(gg, radius);
  const ScalarPlane mean_gs = box_mean(gs, radius);

  ScalarPlane a(w, h), b(w, h);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double var = mean_gg[i] - mean_g[i] * mean_g[i];
    const double cov = mean_gs[i] - mean_g[i] * mean_s[i];
    const double denom = var + eps;
    a[i] = denom > 0.0 ? cov / denom : 0.0;
    b[i] = mean_s[i] - a[i] * mean_g[i];
  }
  const ScalarPlane mean_a = box_mean(a, radius);
  const ScalarPlane mean_b = box_mean(b, radius);
  ScalarPlane out(w, h);
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = mean_a[i] * guide[i] + mean_b[i];
  return out;
}

StylizeResult stylize(const LabPlane& lab_in, const LabPlane& lab_ref, const SuperpixelLabelMap& labels_in,
                      const SuperpixelLabelMap& labels_ref, const CorrespondenceTable& table,
                      const ScalarPlane& guide, const TransferOptions& options) {
  if (labels_in.dims() != lab_in.dims() || labels_ref.dims() != lab_ref.dims() || guide.dims() != lab_in.dims())
    throw ValidationError("stylize: dimension mismatch");
  if (labels_in.uncovered_count() != 0 || labels_ref.uncovered_count() != 0)
    throw ValidationError("stylize: label maps must cover every pixel");
  if (!table.resolves_all(labels_in.count())) throw ValidationError("stylize: correspondence table is incomplete");

  const auto in_members = labels_in.members();
  const auto ref_members = labels_ref.members();
  std::vector<ChannelStats> ref_stats(ref_members.size());
  for (std::size_t j = 0; j < ref_members.size(); ++j) ref_stats[j] = compute_stats(lab_ref, ref_members[j]);

  StylizeResult out{lab_in, lab_in};
  for (std::size_t i = 0; i < in_members.size(); ++i) {
    const int ref = table.resolve(static_cast<int>(i));
    if (ref < 0 || ref >= labels_ref.count()) throw ValidationError("stylize: correspondence to unknown superpixel");
    transfer_region(out.transferred, in_members[i], compute_stats(lab_in, in_members[i]),
                    ref_stats[static_cast<std::size_t>(ref)], options.sigma_floor);
  }
  if (!options.smooth) {
    out.styled = out.transferred;
    return out;
  }

  ScalarPlane delta(lab_in.width(), lab_in.height());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < lab_in.size(); ++p) delta[p] = out.transferred[p][c] - lab_in[p][c];
    const ScalarPlane smoothed = guided_filter(guide, delta, options.guided_radius, options.guided_eps);
    for (std::size_t p = 0; p < lab_in.size(); ++p) out.styled[p][c] = lab_in[p][c] + smoothed[p];
  }
  return out;
}

}  // namespace photostyle
