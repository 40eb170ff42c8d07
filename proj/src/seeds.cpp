#include "photostyle/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "photostyle/error.hpp"

namespace photostyle {

std::size_t SuperpixelLabelMap::uncovered_count() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), kUncovered));
}

int SuperpixelLabelMap::add_superpixel(SuperpixelOrigin origin) {
  origins_.push_back(origin);
  return static_cast<int>(origins_.size()) - 1;
}

std::vector<std::vector<std::size_t>> SuperpixelLabelMap::members() const {
  std::vector<std::vector<std::size_t>> out(origins_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] != kUncovered) out[static_cast<std::size_t>(labels_[i])].push_back(i);
  return out;
}

void SuperpixelLabelMap::validate() const {
  std::vector<std::size_t> sizes(origins_.size(), 0);
  for (int l : labels_) {
    if (l == kUncovered) continue;
    if (l < 0 || l >= count()) throw ValidationError("superpixel label out of range");
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (std::size_t s : sizes)
    if (s == 0) throw ValidationError("superpixel with no pixels");
}

namespace {

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double seed_distance_idx(const PixelFeatureBank& bank, std::size_t p, std::size_t q, const FeatureWeights& w) {
  double d = 0.0;
  if (w.terms.M) d += sum_sq_diff(bank.M(p), bank.M(q)) * w.inv_M();
  if (w.terms.T) d += sum_sq_diff(bank.T(p), bank.T(q)) * w.inv_T();
  if (w.terms.C) d += sum_sq_diff(bank.C(p), bank.C(q)) * w.inv_C();
  if (w.terms.DV) d += sum_sq_diff(bank.DV(p), bank.DV(q)) * w.inv_DV();
  if (w.terms.La) d += sum_sq_diff(bank.La(p), bank.La(q)) * w.inv_La();
  return d;
}

inline bool in_window(PixelLoc a, PixelLoc b, int radius) {
  return std::abs(a.row - b.row) <= radius && std::abs(a.col - b.col) <= radius;
}

}  // namespace

double seed_distance(const PixelFeatureBank& bank, PixelLoc pixel, PixelLoc match, const FeatureWeights& weights) {
  if (!bank.dims().contains(pixel) || !bank.dims().contains(match))
    throw ValidationError("seed_distance location out of bounds");
  return seed_distance_idx(bank, bank.index(pixel), bank.index(match), weights);
}

int default_seed_window(Dims dims, std::size_t match_count) {
  const double diag = std::hypot(static_cast<double>(dims.height), static_cast<double>(dims.width));
  const double n = static_cast<double>(std::max<std::size_t>(match_count, 1));
  return 2 * static_cast<int>(std::ceil(diag / std::sqrt(n)));
}

std::vector<double> sampled_seed_distances(const PixelFeatureBank& bank, const MatchedPointSet& matches, Side side,
                                           const FeatureWeights& weights, int window_radius,
                                           const SeedThresholdSampling& sampling) {
  const std::size_t n = bank.pixel_count();
  std::mt19937_64 rng(sampling.rng_seed);
  std::vector<double> mins;
  mins.reserve(sampling.samples);
  for (std::size_t s = 0; s < sampling.samples; ++s) {
    const std::size_t i = static_cast<std::size_t>(rng() % n);
    const PixelLoc p = bank.loc(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < matches.size(); ++m) {
      const PixelLoc q = matches.loc(m, side);
      if (in_window(p, q, window_radius)) best = std::min(best, seed_distance_idx(bank, i, bank.index(q), weights));
    }
    if (std::isfinite(best)) mins.push_back(best);
  }
  return mins;
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

double auto_seed_threshold(const PixelFeatureBank& bank, const MatchedPointSet& matches, Side side,
                           const FeatureWeights& weights, int window_radius, const SeedThresholdSampling& sampling) {
  return nearest_rank_percentile(sampled_seed_distances(bank, matches, side, weights, window_radius, sampling),
                                 sampling.percentile);
}

double auto_seed_threshold(const PixelFeatureBank& bank_in, const PixelFeatureBank& bank_ref,
                           const MatchedPointSet& matches, const FeatureWeights& weights,
                           const SeedThresholdSampling& sampling) {
  std::vector<double> pooled = sampled_seed_distances(
      bank_in, matches, Side::input, weights, default_seed_window(bank_in.dims(), matches.size()), sampling);
  const std::vector<double> ref = sampled_seed_distances(
      bank_ref, matches, Side::reference, weights, default_seed_window(bank_ref.dims(), matches.size()), sampling);
  pooled.insert(pooled.end(), ref.begin(), ref.end());
  return nearest_rank_percentile(std::move(pooled), sampling.percentile);
}

SuperpixelLabelMap grow_seeds(const PixelFeatureBank& bank, const MatchedPointSet& matches, Side side,
                              const FeatureWeights& weights, double t_cluster, int window_radius) {
  if (matches.size() == 0) throw ValidationError("grow_seeds needs at least one matched point");
  if (!(t_cluster >= 0.0)) throw ValidationError("t_cluster must be non-negative");
  if (window_radius < 0) throw ValidationError("seed window radius must be non-negative");

  const Dims dims = bank.dims();
  const std::size_t n = bank.pixel_count();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> owner(n, -1);

  for (std::size_t m = 0; m < matches.size(); ++m) {
    const PixelLoc q = matches.loc(m, side);
    const std::size_t qi = bank.index(q);
    const int r0 = std::max(0, q.row - window_radius), r1 = std::min(dims.height - 1, q.row + window_radius);
    const int c0 = std::max(0, q.col - window_radius), c1 = std::min(dims.width - 1, q.col + window_radius);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const std::size_t pi = static_cast<std::size_t>(r) * dims.width + c;
        const double d = seed_distance_idx(bank, pi, qi, weights);
        // Matches are visited in ascending id, so strict < keeps the lower id on ties.
        if (d <= t_cluster && d < best[pi]) {
          best[pi] = d;
          owner[pi] = static_cast<int>(m);
        }
      }
    }
  }
  // A matched pixel belongs to its own (lowest-id) matched point.
  std::vector<bool> pinned(n, false);
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const std::size_t qi = bank.index(matches.loc(m, side));
    if (!pinned[qi]) {
      owner[qi] = static_cast<int>(m);
      pinned[qi] = true;
    }
  }

  std::vector<int> seed_of_match(matches.size(), kUncovered);
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] >= 0) seed_of_match[static_cast<std::size_t>(owner[i])] = 0;

  SuperpixelLabelMap map(dims);
  for (std::size_t m = 0; m < matches.size(); ++m)
    if (seed_of_match[m] == 0) seed_of_match[m] = map.add_superpixel({OriginKind::seed, static_cast<int>(m)});
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] >= 0) map.assign(i, seed_of_match[static_cast<std::size_t>(owner[i])]);
  return map;
}

}  // namespace photostyle
