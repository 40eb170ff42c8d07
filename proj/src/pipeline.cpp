#include "photostyle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "photostyle/color.hpp"
#include "photostyle/error.hpp"

namespace photostyle {

void PipelineConfig::validate() const {
  weights.validate();
  if (!(match_fraction > 0.0 && match_fraction <= 1.0)) throw ValidationError("match_fraction must lie in (0,1]");
  if (patch_side < 3 || patch_side % 2 == 0) throw ValidationError("patch_side must be odd and at least 3");
  if (t_cluster && !(*t_cluster >= 0.0)) throw ValidationError("t_cluster must be non-negative");
  if (target_superpixel_area < 1) throw ValidationError("target_superpixel_area must be at least 1");
  if (stride < 0) throw ValidationError("stride must be non-negative");
  if (!(epsilon_edge >= 0.0 && epsilon_edge <= 1.0)) throw ValidationError("epsilon_edge must lie in [0,1]");
  if (guided_radius < 0) throw ValidationError("guided_radius must be non-negative");
  if (!(guided_eps >= 0.0)) throw ValidationError("guided_eps must be non-negative");
  if (!(sigma_floor > 0.0)) throw ValidationError("sigma_floor must be positive");
  if (!(log_floor > 0.0)) throw ValidationError("log_floor must be positive");
  if (feature_toggles.empty()) throw ValidationError("feature_toggles must not be empty");
}

FeatureWeights PipelineConfig::effective_weights() const {
  FeatureWeights w = weights;
  w.terms = FeatureTerms::from_toggles(feature_toggles);
  return w;
}

void RunReport::write(std::ostream& out) const {
  for (const auto& t : timings) out << "stage." << t.stage << "_ms: " << t.milliseconds << '\n';
  out << "matches_loaded: " << matches_loaded << '\n'
      << "matches_kept: " << matches_kept << '\n';
  const auto precision = out.precision(17);
  out << "t_cluster: " << t_cluster << '\n';
  out.precision(precision);
  out << "seed_superpixels_input: " << seed_superpixels_input << '\n'
      << "seed_superpixels_reference: " << seed_superpixels_reference << '\n'
      << "partition_skipped: " << (partition_skipped ? "true" : "false") << '\n'
      << "partition_clusters: " << partition_clusters << '\n'
      << "graph_x_nodes: " << graph_x_nodes << '\n'
      << "graph_y_nodes: " << graph_y_nodes << '\n'
      << "graph_edges: " << graph_edges << '\n'
      << "svd_restarts: " << svd_restarts << '\n'
      << "input_superpixels: " << input_superpixels << '\n'
      << "reference_superpixels: " << reference_superpixels << '\n'
      << "matched_pairs: " << matched_pairs << '\n'
      << "fallback_count: " << fallback_count << '\n';
}

namespace {

class StageClock {
 public:
  explicit StageClock(RunReport& report) : report_(report) {}

  template <typename F>
  auto operator()(const std::string& stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      RunReport& report;
      const std::string& stage;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
        report.timings.push_back({stage, ms.count()});
      }
    } record{report_, stage, start};
    try {
      return body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }

 private:
  RunReport& report_;
};

// SplitMix64 finaliser, to derive independent sub-seeds from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Attaches every uncovered pixel to the seed superpixel of its nearest matched point.
void attach_to_nearest_seed(SuperpixelLabelMap& labels, const SuperpixelLabelMap& seeds, const PixelFeatureBank& bank,
                            const MatchedPointSet& matches, Side side, const std::vector<std::size_t>& pixels) {
  for (std::size_t i : pixels) {
    const PixelLoc q = matches.loc(static_cast<std::size_t>(bank.nearest_match(i)), side);
    labels.assign(i, seeds.label(q));
  }
}

std::vector<std::size_t> uncovered_pixels(const SuperpixelLabelMap& labels) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.pixel_count(); ++i)
    if (!labels.covered(i)) out.push_back(i);
  return out;
}

// Unsampled uncovered pixels inherit the label of the sampled pixel nearest in
// style-free feature distance, searching pixels with the same nearest matched
// point first.
void inherit_from_samples(SuperpixelLabelMap& labels, const PixelFeatureBank& bank,
                          const std::vector<std::size_t>& sampled, const FeatureWeights& weights) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i : sampled) groups[bank.nearest_match(i)].push_back(i);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    if (labels.covered(i)) continue;
    const auto it = groups.find(bank.nearest_match(i));
    const std::vector<std::size_t>& candidates = it != groups.end() ? it->second : sampled;
    std::size_t best = candidates.front();
    double best_d = std::numeric_limits<double>::infinity();
    const StyleFreeView f = bank.style_free(i);
    for (std::size_t c : candidates) {
      const double d = affinity_exponent(f, bank.style_free(c), weights);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels.assign(i, labels.label(best));
  }
}

struct PartitionOutcome {
  int clusters = 0;
  bool skipped = false;
  std::size_t x_nodes = 0, y_nodes = 0, edges = 0;
  int svd_restarts = 0;
  BipartiteAffinity graph;
};

PartitionOutcome partition_uncovered(SuperpixelLabelMap& labels_in, SuperpixelLabelMap& labels_ref,
                                     const SuperpixelLabelMap& seeds_in, const SuperpixelLabelMap& seeds_ref,
                                     const PixelFeatureBank& bank_in, const PixelFeatureBank& bank_ref,
                                     const MatchedPointSet& matches, const FeatureWeights& weights,
                                     const PipelineConfig& config) {
  PartitionOutcome out;
  const auto uncovered_in = uncovered_pixels(labels_in);
  const auto uncovered_ref = uncovered_pixels(labels_ref);
  const int stride_in = config.stride > 0 ? config.stride : auto_stride(uncovered_in.size());
  const int stride_ref = config.stride > 0 ? config.stride : auto_stride(uncovered_ref.size());

  const PixelGraph pg = build_pixel_graph(bank_in, bank_ref, labels_in, labels_ref, weights, stride_in, stride_ref);
  out.x_nodes = pg.x_pixels.size();
  out.y_nodes = pg.y_pixels.size();
  out.edges = pg.graph.edges().size();
  out.graph = pg.graph;

  std::vector<int> kept_x, kept_y;
  const BipartiteAffinity reduced = pg.graph.without_isolated(kept_x, kept_y);
  if (pg.degenerate || reduced.n_x() == 0 || reduced.n_y() == 0) {
    out.skipped = true;
    attach_to_nearest_seed(labels_in, seeds_in, bank_in, matches, Side::input, uncovered_in);
    attach_to_nearest_seed(labels_ref, seeds_ref, bank_ref, matches, Side::reference, uncovered_ref);
    return out;
  }

  const int k = choose_k(uncovered_in.size(), config.target_superpixel_area);
  const CoClustering cc = co_cluster(reduced, k, derive_seed(config.rng_seed, 3));
  out.clusters = cc.k;
  out.svd_restarts = cc.svd_restarts;

  std::vector<int> in_id(static_cast<std::size_t>(cc.k), -1), ref_id(static_cast<std::size_t>(cc.k), -1);
  for (std::size_t n = 0; n < kept_x.size(); ++n) {
    const auto c = static_cast<std::size_t>(cc.x_labels[n]);
    if (in_id[c] < 0) in_id[c] = -2;  // mark non-empty
  }
  for (std::size_t n = 0; n < kept_y.size(); ++n) {
    const auto c = static_cast<std::size_t>(cc.y_labels[n]);
    if (ref_id[c] < 0) ref_id[c] = -2;
  }
  for (int c = 0; c < cc.k; ++c) {
    if (in_id[static_cast<std::size_t>(c)] == -2)
      in_id[static_cast<std::size_t>(c)] = labels_in.add_superpixel({OriginKind::partition, c});
    if (ref_id[static_cast<std::size_t>(c)] == -2)
      ref_id[static_cast<std::size_t>(c)] = labels_ref.add_superpixel({OriginKind::partition, c});
  }
  for (std::size_t n = 0; n < kept_x.size(); ++n)
    labels_in.assign(pg.x_pixels[static_cast<std::size_t>(kept_x[n])], in_id[static_cast<std::size_t>(cc.x_labels[n])]);
  for (std::size_t n = 0; n < kept_y.size(); ++n)
    labels_ref.assign(pg.y_pixels[static_cast<std::size_t>(kept_y[n])], ref_id[static_cast<std::size_t>(cc.y_labels[n])]);

  // Isolated nodes join the seed of their nearest matched point.
  std::vector<std::size_t> isolated_in, isolated_ref;
  for (int i = 0; i < pg.graph.n_x(); ++i)
    if (pg.graph.isolated_x(i)) isolated_in.push_back(pg.x_pixels[static_cast<std::size_t>(i)]);
  for (int j = 0; j < pg.graph.n_y(); ++j)
    if (pg.graph.isolated_y(j)) isolated_ref.push_back(pg.y_pixels[static_cast<std::size_t>(j)]);
  attach_to_nearest_seed(labels_in, seeds_in, bank_in, matches, Side::input, isolated_in);
  attach_to_nearest_seed(labels_ref, seeds_ref, bank_ref, matches, Side::reference, isolated_ref);

  inherit_from_samples(labels_in, bank_in, pg.x_pixels, weights);
  inherit_from_samples(labels_ref, bank_ref, pg.y_pixels, weights);
  return out;
}

}  // namespace

CorrespondenceTable provisional_correspondence(const SuperpixelLabelMap& labels_in,
                                               const SuperpixelLabelMap& labels_ref, const MatchedPointSet& matches,
                                               const Eigen::MatrixXd& exponent) {
  std::map<int, int> ref_partition;
  for (int j = 0; j < labels_ref.count(); ++j)
    if (labels_ref.origin(j).kind == OriginKind::partition) ref_partition.emplace(labels_ref.origin(j).index, j);

  CorrespondenceTable table;
  std::vector<bool> taken(static_cast<std::size_t>(labels_ref.count()), false);
  table.assignment.assign(static_cast<std::size_t>(labels_in.count()), -1);
  for (int i = 0; i < labels_in.count(); ++i) {
    const SuperpixelOrigin& o = labels_in.origin(i);
    int ref = -1;
    if (o.kind == OriginKind::seed) {
      ref = labels_ref.label(matches.loc(static_cast<std::size_t>(o.index), Side::reference));
    } else if (auto it = ref_partition.find(o.index); it != ref_partition.end()) {
      ref = it->second;
    }
    if (ref >= 0 && !taken[static_cast<std::size_t>(ref)]) {
      taken[static_cast<std::size_t>(ref)] = true;
      table.pairs.emplace(i, ref);
      table.assignment[static_cast<std::size_t>(i)] = ref;
      continue;
    }
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < exponent.cols(); ++c)
      if (exponent(i, c) < exponent(i, best)) best = c;
    table.fallback.emplace(i, static_cast<int>(best));
  }
  return table;
}

RunResult run(const ImagePlane& input, const ImagePlane& reference, const MatchedPointSet& all_matches,
              const PipelineConfig& config, StopAfter stop_after) {
  RunResult result;
  RunReport& report = result.report;
  Intermediates& inter = result.intermediates;
  StageClock stage(report);

  stage("config", [&] {
    config.validate();
    input.validate();
    reference.validate();
    if (all_matches.input_dims() != input.dims() || all_matches.ref_dims() != reference.dims())
      throw ValidationError("match dimensions do not match the images");
    return 0;
  });
  const FeatureWeights weights = config.effective_weights();

  report.matches_loaded = all_matches.size();
  const MatchedPointSet matches = stage("filter", [&] { return filter_top_fraction(all_matches, config.match_fraction); });
  report.matches_kept = matches.size();

  PixelFeatureBank bank_in = stage("features", [&] {
    return build_feature_bank(input, matches, Side::input, weights, config.patch_side);
  });
  PixelFeatureBank bank_ref = stage("features_reference", [&] {
    return build_feature_bank(reference, matches, Side::reference, weights, config.patch_side);
  });

  stage("seeds", [&] {
    report.t_cluster = config.t_cluster ? *config.t_cluster
                                        : auto_seed_threshold(bank_in, bank_ref, matches, weights,
                                                              {0.6, 1000, derive_seed(config.rng_seed, 1)});
    inter.seeds_input = grow_seeds(bank_in, matches, Side::input, weights, report.t_cluster,
                                   default_seed_window(bank_in.dims(), matches.size()));
    inter.seeds_reference = grow_seeds(bank_ref, matches, Side::reference, weights, report.t_cluster,
                                       default_seed_window(bank_ref.dims(), matches.size()));
    report.seed_superpixels_input = inter.seeds_input.count();
    report.seed_superpixels_reference = inter.seeds_reference.count();
    return 0;
  });

  inter.labels_input = inter.seeds_input;
  inter.labels_reference = inter.seeds_reference;
  stage("partition", [&] {
    if (stop_after == StopAfter::seeds) {
      report.partition_skipped = true;
      attach_to_nearest_seed(inter.labels_input, inter.seeds_input, bank_in, matches, Side::input,
                             uncovered_pixels(inter.labels_input));
      attach_to_nearest_seed(inter.labels_reference, inter.seeds_reference, bank_ref, matches, Side::reference,
                             uncovered_pixels(inter.labels_reference));
      return 0;
    }
    PartitionOutcome p = partition_uncovered(inter.labels_input, inter.labels_reference, inter.seeds_input,
                                             inter.seeds_reference, bank_in, bank_ref, matches, weights, config);
    report.partition_clusters = p.clusters;
    report.partition_skipped = p.skipped;
    report.graph_x_nodes = p.x_nodes;
    report.graph_y_nodes = p.y_nodes;
    report.graph_edges = p.edges;
    report.svd_restarts = p.svd_restarts;
    inter.pixel_graph = std::move(p.graph);
    inter.labels_input.validate();
    inter.labels_reference.validate();
    return 0;
  });
  report.input_superpixels = inter.labels_input.count();
  report.reference_superpixels = inter.labels_reference.count();

  stage("match", [&] {
    inter.lab_input = rgb_to_lab(input, config.log_floor);
    inter.lab_reference = rgb_to_lab(reference, config.log_floor);
    const auto desc_in = aggregate_superpixels(bank_in, inter.labels_input, inter.lab_input, Side::input);
    const auto desc_ref = aggregate_superpixels(bank_ref, inter.labels_reference, inter.lab_reference, Side::reference);
    const AffinityMatrix aff = superpixel_affinities(desc_in, desc_ref, weights);
    inter.affinity = aff.affinity;
    if (stop_after == StopAfter::seeds || stop_after == StopAfter::partition) {
      inter.table = provisional_correspondence(inter.labels_input, inter.labels_reference, matches, aff.exponent);
    } else {
      inter.table = hungarian_match(aff.affinity, config.epsilon_edge, &aff.exponent);
    }
    report.matched_pairs = static_cast<int>(inter.table.pairs.size());
    report.fallback_count = static_cast<int>(inter.table.fallback.size());
    return 0;
  });

  stage("transfer", [&] {
    TransferOptions opts;
    opts.sigma_floor = config.sigma_floor;
    opts.guided_radius = config.guided_radius;
    opts.guided_eps = config.guided_eps;
    opts.smooth = stop_after != StopAfter::match;
    StylizeResult s = stylize(inter.lab_input, inter.lab_reference, inter.labels_input, inter.labels_reference,
                              inter.table, bank_in.intensity(), opts);
    inter.transferred = std::move(s.transferred);
    result.styled_lab = std::move(s.styled);
    result.styled = lab_to_rgb(result.styled_lab);
    return 0;
  });
  return result;
}

RunResult run(const ImagePlane& input, const ImagePlane& reference, std::istream& matches_text,
              const PipelineConfig& config, StopAfter stop_after) {
  std::optional<MatchedPointSet> matches;
  try {
    matches.emplace(load_matches(matches_text, input.dims(), reference.dims()));
  } catch (const std::exception& e) {
    throw StageError("matches", e.what());
  }
  return run(input, reference, *matches, config, stop_after);
}

}  // namespace photostyle
