#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "photostyle/color.hpp"
#include "photostyle/error.hpp"
#include "photostyle/image_io.hpp"
#include "photostyle/pipeline.hpp"

namespace ps = photostyle;

namespace {

const ps::testing::TwoRegionPair& fixture() {
  static const auto f = ps::testing::make_two_region_pair();
  return f;
}

ps::MatchedPointSet fixture_matches() {
  const auto& f = fixture();
  return ps::MatchedPointSet(f.matches, f.input.dims(), f.reference.dims());
}

ps::MatchedPointSet photo_selfmatches(const ps::ImagePlane& photo) {
  std::ifstream in(ps::testing::photo_selfmatch_path());
  return ps::load_matches(in, photo.dims(), photo.dims());
}

void expect_consistent(const ps::RunResult& r) {
  const auto& rep = r.report;
  EXPECT_EQ(rep.matched_pairs + rep.fallback_count, rep.input_superpixels);
  EXPECT_EQ(rep.input_superpixels, r.intermediates.labels_input.count());
  EXPECT_EQ(rep.reference_superpixels, r.intermediates.labels_reference.count());
  EXPECT_EQ(r.intermediates.labels_input.uncovered_count(), 0u);
  EXPECT_EQ(r.intermediates.labels_reference.uncovered_count(), 0u);
  EXPECT_TRUE(r.intermediates.table.resolves_all(rep.input_superpixels));
  EXPECT_EQ(r.styled.dims(), r.intermediates.lab_input.dims());
  for (const auto& px : r.styled.data())
    for (double v : px) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
}

}  // namespace

TEST(Config, DefaultsValidateAndDomainsAreChecked) {
  ps::PipelineConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = [](auto mutate) {
    ps::PipelineConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ps::ValidationError);
  };
  bad([](auto& c) { c.match_fraction = 0.0; });
  bad([](auto& c) { c.match_fraction = 1.5; });
  bad([](auto& c) { c.patch_side = 4; });
  bad([](auto& c) { c.t_cluster = -1.0; });
  bad([](auto& c) { c.target_superpixel_area = 0; });
  bad([](auto& c) { c.stride = -1; });
  bad([](auto& c) { c.epsilon_edge = 2.0; });
  bad([](auto& c) { c.guided_radius = -1; });
  bad([](auto& c) { c.guided_eps = -1e-3; });
  bad([](auto& c) { c.sigma_floor = 0.0; });
  bad([](auto& c) { c.log_floor = 0.0; });
  bad([](auto& c) { c.feature_toggles.clear(); });
  bad([](auto& c) { c.weights.n_beta = 0.0; });
}

TEST(Run, SyntheticPairTakesReferenceRegionStats) {
  const auto& f = fixture();
  const auto r = ps::run(f.input, f.reference, fixture_matches(), {});
  expect_consistent(r);
  const auto ref_lab = ps::rgb_to_lab(f.reference);
  for (std::uint8_t k = 0; k < 2; ++k) {
    std::vector<std::size_t> in_px, ref_px;
    for (std::size_t i = 0; i < f.region.size(); ++i) {
      if (f.region[i] == k) in_px.push_back(i);
      if (f.region_ref[i] == k) ref_px.push_back(i);
    }
    const auto got = ps::compute_stats(r.intermediates.transferred, in_px);
    const auto want = ps::compute_stats(ref_lab, ref_px);
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(got.mean[c], want.mean[c], 0.02 * std::abs(want.mean[c]));
      EXPECT_NEAR(got.stddev[c], want.stddev[c], 0.02 * want.stddev[c]);
    }
  }
}

TEST(Run, PhotoSelfTransferIsNearIdentity) {
  const ps::ImagePlane photo = ps::testing::load_photo_fixture();
  const auto r = ps::run(photo, photo, photo_selfmatches(photo), {});
  expect_consistent(r);
  double mae = 0;
  for (std::size_t i = 0; i < photo.size(); ++i)
    for (int c = 0; c < 3; ++c) mae += std::abs(r.styled[i][c] - photo[i][c]);
  EXPECT_LE(mae / (3.0 * static_cast<double>(photo.size())), 0.01);
}

TEST(Run, IsBitDeterministic) {
  const auto& f = fixture();
  const auto a = ps::run(f.input, f.reference, fixture_matches(), {});
  const auto b = ps::run(f.input, f.reference, fixture_matches(), {});
  EXPECT_EQ(a.styled, b.styled);
  EXPECT_EQ(a.intermediates.labels_input.labels(), b.intermediates.labels_input.labels());
  EXPECT_EQ(a.report.t_cluster, b.report.t_cluster);
}

TEST(Run, EveryStageIsTimed) {
  const auto& f = fixture();
  const auto r = ps::run(f.input, f.reference, fixture_matches(), {});
  std::vector<std::string> names;
  for (const auto& t : r.report.timings) names.push_back(t.stage);
  EXPECT_EQ(names, (std::vector<std::string>{"config", "filter", "features", "features_reference", "seeds",
                                             "partition", "match", "transfer"}));
  std::ostringstream out;
  r.report.write(out);
  EXPECT_NE(out.str().find("stage.transfer_ms: "), std::string::npos);
  EXPECT_NE(out.str().find("matches_kept: 9\n"), std::string::npos);
}

TEST(Run, TooFewKeptMatchesIsFilterStageError) {
  const auto& f = fixture();
  ps::PipelineConfig c;
  c.match_fraction = 0.3;
  try {
    ps::run(f.input, f.reference, fixture_matches(), c);
    FAIL() << "expected StageError";
  } catch (const ps::StageError& e) {
    EXPECT_EQ(e.stage(), "filter");
    EXPECT_NE(std::string(e.what()).find("insufficient matches"), std::string::npos);
  }
}

TEST(Run, MatchTextErrorsAreMatchesStageErrors) {
  const auto& f = fixture();
  std::istringstream text("1 2 3\n");
  try {
    ps::run(f.input, f.reference, text, {});
    FAIL() << "expected StageError";
  } catch (const ps::StageError& e) {
    EXPECT_EQ(e.stage(), "matches");
  }
}

TEST(Run, InvalidConfigIsConfigStageError) {
  const auto& f = fixture();
  ps::PipelineConfig c;
  c.guided_eps = -1;
  try {
    ps::run(f.input, f.reference, fixture_matches(), c);
    FAIL() << "expected StageError";
  } catch (const ps::StageError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
}

TEST(Run, EverySingleToggleRuns) {
  const auto& f = fixture();
  for (ps::FeatureToggle t : ps::all_feature_toggles()) {
    ps::PipelineConfig c;
    c.feature_toggles = {t};
    const auto r = ps::run(f.input, f.reference, fixture_matches(), c);
    expect_consistent(r);
  }
}

TEST(Run, StopAfterModes) {
  const auto& f = fixture();
  const auto seeds = ps::run(f.input, f.reference, fixture_matches(), {}, ps::StopAfter::seeds);
  expect_consistent(seeds);
  EXPECT_TRUE(seeds.report.partition_skipped);
  for (int id = 0; id < seeds.intermediates.labels_input.count(); ++id)
    EXPECT_EQ(seeds.intermediates.labels_input.origin(id).kind, ps::OriginKind::seed);

  const auto partition = ps::run(f.input, f.reference, fixture_matches(), {}, ps::StopAfter::partition);
  expect_consistent(partition);
  const auto full = ps::run(f.input, f.reference, fixture_matches(), {});
  EXPECT_EQ(partition.intermediates.labels_input.labels(), full.intermediates.labels_input.labels());

  const auto match = ps::run(f.input, f.reference, fixture_matches(), {}, ps::StopAfter::match);
  expect_consistent(match);
  EXPECT_EQ(match.styled_lab, match.intermediates.transferred);
  EXPECT_EQ(match.intermediates.table.pairs, full.intermediates.table.pairs);
}

TEST(Run, FixedThresholdIsUsedVerbatim) {
  const auto& f = fixture();
  ps::PipelineConfig c;
  c.t_cluster = 0.0;
  const auto r = ps::run(f.input, f.reference, fixture_matches(), c);
  EXPECT_EQ(r.report.t_cluster, 0.0);
  EXPECT_EQ(r.intermediates.seeds_input.uncovered_count(), f.input.size() - r.report.matches_kept);
  expect_consistent(r);
}

TEST(Provisional, SeedsPairByMatchAndClustersByIndex) {
  const ps::Dims d{2, 4};
  std::vector<ps::Match> e;
  for (int c = 0; c < 4; ++c) e.push_back({{0, c}, {0, 3 - c}, 1.0});
  e.push_back({{1, 0}, {1, 1}, 1.0});
  const ps::MatchedPointSet set(e, d, d);

  ps::SuperpixelLabelMap in(d), ref(d);
  for (int m = 0; m < 4; ++m) in.add_superpixel({ps::OriginKind::seed, m});
  for (int m = 3; m >= 0; --m) ref.add_superpixel({ps::OriginKind::seed, m});
  in.add_superpixel({ps::OriginKind::partition, 0});
  in.add_superpixel({ps::OriginKind::partition, 1});
  ref.add_superpixel({ps::OriginKind::partition, 1});
  for (int c = 0; c < 4; ++c) {
    in.assign(static_cast<std::size_t>(c), c);
    ref.assign(static_cast<std::size_t>(3 - c), 3 - c);
  }
  in.assign(4, 4);
  for (std::size_t i = 5; i < 8; ++i) in.assign(i, 5);
  for (std::size_t i = 4; i < 8; ++i) ref.assign(i, 4);

  Eigen::MatrixXd exponent = Eigen::MatrixXd::Constant(6, 5, 10.0);
  exponent(4, 2) = 1.0;
  const auto t = ps::provisional_correspondence(in, ref, set, exponent);
  // Input seed m sits at column m; the reference pixel of match m is column 3 - m.
  for (int m = 0; m < 4; ++m) EXPECT_EQ(t.pairs.at(m), ref.label(ps::PixelLoc{0, 3 - m}));
  EXPECT_EQ(t.pairs.at(5), 4);
  EXPECT_EQ(t.fallback.at(4), 2);
  EXPECT_TRUE(t.resolves_all(6));
}
