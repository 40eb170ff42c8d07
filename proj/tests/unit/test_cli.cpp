#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "photostyle/cli.hpp"
#include "photostyle/error.hpp"
#include "photostyle/image_io.hpp"

namespace ps = photostyle;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("photostyle_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const auto f = ps::testing::make_two_region_pair();
    ps::write_png(path("in.png"), f.input);
    ps::write_png(path("ref.png"), f.reference);
    std::ofstream(path("matches.txt")) << ps::testing::match_text(f.matches);
    match_count_ = f.matches.size();
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "photostyle");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return ps::run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::vector<std::string> base_args(const std::string& output = "out.png") const {
    return {"--input", path("in.png"), "--reference", path("ref.png"), "--matches", path("matches.txt"),
            "--output", path(output)};
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::size_t match_count_ = 0;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, HappyPathWritesOutputAndReport) {
  ASSERT_EQ(invoke(base_args()), 0) << err_.str();
  EXPECT_TRUE(fs::exists(path("out.png")));
  for (const char* stage : {"config", "filter", "features", "features_reference", "seeds", "partition", "match",
                            "transfer"})
    EXPECT_NE(out_.str().find(std::string("stage.") + stage + "_ms: "), std::string::npos) << stage;
  const ps::ImagePlane out = ps::read_image(path("out.png"));
  EXPECT_EQ(out.dims(), (ps::Dims{64, 96}));
}

TEST_F(CliTest, MissingMatchesFile) {
  auto args = base_args();
  args[5] = path("nope.txt");
  EXPECT_EQ(invoke(args), 1);
  EXPECT_EQ(err_.str().rfind("matches:", 0), 0u) << err_.str();
  EXPECT_FALSE(fs::exists(path("out.png")));
}

TEST_F(CliTest, UnreadableAndUnsupportedImages) {
  auto args = base_args();
  args[1] = path("missing.png");
  EXPECT_EQ(invoke(args), 1);
  EXPECT_EQ(err_.str().rfind("input:", 0), 0u) << err_.str();

  std::ofstream(path("text.png")) << "not an image";
  args = base_args();
  args[3] = path("text.png");
  EXPECT_EQ(invoke(args), 1);
  EXPECT_EQ(err_.str().rfind("reference:", 0), 0u) << err_.str();
  EXPECT_NE(err_.str().find("unsupported"), std::string::npos);
}

TEST_F(CliTest, MatchFractionOverride) {
  auto args = base_args();
  args.insert(args.end(), {"--match-fraction", "0.7"});
  ASSERT_EQ(invoke(args), 0) << err_.str();
  const auto kept = static_cast<std::size_t>(std::ceil(0.7 * static_cast<double>(match_count_)));
  EXPECT_NE(out_.str().find("matches_kept: " + std::to_string(kept) + "\n"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find("matches_loaded: " + std::to_string(match_count_) + "\n"), std::string::npos);
}

TEST_F(CliTest, TooFewMatchesIsPipelineError) {
  auto args = base_args();
  args.insert(args.end(), {"--match-fraction", "0.3"});
  EXPECT_EQ(invoke(args), 1);
  EXPECT_EQ(err_.str().rfind("filter:", 0), 0u) << err_.str();
  EXPECT_FALSE(fs::exists(path("out.png")));
}

TEST_F(CliTest, ConfigErrors) {
  std::ofstream(path("bad.cfg")) << "match_fraction = 0.7\nbogus_key = 1\n";
  auto args = base_args();
  args.insert(args.end(), {"--config", path("bad.cfg")});
  EXPECT_EQ(invoke(args), 2);
  EXPECT_EQ(err_.str().rfind("config:", 0), 0u) << err_.str();
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);

  args = base_args();
  args.insert(args.end(), {"--lambda-t", "abc"});
  EXPECT_EQ(invoke(args), 2);
  EXPECT_EQ(err_.str().rfind("config:", 0), 0u);

  args = base_args();
  args.insert(args.end(), {"--features", "color,shape"});
  EXPECT_EQ(invoke(args), 2);

  args = base_args();
  args.insert(args.end(), {"--config", path("absent.cfg")});
  EXPECT_EQ(invoke(args), 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({"--input", path("in.png")}), 2);
  EXPECT_EQ(err_.str().rfind("usage:", 0), 0u);
  auto args = base_args();
  args.insert(args.end(), {"--stop-after", "transfer"});
  EXPECT_EQ(invoke(args), 2);
  args = base_args();
  args.insert(args.end(), {"--pre-scale", "-1"});
  EXPECT_EQ(invoke(args), 2);
  EXPECT_EQ(invoke({"--help"}), 0);
  EXPECT_NE(out_.str().find("--match-fraction"), std::string::npos);
}

TEST_F(CliTest, SameInvocationSameBytes) {
  ASSERT_EQ(invoke(base_args("a.png")), 0);
  ASSERT_EQ(invoke(base_args("b.png")), 0);
  EXPECT_EQ(slurp(path("a.png")), slurp(path("b.png")));
}

TEST_F(CliTest, IntermediatesAreWritten) {
  auto args = base_args("styled.png");
  args.push_back("--emit-intermediates");
  ASSERT_EQ(invoke(args), 0) << err_.str();
  for (const char* suffix : {".matches_input.png", ".matches_reference.png", ".seeds_input.png",
                             ".seeds_reference.png", ".labels_input.png", ".labels_reference.png", ".prefilter.png",
                             ".corr.txt", ".edges.txt"})
    EXPECT_TRUE(fs::exists(path(std::string("styled") + suffix))) << suffix;
  std::istringstream corr(slurp(path("styled.corr.txt")));
  int i, j;
  double a;
  ASSERT_TRUE(corr >> i >> j >> a);
  EXPECT_EQ(i, 0);
}

TEST_F(CliTest, StopAfterAndPreScale) {
  for (const char* mode : {"seeds", "partition", "match"}) {
    auto args = base_args();
    args.insert(args.end(), {"--stop-after", mode});
    EXPECT_EQ(invoke(args), 0) << mode << ": " << err_.str();
  }
  auto args = base_args();
  args.insert(args.end(), {"--pre-scale", "0.5"});
  ASSERT_EQ(invoke(args), 0) << err_.str();
  EXPECT_EQ(ps::read_image(path("out.png")).dims(), (ps::Dims{32, 48}));
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  std::ofstream(path("run.cfg")) << "# comment\nt_cluster = 1e9\nmatch_fraction = 1.0\n";
  auto args = base_args();
  args.insert(args.end(), {"--config", path("run.cfg"), "--match-fraction", "0.75"});
  ASSERT_EQ(invoke(args), 0) << err_.str();
  EXPECT_NE(out_.str().find("t_cluster: 1000000000\n"), std::string::npos);
  EXPECT_NE(out_.str().find("matches_kept: 9\n"), std::string::npos) << out_.str();
}

TEST(ConfigKeys, EveryFieldHasOneKeyAndOneFlag) {
  const auto& keys = ps::config_keys();
  EXPECT_EQ(keys.size(), 21u);
  std::set<std::string> k, f;
  for (const auto& c : keys) {
    EXPECT_TRUE(k.insert(c.key).second) << c.key;
    EXPECT_TRUE(f.insert(c.flag).second) << c.flag;
    EXPECT_EQ(c.flag.rfind("--", 0), 0u);
  }
  for (const char* required : {"--match-fraction", "--t-cluster", "--superpixel-area", "--seed", "--features"})
    EXPECT_TRUE(f.count(required)) << required;
}

TEST(ConfigKeys, EveryKeyChangesItsField) {
  const std::map<std::string, std::string> values{
      {"lambda_M", "0.2"},      {"lambda_T", "0.002"},      {"lambda_C", "0.0002"},    {"lambda_DV", "2e-6"},
      {"lambda_S", "0.2"},      {"lambda_La", "0.02"},      {"lambda_Lr", "0.03"},     {"n_alpha", "500"},
      {"n_beta", "1e5"},        {"match_fraction", "0.5"},  {"patch_side", "7"},       {"t_cluster", "12.5"},
      {"target_superpixel_area", "99"}, {"stride", "2"},    {"epsilon_edge", "0.01"},  {"guided_radius", "3"},
      {"guided_eps", "0.5"},    {"sigma_floor", "1e-3"},    {"log_floor", "1e-5"},     {"rng_seed", "77"},
      {"feature_toggles", "color,texture"}};
  ASSERT_EQ(values.size(), ps::config_keys().size());
  std::ostringstream text;
  for (const auto& c : ps::config_keys()) {
    ASSERT_TRUE(values.count(c.key)) << c.key;
    text << c.key << " = " << values.at(c.key) << '\n';
  }
  ps::PipelineConfig cfg;
  std::istringstream in(text.str());
  ps::apply_config_text(cfg, in);
  EXPECT_EQ(cfg.weights.lambda_M, 0.2);
  EXPECT_EQ(cfg.weights.lambda_T, 0.002);
  EXPECT_EQ(cfg.weights.lambda_C, 0.0002);
  EXPECT_EQ(cfg.weights.lambda_DV, 2e-6);
  EXPECT_EQ(cfg.weights.lambda_S, 0.2);
  EXPECT_EQ(cfg.weights.lambda_La, 0.02);
  EXPECT_EQ(cfg.weights.lambda_Lr, 0.03);
  EXPECT_EQ(cfg.weights.n_alpha, 500.0);
  EXPECT_EQ(cfg.weights.n_beta, 1e5);
  EXPECT_EQ(cfg.match_fraction, 0.5);
  EXPECT_EQ(cfg.patch_side, 7);
  EXPECT_EQ(cfg.t_cluster, 12.5);
  EXPECT_EQ(cfg.target_superpixel_area, 99u);
  EXPECT_EQ(cfg.stride, 2);
  EXPECT_EQ(cfg.epsilon_edge, 0.01);
  EXPECT_EQ(cfg.guided_radius, 3);
  EXPECT_EQ(cfg.guided_eps, 0.5);
  EXPECT_EQ(cfg.sigma_floor, 1e-3);
  EXPECT_EQ(cfg.log_floor, 1e-5);
  EXPECT_EQ(cfg.rng_seed, 77u);
  EXPECT_EQ(cfg.feature_toggles, (std::vector<ps::FeatureToggle>{ps::FeatureToggle::color, ps::FeatureToggle::texture}));
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ConfigKeys, ConfigTextErrors) {
  ps::PipelineConfig cfg;
  auto apply = [&](const std::string& s) {
    std::istringstream in(s);
    ps::apply_config_text(cfg, in);
  };
  EXPECT_THROW(apply("match_fraction 0.5\n"), ps::ParseError);
  EXPECT_THROW(apply("match_fraction = \n"), ps::ParseError);
  EXPECT_THROW(apply("stride = 1\nstride = 2\n"), ps::ParseError);
  EXPECT_THROW(apply("stride = 1.5\n"), ps::ParseError);
  EXPECT_THROW(apply("lambda_M = inf\n"), ps::ParseError);
  apply("t_cluster = auto\n");
  EXPECT_FALSE(cfg.t_cluster.has_value());
  EXPECT_THROW(ps::set_config_value(cfg, "nope", "1"), ps::ValidationError);
}

TEST(ImageIo, PngRoundTripIsExactOnByteValues) {
  ps::ImagePlane img(7, 5);
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) img[i][c] = static_cast<double>((i * 37 + c * 91) % 256) / 255.0;
  const auto p = (fs::temp_directory_path() / "photostyle_roundtrip.png").string();
  ps::write_png(p, img);
  const ps::ImagePlane back = ps::read_image(p);
  fs::remove(p);
  ASSERT_EQ(back.dims(), img.dims());
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(back[i][c], img[i][c]);
}

TEST(ImageIo, ErrorKinds) {
  try {
    ps::read_image("/nonexistent/dir/x.png");
    FAIL();
  } catch (const ps::ImageIoError& e) {
    EXPECT_EQ(e.kind(), ps::ImageIoError::Kind::unreadable);
  }
  const auto p = (fs::temp_directory_path() / "photostyle_corrupt.png").string();
  {
    std::ofstream out(p, std::ios::binary);
    const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char*>(sig), 8);
    out << "garbage";
  }
  try {
    ps::read_image(p);
    FAIL();
  } catch (const ps::ImageIoError& e) {
    EXPECT_EQ(e.kind(), ps::ImageIoError::Kind::corrupt);
  }
  fs::remove(p);
}

TEST(ImageIo, ResizeKeepsConstantsAndRejectsBadFactor) {
  const ps::ImagePlane img(10, 6, ps::Triple{0.2, 0.4, 0.6});
  const auto half = ps::resize_bilinear(img, 0.5);
  EXPECT_EQ(half.dims(), (ps::Dims{3, 5}));
  for (const auto& px : half.data()) EXPECT_NEAR(px[1], 0.4, 1e-15);
  EXPECT_THROW(ps::resize_bilinear(img, 0.0), ps::ValidationError);
}
