#include "fixtures.hpp"

#include <random>
#include <stdexcept>
#include <sstream>

#include "photostyle/color.hpp"
#include "photostyle/image_io.hpp"

#ifndef PHOTOSTYLE_TEST_DATA_DIR
#error "PHOTOSTYLE_TEST_DATA_DIR must be defined"
#endif

namespace photostyle::testing {

namespace {
constexpr Triple kTextureDirection{0.8, 0.5, 0.33};
}  // namespace

TwoRegionPair make_two_region_pair(int width, int height, std::uint64_t seed, double noise, int shift) {
  if (shift < 0 || shift > width / 8) throw std::invalid_argument("shift out of range");
  TwoRegionPair f;
  const Triple warm = rgb_to_lab(Triple{0.78, 0.50, 0.30});
  const Triple cool = rgb_to_lab(Triple{0.30, 0.50, 0.78});
  f.mean_in[0] = warm;
  f.mean_in[1] = cool;
  f.mean_ref[0] = cool;
  f.mean_ref[1] = warm;
  // Texture contrast stays low: the T feature's spread components grow with
  // contrast and would otherwise outweigh location.
  f.spread_in[0] = 0.0010 * noise;
  f.spread_in[1] = 0.0016 * noise;
  f.spread_ref[0] = 0.0020 * noise;
  f.spread_ref[1] = 0.0008 * noise;

  // The scene spans width + shift columns; the input shows columns
  // [0, width) and the reference the same scene moved right by `shift`.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int scene_width = width + shift;
  std::vector<double> texture(static_cast<std::size_t>(scene_width) * height);
  for (double& v : texture) v = normal(rng);
  const auto scene_region = [width](int x) { return x < width / 2 ? 0 : 1; };

  f.input = ImagePlane(width, height);
  f.reference = ImagePlane(width, height);
  f.region.resize(f.input.size());
  f.region_ref.resize(f.reference.size());
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      const int x_in = c, x_ref = c - shift;  // scene columns, offset by `shift` in storage
      const int k_in = scene_region(x_in), k_ref = scene_region(x_ref);
      f.region[i] = static_cast<std::uint8_t>(k_in);
      f.region_ref[i] = static_cast<std::uint8_t>(k_ref);
      // One scalar texture field along a fixed colour direction, so both
      // images share gradient orientations.
      const double n_in = texture[static_cast<std::size_t>(r) * scene_width + static_cast<std::size_t>(x_in + shift)];
      const double n_ref = texture[static_cast<std::size_t>(r) * scene_width + static_cast<std::size_t>(x_ref + shift)];
      Triple a{}, b{};
      for (std::size_t ch = 0; ch < 3; ++ch) {
        a[ch] = f.mean_in[k_in][ch] + f.spread_in[k_in] * kTextureDirection[ch] * n_in;
        b[ch] = f.mean_ref[k_ref][ch] + f.spread_ref[k_ref] * kTextureDirection[ch] * n_ref;
      }
      f.input[i] = lab_to_rgb(a);
      f.reference[i] = lab_to_rgb(b);
    }
  }

  // Six matches per region on a 2x3 lattice. The columns nearest the
  // boundary sit at equal distance on both sides and carry the highest
  // scores, so after the 70% filter the nearest-match cells still split
  // exactly at the region edge.
  const int half = width / 2;
  const int step = half / 4;
  const int rows[2] = {height / 4, 3 * height / 4};
  const int left_cols[3] = {half - step, half - 2 * step, half - 3 * step};
  const int right_cols[3] = {half - 1 + step, half - 1 + 2 * step, half - 1 + 3 * step};
  double score = 1.0;
  for (int j = 0; j < 3; ++j) {
    for (int row : rows) {
      for (int k = 0; k < 2; ++k) {
        const PixelLoc p{row, k == 0 ? left_cols[j] : right_cols[j]};
        f.matches.push_back({p, {p.row, p.col + shift}, score});
        score -= 0.05;
      }
    }
  }
  return f;
}

std::string match_text(const std::vector<Match>& matches) {
  std::ostringstream out;
  out.precision(17);
  for (const Match& m : matches)
    out << m.input.col << ' ' << m.input.row << ' ' << m.ref.col << ' ' << m.ref.row << ' ' << m.score << '\n';
  return out.str();
}

std::string photo_fixture_path() { return std::string(PHOTOSTYLE_TEST_DATA_DIR) + "/photo_128x96.png"; }
std::string photo_selfmatch_path() { return std::string(PHOTOSTYLE_TEST_DATA_DIR) + "/photo_selfmatches.txt"; }
ImagePlane load_photo_fixture() { return read_image(photo_fixture_path()); }

ImagePlane random_image(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  ImagePlane img(width, height);
  for (Triple& px : img.data())
    for (double& v : px) v = u(rng);
  return img;
}

}  // namespace photostyle::testing
