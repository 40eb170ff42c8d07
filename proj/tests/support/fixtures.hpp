#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "photostyle/image.hpp"
#include "photostyle/matches.hpp"

namespace photostyle::testing {

/// Two flat-noise regions (left and right halves of one scene) sharing one
/// texture field. The input is warm/cool; the reference shows the scene
/// moved right by `shift` pixels, recoloured cool/warm with other spreads.
struct TwoRegionPair {
  ImagePlane input;
  ImagePlane reference;
  std::vector<std::uint8_t> region;      // input pixel -> 0 left, 1 right
  std::vector<std::uint8_t> region_ref;  // reference pixel -> 0 left, 1 right
  std::vector<Match> matches;            // scene-consistent, descending scores
  Triple mean_in[2];
  Triple mean_ref[2];
  double spread_in[2];
  double spread_ref[2];
};

/// `noise` scales both images' spreads; shift is at most width / 8.
TwoRegionPair make_two_region_pair(int width = 96, int height = 64, std::uint64_t seed = 7, double noise = 1.0,
                                   int shift = 4);

/// "x y x y score" lines accepted by load_matches.
std::string match_text(const std::vector<Match>& matches);

ImagePlane load_photo_fixture();
std::string photo_selfmatch_path();
std::string photo_fixture_path();

/// Uniform image in [0.05, 0.95] from a fixed seed.
ImagePlane random_image(int width, int height, std::uint64_t seed);

}  // namespace photostyle::testing
