#pragma once

#include <cmath>

#include "photostyle/image.hpp"

namespace photostyle {

inline constexpr double kDefaultLogFloor = 1e-6;

/// RGB to LMS cone response:
///
///   | 0.3811  0.5783  0.0402 |
///   | 0.1967  0.7244  0.0782 |
///   | 0.0241  0.1288  0.8444 |
///
/// LMS is then floored, taken to log10, and mixed into (l, alpha, beta) by
/// diag(1/sqrt3, 1/sqrt6, 1/sqrt2) * [[1,1,1],[1,1,-2],[1,-1,0]].
using Matrix3 = std::array<std::array<double, 3>, 3>;

const Matrix3& rgb_to_lms_matrix();
const Matrix3& lms_to_rgb_matrix();
/// Product of the diagonal scaling and the channel-mixing matrix.
const Matrix3& log_lms_to_lab_matrix();
const Matrix3& lab_to_log_lms_matrix();

Triple rgb_to_lab(const Triple& rgb, double log_floor = kDefaultLogFloor);
/// Exact inverse of the forward transform; RGB clamped to [0,1].
Triple lab_to_rgb(const Triple& lab);

LabPlane rgb_to_lab(const ImagePlane& img, double log_floor = kDefaultLogFloor);
ImagePlane lab_to_rgb(const LabPlane& lab);

/// Euclidean norm of each RGB triple, in [0, sqrt 3].
ScalarPlane intensity_plane(const ImagePlane& img);

inline double intensity(const Triple& rgb) {
  return std::sqrt(rgb[0] * rgb[0] + rgb[1] * rgb[1] + rgb[2] * rgb[2]);
}

}  // namespace photostyle
