#include "photostyle/color.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "photostyle/error.hpp"

namespace photostyle {

namespace {

Eigen::Matrix3d to_eigen(const Matrix3& m) {
  Eigen::Matrix3d out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = m[r][c];
  return out;
}

Matrix3 from_eigen(const Eigen::Matrix3d& m) {
  Matrix3 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r][c] = m(r, c);
  return out;
}

inline Triple mat_vec(const Matrix3& m, const Triple& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

struct ColorMatrices {
  Matrix3 rgb_to_lms;
  Matrix3 lms_to_rgb;
  Matrix3 log_lms_to_lab;
  Matrix3 lab_to_log_lms;

  ColorMatrices() {
    rgb_to_lms = {{{0.3811, 0.5783, 0.0402}, {0.1967, 0.7244, 0.0782}, {0.0241, 0.1288, 0.8444}}};
    lms_to_rgb = from_eigen(to_eigen(rgb_to_lms).inverse());

    const Eigen::Vector3d scale(1.0 / std::sqrt(3.0), 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(2.0));
    Eigen::Matrix3d mix;
    mix << 1, 1, 1, 1, 1, -2, 1, -1, 0;
    const Eigen::Matrix3d forward = scale.asDiagonal() * mix;

    // The product must equal the closed-form rows (1,1,1)/sqrt3, (1,1,-2)/sqrt6, (1,-1,0)/sqrt2.
    Eigen::Matrix3d expected;
    expected << 1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0),  //
        1 / std::sqrt(6.0), 1 / std::sqrt(6.0), -2 / std::sqrt(6.0),         //
        1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0.0;
    if ((forward - expected).cwiseAbs().maxCoeff() > 1e-12)
      throw std::logic_error("lab mixing matrix product mismatch");

    log_lms_to_lab = from_eigen(forward);
    lab_to_log_lms = from_eigen(forward.inverse());
  }
};

const ColorMatrices& matrices() {
  static const ColorMatrices m;
  return m;
}

}  // namespace

const Matrix3& rgb_to_lms_matrix() { return matrices().rgb_to_lms; }
const Matrix3& lms_to_rgb_matrix() { return matrices().lms_to_rgb; }
const Matrix3& log_lms_to_lab_matrix() { return matrices().log_lms_to_lab; }
const Matrix3& lab_to_log_lms_matrix() { return matrices().lab_to_log_lms; }

Triple rgb_to_lab(const Triple& rgb, double log_floor) {
  const auto& m = matrices();
  Triple lms = mat_vec(m.rgb_to_lms, rgb);
  for (double& v : lms) v = std::log10(std::max(v, log_floor));
  return mat_vec(m.log_lms_to_lab, lms);
}

Triple lab_to_rgb(const Triple& lab) {
  const auto& m = matrices();
  Triple lms = mat_vec(m.lab_to_log_lms, lab);
  for (double& v : lms) v = std::pow(10.0, v);
  Triple rgb = mat_vec(m.lms_to_rgb, lms);
  for (double& v : rgb) v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : (v > 0 ? 1.0 : 0.0);
  return rgb;
}

LabPlane rgb_to_lab(const ImagePlane& img, double log_floor) {
  if (!(log_floor > 0)) throw ValidationError("log_floor must be positive");
  LabPlane out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = rgb_to_lab(img[i], log_floor);
  return out;
}

ImagePlane lab_to_rgb(const LabPlane& lab) {
  ImagePlane out(lab.width(), lab.height());
  for (std::size_t i = 0; i < lab.size(); ++i) out[i] = lab_to_rgb(lab[i]);
  return out;
}

ScalarPlane intensity_plane(const ImagePlane& img) {
  ScalarPlane out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = intensity(img[i]);
  return out;
}

void ImagePlane::validate() const {
  if (width() < 1 || height() < 1) throw ValidationError("image must be at least 1x1");
  if (size() != static_cast<std::size_t>(width()) * height())
    throw ValidationError("image data length does not match its dimensions");
  for (const Triple& px : data())
    for (double v : px)
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw ValidationError("image channel value outside [0,1]");
}

}  // namespace photostyle
