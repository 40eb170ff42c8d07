#pragma once

#include <string>

#include "photostyle/error.hpp"
#include "photostyle/image.hpp"
#include "photostyle/matches.hpp"
#include "photostyle/seeds.hpp"

namespace photostyle {

class ImageIoError : public Error {
 public:
  enum class Kind { unreadable, unsupported_format, corrupt, write_failed };
  ImageIoError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Decodes PNG (8/16-bit, any colour type) or JPEG by file signature into
/// [0,1] RGB. Alpha is dropped, grey is replicated.
ImagePlane read_image(const std::string& path);

/// 8-bit RGB PNG; channels are rounded to the nearest code value.
void write_png(const std::string& path, const ImagePlane& img);

/// Bilinear resampling to round(factor * size), at least 1x1.
ImagePlane resize_bilinear(const ImagePlane& img, double factor);

/// Distinct colour per superpixel id, black for uncovered pixels.
ImagePlane render_labels(const SuperpixelLabelMap& labels);

/// The image with a small cross at every matched location on `side`.
ImagePlane render_match_overlay(const ImagePlane& img, const MatchedPointSet& matches, Side side);

}  // namespace photostyle
