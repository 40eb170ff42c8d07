#include "photostyle/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace photostyle {

namespace {

using FilePtr = std::unique_ptr<FILE, int (*)(FILE*)>;

FilePtr open_file(const std::string& path, const char* mode) {
  FILE* f = std::fopen(path.c_str(), mode);
  if (!f) {
    const auto kind = mode[0] == 'r' ? ImageIoError::Kind::unreadable : ImageIoError::Kind::write_failed;
    throw ImageIoError(kind, "cannot open '" + path + "': " + std::strerror(errno));
  }
  return {f, &std::fclose};
}

ImagePlane read_png(FILE* f, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageIoError(ImageIoError::Kind::corrupt, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ImageIoError(ImageIoError::Kind::corrupt, "libpng initialisation failed");
  }
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageIoError(ImageIoError::Kind::corrupt, "corrupt PNG '" + path + "'");
  }
  png_init_io(png, f);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // host-order 16-bit samples
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  const int depth = png_get_bit_depth(png, info);
  pixels.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImagePlane img(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      Triple& px = img.at(static_cast<int>(r), static_cast<int>(c));
      for (int ch = 0; ch < 3; ++ch) {
        if (depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[r] + (c * 3 + static_cast<png_uint_32>(ch)) * 2, 2);
          px[static_cast<std::size_t>(ch)] = v / 65535.0;
        } else {
          px[static_cast<std::size_t>(ch)] = rows[r][c * 3 + static_cast<png_uint_32>(ch)] / 255.0;
        }
      }
    }
  }
  return img;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

ImagePlane read_jpeg(FILE* f, const std::string& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  std::vector<unsigned char> buffer;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw ImageIoError(ImageIoError::Kind::corrupt, "corrupt JPEG '" + path + "': " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  buffer.resize(static_cast<std::size_t>(width) * 3);
  ImagePlane img(width, height);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int r = static_cast<int>(cinfo.output_scanline);
    JSAMPROW row = buffer.data();
    jpeg_read_scanlines(&cinfo, &row, 1);
    for (int c = 0; c < width; ++c)
      for (int ch = 0; ch < 3; ++ch)
        img.at(r, c)[static_cast<std::size_t>(ch)] = buffer[static_cast<std::size_t>(c) * 3 + static_cast<std::size_t>(ch)] / 255.0;
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace

ImagePlane read_image(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  std::array<unsigned char, 8> sig{};
  const std::size_t got = std::fread(sig.data(), 1, sig.size(), f.get());
  std::rewind(f.get());
  if (got >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return read_png(f.get(), path);
  if (got >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return read_jpeg(f.get(), path);
  throw ImageIoError(ImageIoError::Kind::unsupported_format, "unsupported image format '" + path + "' (PNG or JPEG expected)");
}

void write_png(const std::string& path, const ImagePlane& img) {
  img.validate();
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw ImageIoError(ImageIoError::Kind::write_failed, "libpng initialisation failed");
  }
  const int w = img.width(), h = img.height();
  std::vector<png_byte> pixels(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t ch = 0; ch < 3; ++ch)
      pixels[i * 3 + ch] = static_cast<png_byte>(std::lround(std::clamp(img[i][ch], 0.0, 1.0) * 255.0));
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int r = 0; r < h; ++r) rows[static_cast<std::size_t>(r)] = pixels.data() + static_cast<std::size_t>(r) * w * 3;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageIoError(ImageIoError::Kind::write_failed, "failed writing PNG '" + path + "'");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImagePlane resize_bilinear(const ImagePlane& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ValidationError("scale factor must be positive");
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * factor)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * factor)));
  const double sx = static_cast<double>(img.width()) / w;
  const double sy = static_cast<double>(img.height()) / h;
  ImagePlane out(w, h);
  for (int r = 0; r < h; ++r) {
    const double y = std::clamp((r + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(y);
    const double fy = y - y0;
    for (int c = 0; c < w; ++c) {
      const double x = std::clamp((c + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(x);
      const double fx = x - x0;
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double top = img.clamped(y0, x0)[ch] * (1 - fx) + img.clamped(y0, x0 + 1)[ch] * fx;
        const double bottom = img.clamped(y0 + 1, x0)[ch] * (1 - fx) + img.clamped(y0 + 1, x0 + 1)[ch] * fx;
        out.at(r, c)[ch] = std::clamp(top * (1 - fy) + bottom * fy, 0.0, 1.0);
      }
    }
  }
  return out;
}

ImagePlane render_labels(const SuperpixelLabelMap& labels) {
  const Dims d = labels.dims();
  ImagePlane out(d.width, d.height);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    const int l = labels.label(i);
    if (l == kUncovered) continue;
    // Golden-ratio hue walk gives neighbouring ids distinct colours.
    const double hue = std::fmod(l * 0.618033988749895, 1.0) * 6.0;
    const double f = hue - std::floor(hue);
    const double v = 0.95, s = 0.75;
    const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    switch (static_cast<int>(hue) % 6) {
      case 0: out[i] = {v, t, p}; break;
      case 1: out[i] = {q, v, p}; break;
      case 2: out[i] = {p, v, t}; break;
      case 3: out[i] = {p, q, v}; break;
      case 4: out[i] = {t, p, v}; break;
      default: out[i] = {v, p, q}; break;
    }
  }
  return out;
}

ImagePlane render_match_overlay(const ImagePlane& img, const MatchedPointSet& matches, Side side) {
  ImagePlane out = img;
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const PixelLoc p = matches.loc(m, side);
    for (int d = -2; d <= 2; ++d) {
      for (const PixelLoc q : {PixelLoc{p.row + d, p.col}, PixelLoc{p.row, p.col + d}})
        if (out.dims().contains(q)) out.at(q) = {1.0, 0.0, 0.0};
    }
  }
  return out;
}

}  // namespace photostyle
