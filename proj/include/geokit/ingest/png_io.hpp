#pragma once

// PNG diagrams through libpng's simplified API. Every PNG colour type and bit
// depth is accepted; images are decoded to 8-bit RGB composited over white,
// then reduced with the library's own luminance formula. Link against libpng.

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "geokit/ingest/jsonl.hpp"
#include "geokit/metrics/gpms.hpp"

namespace geokit::ingest {

inline metrics::RgbImage read_png_rgb(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IngestError(path, 0, "unreadable PNG: " + msg);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw IngestError(path, 0, "zero-sized PNG");
  }
  metrics::RgbImage out;
  out.width = image.width;
  out.height = image.height;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IngestError(path, 0, "unreadable PNG: " + msg);
  }
  return out;
}

inline metrics::GrayImage read_png_gray(const std::string& path) {
  return metrics::to_gray(read_png_rgb(path));
}

/// Decode, convert to luminance, and binarize.
inline metrics::BinaryDiagram load_diagram(const std::string& path,
                                           int threshold = metrics::kDefaultThreshold) {
  return metrics::binarize(read_png_rgb(path), threshold);
}

inline void write_png_gray(const std::string& path, const metrics::GrayImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IngestError(path, 0, "cannot write PNG: " + msg);
  }
}

inline void write_png_rgb(const std::string& path, const metrics::RgbImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IngestError(path, 0, "cannot write PNG: " + msg);
  }
}

}  // namespace geokit::ingest
