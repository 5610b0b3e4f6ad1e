#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/raster.hpp"

namespace trueset {

namespace detail {

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace detail

// BT.601 luma, rounded half away from zero.
inline std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::min(255.0, std::round(y)));
}

// Decodes any PNG into an 8-bit gray raster. Colour images are reduced with
// BT.601 luma.
inline GrayImage read_gray(const std::filesystem::path& path) {
  detail::PngImage png;
  const std::string name = path.string();
  if (!png_image_begin_read_from_file(&png.image, name.c_str()))
    throw IoError("cannot decode PNG '" + name + "': " + png.image.message);
  const int w = static_cast<int>(png.image.width);
  const int h = static_cast<int>(png.image.height);
  if (w == 0 || h == 0) throw FormatError("zero-dimension image '" + name + "'");

  const bool colour = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr))
    throw IoError("cannot decode PNG '" + name + "': " + png.image.message);

  GrayImage out(w, h);
  if (!colour) {
    out.data = std::move(buffer);
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data[i] = luma601(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
  return out;
}

inline void write_gray(const GrayImage& image,
                       const std::filesystem::path& path) {
  if (image.width <= 0 || image.height <= 0)
    throw FormatError("cannot write zero-dimension image");
  detail::PngImage png;
  png.image.width = static_cast<png_uint_32>(image.width);
  png.image.height = static_cast<png_uint_32>(image.height);
  png.image.format = PNG_FORMAT_GRAY;
  const std::string name = path.string();
  if (!png_image_write_to_file(&png.image, name.c_str(), 0, image.data.data(),
                               0, nullptr))
    throw IoError("cannot write PNG '" + name + "': " + png.image.message);
}

// Gray value > 127 is a crack pixel; `invert` flips the polarity.
inline BinaryMask read_mask(const std::filesystem::path& path,
                            bool invert = false) {
  GrayImage gray = read_gray(path);
  BinaryMask mask(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const bool on = gray.data[i] > 127;
    mask.data[i] = (on != invert) ? 1 : 0;
  }
  return mask;
}

inline ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  GrayImage gray = read_gray(path);
  ProbabilityMap map(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.size(); ++i)
    map.data[i] = gray.data[i] / 255.0;
  return map;
}

inline void write_mask(const BinaryMask& mask,
                       const std::filesystem::path& path) {
  GrayImage gray(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.size(); ++i)
    gray.data[i] = mask.data[i] ? 255 : 0;
  write_gray(gray, path);
}

}  // namespace trueset
