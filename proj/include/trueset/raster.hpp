#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trueset/error.hpp"

namespace trueset {

// Row-major single-channel 2-D raster.
template <typename T>
struct Raster {
  using value_type = T;

  int width = 0;
  int height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw Error("negative raster dimension");
  }
  Raster(int w, int h, std::vector<T> values)
      : width(w), height(h), data(std::move(values)) {
    if (w < 0 || h < 0) throw Error("negative raster dimension");
    if (data.size() != static_cast<std::size_t>(w) * h)
      throw DimensionMismatch("raster data length does not match " +
                              std::to_string(w) + "x" + std::to_string(h));
  }

  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }
  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height && col < width;
  }

  T& at(int row, int col) { return data[index(row, col)]; }
  const T& at(int row, int col) const { return data[index(row, col)]; }

  std::span<T> row(int r) {
    return std::span<T>(data).subspan(static_cast<std::size_t>(r) * width,
                                      width);
  }
  std::span<const T> row(int r) const {
    return std::span<const T>(data).subspan(
        static_cast<std::size_t>(r) * width, width);
  }

  bool same_shape(const auto& other) const noexcept {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width + col;
  }
};

using GrayImage = Raster<std::uint8_t>;

// {0,1} labels; 1 marks a crack pixel.
struct BinaryMask : Raster<std::uint8_t> {
  using Raster::Raster;
  BinaryMask() = default;
  explicit BinaryMask(Raster<std::uint8_t> r) : Raster(std::move(r)) {}

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto v : data) n += v != 0;
    return n;
  }

  bool is_binary() const noexcept {
    for (auto v : data)
      if (v > 1) return false;
    return true;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Per-pixel crack probability in [0,1].
struct ProbabilityMap : Raster<double> {
  using Raster::Raster;
  ProbabilityMap() = default;
  explicit ProbabilityMap(Raster<double> r) : Raster(std::move(r)) {}

  bool in_unit_range() const noexcept {
    for (auto v : data)
      if (!(v >= 0.0 && v <= 1.0)) return false;
    return true;
  }

  friend bool operator==(const ProbabilityMap&,
                         const ProbabilityMap&) = default;
};

// True when every 1 in `inner` is also 1 in `outer`.
inline bool is_subset(const BinaryMask& inner, const BinaryMask& outer) {
  if (!inner.same_shape(outer)) return false;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner.data[i] && !outer.data[i]) return false;
  return true;
}

inline BinaryMask invert(const BinaryMask& m) {
  BinaryMask out(m.width, m.height);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = m.data[i] ? 0 : 1;
  return out;
}

}  // namespace trueset
