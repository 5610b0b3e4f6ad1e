#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/numeric.hpp"
#include "trueset/raster.hpp"

namespace trueset {

// Square all-ones structuring element of side k, anchored at (k/2, k/2).
struct Kernel {
  int size = 3;

  constexpr int anchor() const noexcept { return size / 2; }
};

// Output (r,c) is set when an input 1-pixel p satisfies
// r - (k-1-anchor) <= p.row <= r + anchor (same for columns). For even k the
// growth around a pixel is therefore `anchor` back and `k-1-anchor` forward,
// e.g. 4 back / 3 forward for k = 8. Pixels outside the raster count as 0.
inline BinaryMask dilate(const BinaryMask& mask, Kernel kernel) {
  if (kernel.size < 1) throw Error("kernel size must be >= 1");
  if (kernel.size == 1 || mask.empty()) return mask;
  const int lo = -(kernel.size - 1 - kernel.anchor());
  const int hi = kernel.anchor();
  const int w = mask.width;
  const int h = mask.height;

  // Separable: a square window max is a row max followed by a column max.
  BinaryMask horizontal(w, h);
  for (int r = 0; r < h; ++r) {
    auto src = mask.row(r);
    auto dst = horizontal.row(r);
    for (int c = 0; c < w; ++c) {
      const int c0 = std::max(0, c + lo);
      const int c1 = std::min(w - 1, c + hi);
      std::uint8_t v = 0;
      for (int x = c0; x <= c1 && !v; ++x) v = src[x] ? 1 : 0;
      dst[c] = v;
    }
  }
  BinaryMask out(w, h);
  for (int r = 0; r < h; ++r) {
    const int r0 = std::max(0, r + lo);
    const int r1 = std::min(h - 1, r + hi);
    for (int c = 0; c < w; ++c) {
      std::uint8_t v = 0;
      for (int y = r0; y <= r1 && !v; ++y) v = horizontal.at(y, c);
      out.at(r, c) = v;
    }
  }
  return out;
}

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct BoundingBox {
  int min_row = 0;
  int min_col = 0;
  int max_row = 0;
  int max_col = 0;

  int height() const noexcept { return max_row - min_row + 1; }
  int width() const noexcept { return max_col - min_col + 1; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Maximal 8-connected set of foreground pixels, pixels in raster order.
struct ConnectedComponent {
  int label = 0;
  std::vector<Pixel> pixels;
  BoundingBox bbox;

  std::size_t area() const noexcept { return pixels.size(); }
};

// Components labelled in raster-scan order of their first pixel.
inline std::vector<ConnectedComponent> connected_components(
    const BinaryMask& mask) {
  std::vector<ConnectedComponent> out;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<Pixel> stack;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * mask.width + c;
      if (!mask.data[idx] || seen[idx]) continue;

      ConnectedComponent comp;
      comp.label = static_cast<int>(out.size());
      comp.bbox = {r, c, r, c};
      seen[idx] = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.pixels.push_back(p);
        comp.bbox.min_row = std::min(comp.bbox.min_row, p.row);
        comp.bbox.max_row = std::max(comp.bbox.max_row, p.row);
        comp.bbox.min_col = std::min(comp.bbox.min_col, p.col);
        comp.bbox.max_col = std::max(comp.bbox.max_col, p.col);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = p.row + dr;
            const int nc = p.col + dc;
            if ((dr == 0 && dc == 0) || !mask.contains(nr, nc)) continue;
            const std::size_t n = static_cast<std::size_t>(nr) * mask.width + nc;
            if (mask.data[n] && !seen[n]) {
              seen[n] = 1;
              stack.push_back({nr, nc});
            }
          }
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end());
      out.push_back(std::move(comp));
    }
  }
  return out;
}

struct Point {
  double row = 0.0;
  double col = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Polygon {
  std::vector<Point> vertices;

  BoundingBox bounds() const {
    BoundingBox b{static_cast<int>(std::floor(vertices.front().row)),
                  static_cast<int>(std::floor(vertices.front().col)),
                  static_cast<int>(std::ceil(vertices.front().row)),
                  static_cast<int>(std::ceil(vertices.front().col))};
    for (const auto& v : vertices) {
      b.min_row = std::min(b.min_row, static_cast<int>(std::floor(v.row)));
      b.min_col = std::min(b.min_col, static_cast<int>(std::floor(v.col)));
      b.max_row = std::max(b.max_row, static_cast<int>(std::ceil(v.row)));
      b.max_col = std::max(b.max_col, static_cast<int>(std::ceil(v.col)));
    }
    return b;
  }
};

namespace detail {

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.row - o.row) * (b.col - o.col) - (a.col - o.col) * (b.row - o.row);
}

}  // namespace detail

// Convex hull of the pixel centres, counter-clockwise in the (row, col)
// plane, collinear points dropped. std::nullopt when the pixels are fewer
// than three or all collinear.
inline std::optional<Polygon> convex_hull(const ConnectedComponent& comp) {
  std::vector<Point> pts;
  pts.reserve(comp.pixels.size());
  for (const auto& p : comp.pixels) pts.push_back({double(p.row), double(p.col)});
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return std::nullopt;

  // Andrew's monotone chain.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return std::nullopt;
  return Polygon{std::move(hull)};
}

// Rectangle through the pixel-centre corners of the bounding box. May be
// degenerate (zero height or width) for single-row or single-column shapes.
inline Polygon bbox_polygon(const BoundingBox& b) {
  return Polygon{{{double(b.min_row), double(b.min_col)},
                  {double(b.max_row), double(b.min_col)},
                  {double(b.max_row), double(b.max_col)},
                  {double(b.min_row), double(b.max_col)}}};
}

// Even-odd rule; points on an edge or vertex count as inside.
inline bool point_in_polygon(Point p, const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n == 0) return false;
  constexpr double tol = 1e-9;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = v[j];
    const Point& b = v[i];
    if (std::abs(detail::cross(a, b, p)) <= tol &&
        p.row >= std::min(a.row, b.row) - tol &&
        p.row <= std::max(a.row, b.row) + tol &&
        p.col >= std::min(a.col, b.col) - tol &&
        p.col <= std::max(a.col, b.col) + tol)
      return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = v[j];
    const Point& b = v[i];
    if ((a.row > p.row) != (b.row > p.row)) {
      const double col_at =
          a.col + (p.row - a.row) * (b.col - a.col) / (b.row - a.row);
      if (p.col < col_at) inside = !inside;
    }
  }
  return inside;
}

enum class Interpolation { bicubic, nearest };

namespace detail {

// Cubic convolution kernel with a = -0.5 (Catmull-Rom).
inline std::array<double, 4> cubic_weights(double t) {
  constexpr double a = -0.5;
  auto w = [](double x) {
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
  };
  return {w(1.0 + t), w(t), w(1.0 - t), w(2.0 - t)};
}

template <typename T>
T store_sample(double v) {
  v = std::clamp(v, 0.0, 255.0);
  if constexpr (std::is_integral_v<T>)
    return static_cast<T>(round_half_away(v));
  else
    return static_cast<T>(v);
}

}  // namespace detail

// Pixel-centre aligned resampling. Nearest maps output (r,c) to input
// (floor((r+0.5)*in_h/out_h), floor((c+0.5)*in_w/out_w)). Bicubic clamps
// sample positions at the border and clamps output values to [0,255].
template <typename T>
Raster<T> resize(const Raster<T>& src, int new_width, int new_height,
                 Interpolation method) {
  if (new_width < 1 || new_height < 1)
    throw Error("resize target must be at least 1x1");
  if (src.empty()) throw Error("cannot resize an empty raster");
  if (new_width == src.width && new_height == src.height) return src;

  const double sy = double(src.height) / new_height;
  const double sx = double(src.width) / new_width;
  Raster<T> out(new_width, new_height);

  if (method == Interpolation::nearest) {
    std::vector<int> cols(new_width);
    for (int c = 0; c < new_width; ++c)
      cols[c] = std::min(src.width - 1, static_cast<int>(std::floor((c + 0.5) * sx)));
    for (int r = 0; r < new_height; ++r) {
      const int sr =
          std::min(src.height - 1, static_cast<int>(std::floor((r + 0.5) * sy)));
      for (int c = 0; c < new_width; ++c) out.at(r, c) = src.at(sr, cols[c]);
    }
    return out;
  }

  struct Tap {
    std::array<int, 4> index;
    std::array<double, 4> weight;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(n_out);
    for (int i = 0; i < n_out; ++i) {
      const double pos = (i + 0.5) * scale - 0.5;
      const int base = static_cast<int>(std::floor(pos));
      t[i].weight = detail::cubic_weights(pos - base);
      for (int k = 0; k < 4; ++k)
        t[i].index[k] = std::clamp(base - 1 + k, 0, n_in - 1);
    }
    return t;
  };
  const auto row_taps = taps(new_height, src.height, sy);
  const auto col_taps = taps(new_width, src.width, sx);

  // Horizontal pass in double, then vertical.
  Raster<double> tmp(new_width, src.height);
  for (int r = 0; r < src.height; ++r) {
    auto in = src.row(r);
    for (int c = 0; c < new_width; ++c) {
      const Tap& t = col_taps[c];
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weight[k] * double(in[t.index[k]]);
      tmp.at(r, c) = acc;
    }
  }
  for (int r = 0; r < new_height; ++r) {
    const Tap& t = row_taps[r];
    for (int c = 0; c < new_width; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weight[k] * tmp.at(t.index[k], c);
      out.at(r, c) = detail::store_sample<T>(acc);
    }
  }
  return out;
}

inline BinaryMask resize(const BinaryMask& mask, int new_width, int new_height,
                         Interpolation method) {
  return BinaryMask(resize(static_cast<const Raster<std::uint8_t>&>(mask),
                           new_width, new_height, method));
}

}  // namespace trueset
