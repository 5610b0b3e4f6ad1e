#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/feature_table.hpp"
#include "trueset/manifest.hpp"
#include "trueset/numeric.hpp"
#include "trueset/png_io.hpp"
#include "trueset/raster.hpp"

namespace trueset {

// Where per-image feature vectors come from: a precomputed TDF1 table, or the
// built-in descriptor (grid cell means followed by a gradient histogram).
struct FeatureProvider {
  enum class Kind { file, builtin };

  Kind kind = Kind::builtin;
  std::filesystem::path path;
  int grid = 16;
  int bins = 8;

  static FeatureProvider from_file(std::filesystem::path p) {
    return {Kind::file, std::move(p), 16, 8};
  }
  static FeatureProvider builtin(int grid = 16, int bins = 8) {
    return {Kind::builtin, {}, grid, bins};
  }

  std::size_t builtin_dim() const noexcept {
    return static_cast<std::size_t>(grid) * grid + bins;
  }
};

// grid*grid cell means of intensity/255 (row-major cells), then a `bins`
// bucket histogram of central-difference gradient magnitudes normalised by
// the image maximum, as fractions of all pixels. A flat image yields an
// all-zero histogram.
inline std::vector<float> builtin_descriptor(const GrayImage& image, int grid,
                                             int bins) {
  if (grid < 1 || bins < 1) throw Error("descriptor grid and bins must be >= 1");
  if (image.empty()) throw FormatError("empty image");
  const int w = image.width;
  const int h = image.height;
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(grid) * grid + bins);

  // Cells with no pixel (image smaller than the grid) borrow one pixel.
  auto cell_range = [grid](int i, int n) {
    const int start = std::min(n - 1, static_cast<int>(std::int64_t(i) * n / grid));
    const int end = std::max(start + 1, static_cast<int>(std::int64_t(i + 1) * n / grid));
    return std::pair{start, end};
  };
  for (int gy = 0; gy < grid; ++gy) {
    const auto [r0, r1] = cell_range(gy, h);
    for (int gx = 0; gx < grid; ++gx) {
      const auto [c0, c1] = cell_range(gx, w);
      double sum = 0.0;
      for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) sum += image.at(r, c);
      out.push_back(static_cast<float>(sum / (255.0 * (r1 - r0) * (c1 - c0))));
    }
  }

  std::vector<double> magnitude(image.size());
  double max_mag = 0.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double gx = (image.at(r, std::min(w - 1, c + 1)) -
                         image.at(r, std::max(0, c - 1))) / (2.0 * 255.0);
      const double gy = (image.at(std::min(h - 1, r + 1), c) -
                         image.at(std::max(0, r - 1), c)) / (2.0 * 255.0);
      const double m = std::sqrt(gx * gx + gy * gy);
      magnitude[static_cast<std::size_t>(r) * w + c] = m;
      max_mag = std::max(max_mag, m);
    }
  }
  std::vector<double> hist(bins, 0.0);
  if (max_mag > 0.0) {
    for (double m : magnitude) {
      const int b = std::min(bins - 1, static_cast<int>(std::floor(m / max_mag * bins)));
      hist[b] += 1.0;
    }
    for (double& v : hist) v /= static_cast<double>(image.size());
  }
  for (double v : hist) out.push_back(static_cast<float>(v));
  return out;
}

// One vector per manifest entry, rows in manifest order.
inline FeatureTable features_for(const DatasetManifest& manifest,
                                 const FeatureProvider& provider,
                                 std::size_t jobs = 1) {
  if (provider.kind == FeatureProvider::Kind::file) {
    const FeatureTable source = read_feature_table(provider.path);
    FeatureTable out(source.dim());
    for (const auto& e : manifest.entries()) {
      if (!source.contains(e.id)) throw MissingIdError(e.id);
      out.add(e.id, source.row(e.id));
    }
    return out;
  }

  std::vector<std::vector<float>> rows(manifest.size());
  parallel_for(manifest.size(), jobs, [&](std::size_t i) {
    const auto& e = manifest.entries()[i];
    rows[i] = builtin_descriptor(read_gray(manifest.resolve(e.image_path)),
                                 provider.grid, provider.bins);
  });
  FeatureTable out(static_cast<std::uint32_t>(provider.builtin_dim()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.add(manifest.entries()[i].id, rows[i]);
  return out;
}

}  // namespace trueset
