#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/imageops.hpp"
#include "trueset/manifest.hpp"
#include "trueset/numeric.hpp"
#include "trueset/png_io.hpp"
#include "trueset/random.hpp"
#include "trueset/raster.hpp"
#include "trueset/select.hpp"

namespace trueset {

enum class AugmentMode { sw, sl, ss, mix };

inline std::string_view to_string(AugmentMode m) {
  switch (m) {
    case AugmentMode::sw: return "sw";
    case AugmentMode::sl: return "sl";
    case AugmentMode::ss: return "ss";
    case AugmentMode::mix: return "mix";
  }
  return "sw";
}

inline std::optional<AugmentMode> parse_augment_mode(std::string_view s) {
  if (s == "sw") return AugmentMode::sw;
  if (s == "sl") return AugmentMode::sl;
  if (s == "ss") return AugmentMode::ss;
  if (s == "mix") return AugmentMode::mix;
  return std::nullopt;
}

inline std::vector<int> default_kernels(AugmentMode m) {
  if (m == AugmentMode::mix) return {3, 5};
  return {3, 5, 8};
}

struct AugmentSpec {
  AugmentMode mode = AugmentMode::sw;
  std::vector<int> kernels = {3, 5, 8};
  int scale = 4;
  // Component-area thresholds in pixels.
  std::size_t t0 = 50;
  std::size_t t1 = 100;
  std::size_t t2 = 200;
  std::uint64_t seed = 0;

  static AugmentSpec for_mode(AugmentMode m) {
    AugmentSpec s;
    s.mode = m;
    s.kernels = default_kernels(m);
    return s;
  }

  void validate() const {
    if (kernels.empty()) throw Error("at least one kernel is required");
    for (int k : kernels)
      if (k < 1) throw Error("kernel sizes must be >= 1");
    if (scale < 2) throw Error("scale must be >= 2");
    if (!(t0 < t1 && t1 < t2)) throw Error("thresholds must satisfy t0 < t1 < t2");
  }
};

// Number of augmented masks produced per training image.
inline std::size_t variants_per_image(const AugmentSpec& spec) {
  switch (spec.mode) {
    case AugmentMode::sw:
    case AugmentMode::ss: return spec.kernels.size();
    case AugmentMode::sl: return 1;
    case AugmentMode::mix: return spec.kernels.size() + 1;
  }
  return 0;
}

inline std::vector<BinaryMask> stochastic_width(const BinaryMask& mask,
                                                const std::vector<int>& kernels) {
  std::vector<BinaryMask> out;
  out.reserve(kernels.size());
  for (int k : kernels) out.push_back(dilate(mask, Kernel{k}));
  return out;
}

// Square side range [max(3, round(w)), max(5, round(3w))] where w is the
// estimated crack width area / max(bbox height, bbox width).
inline std::pair<int, int> side_range(const ConnectedComponent& c) {
  const double width = static_cast<double>(c.area()) /
                       std::max(c.bbox.height(), c.bbox.width());
  const int lo = std::max<int>(3, static_cast<int>(round_half_away(width)));
  const int hi = std::max<int>(5, static_cast<int>(round_half_away(3.0 * width)));
  return {lo, std::max(lo, hi)};
}

// Point count range by component area.
inline std::pair<int, int> point_count_range(std::size_t area, const AugmentSpec& spec) {
  if (area <= spec.t1) return {1, 3};
  if (area <= spec.t2) return {2, 5};
  return {5, 8};
}

// Uniform point inside the polygon by rejection over its bounding box;
// after `max_trials` misses, a uniformly chosen component pixel instead.
template <RandomSource Rng>
Point sample_in_polygon(const Polygon& poly, const ConnectedComponent& comp,
                        Rng& rng, int max_trials = 1000) {
  double r0 = poly.vertices.front().row, r1 = r0;
  double c0 = poly.vertices.front().col, c1 = c0;
  for (const auto& v : poly.vertices) {
    r0 = std::min(r0, v.row);
    r1 = std::max(r1, v.row);
    c0 = std::min(c0, v.col);
    c1 = std::max(c1, v.col);
  }
  for (int t = 0; t < max_trials; ++t) {
    const double r = rng.uniform_real(r0, r1);
    const double c = rng.uniform_real(c0, c1);
    if (point_in_polygon({r, c}, poly)) return {r, c};
  }
  const int i = rng.uniform_int(0, static_cast<int>(comp.area()) - 1);
  return {double(comp.pixels[i].row), double(comp.pixels[i].col)};
}

// Clears the side x side square centred on pixel (row, col), anchored like
// Kernel (side/2 before the centre), clipped at the borders. With `labels`,
// only pixels carrying `label` are cleared.
inline void clear_square(BinaryMask& mask, int row, int col, int side,
                         const Raster<int>* labels = nullptr, int label = 0) {
  const int r0 = row - side / 2;
  const int c0 = col - side / 2;
  for (int r = std::max(0, r0); r < std::min(mask.height, r0 + side); ++r)
    for (int c = std::max(0, c0); c < std::min(mask.width, c0 + side); ++c)
      if (!labels || labels->at(r, c) == label) mask.at(r, c) = 0;
}

// Removes random squares from every component larger than t0 pixels. A
// square only clears pixels of the component it was drawn for, so nearby
// small components survive. Draw order per component: point count, then all
// points, then one side per point.
template <RandomSource Rng>
BinaryMask random_masking(const BinaryMask& mask, const AugmentSpec& spec, Rng& rng) {
  BinaryMask out = mask;
  const auto comps = connected_components(mask);
  Raster<int> labels(mask.width, mask.height, -1);
  for (const auto& comp : comps)
    for (const auto& p : comp.pixels) labels.at(p.row, p.col) = comp.label;
  for (const auto& comp : comps) {
    if (comp.area() <= spec.t0) continue;
    const auto [side_lo, side_hi] = side_range(comp);
    const Polygon poly = convex_hull(comp).value_or(bbox_polygon(comp.bbox));
    const auto [n_lo, n_hi] = point_count_range(comp.area(), spec);
    const int npts = rng.uniform_int(n_lo, n_hi);

    std::vector<Point> points;
    points.reserve(npts);
    for (int i = 0; i < npts; ++i) points.push_back(sample_in_polygon(poly, comp, rng));
    for (const Point& p : points) {
      const int side = rng.uniform_int(side_lo, side_hi);
      clear_square(out, static_cast<int>(round_half_away(p.row)),
                   static_cast<int>(round_half_away(p.col)), side, &labels, comp.label);
    }
  }
  return out;
}

// Dilation at `scale`x resolution: bicubic upscale of the 0/255 mask,
// binarise at >= 128, dilate per kernel, nearest downscale back.
inline std::vector<BinaryMask> scale_space(const BinaryMask& mask, const AugmentSpec& spec) {
  std::vector<BinaryMask> out;
  if (mask.empty()) {
    out.assign(spec.kernels.size(), mask);
    return out;
  }
  GrayImage gray(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.size(); ++i) gray.data[i] = mask.data[i] ? 255 : 0;
  const GrayImage up = resize(gray, mask.width * spec.scale, mask.height * spec.scale,
                              Interpolation::bicubic);
  BinaryMask up_mask(up.width, up.height);
  for (std::size_t i = 0; i < up.size(); ++i) up_mask.data[i] = up.data[i] >= 128 ? 1 : 0;
  for (int k : spec.kernels)
    out.push_back(resize(dilate(up_mask, Kernel{k}), mask.width, mask.height,
                         Interpolation::nearest));
  return out;
}

// Dilations with each kernel (default 3 and 5) followed by one randomly
// masked mask.
template <RandomSource Rng>
std::vector<BinaryMask> mix(const BinaryMask& mask, const AugmentSpec& spec, Rng& rng) {
  std::vector<BinaryMask> out = stochastic_width(mask, spec.kernels);
  out.push_back(random_masking(mask, spec, rng));
  return out;
}

// All augmented masks of one training image, in variant order.
inline std::vector<BinaryMask> augment_mask(const BinaryMask& mask, const AugmentSpec& spec,
                                            std::string_view id) {
  SeededRng rng(image_seed(spec.seed, id));
  switch (spec.mode) {
    case AugmentMode::sw: return stochastic_width(mask, spec.kernels);
    case AugmentMode::sl: return {random_masking(mask, spec, rng)};
    case AugmentMode::ss: return scale_space(mask, spec);
    case AugmentMode::mix: return mix(mask, spec, rng);
  }
  return {};
}

inline std::string variant_id(std::string_view id, AugmentMode mode, std::size_t variant) {
  return std::string(id) + "__" + std::string(to_string(mode)) + std::to_string(variant);
}

struct AugmentOptions {
  std::size_t jobs = 1;
  bool invert_masks = false;
};

// Writes augmented masks for every training id of `split` into out_dir as
// `<id>__<mode><variant>.png` (variants numbered from 1) and returns the
// manifest: each training original followed by its variants (sharing the
// original image), then validation entries untouched. Paths in the result
// are relative to out_dir.
inline DatasetManifest build_augmented_manifest(const TrueSplit& split, const AugmentSpec& spec,
                                                const DatasetManifest& in_manifest,
                                                const std::filesystem::path& out_dir,
                                                const AugmentOptions& options = {}) {
  spec.validate();
  namespace fs = std::filesystem;
  if (!fs::is_directory(out_dir))
    throw IoError("output directory '" + out_dir.string() + "' does not exist");

  const std::size_t n_variants = variants_per_image(spec);
  std::unordered_set<std::string> taken;
  for (const auto& id : split.train_ids) taken.insert(id);
  for (const auto& id : split.val_ids) taken.insert(id);
  for (const auto& id : split.train_ids) {
    const ManifestEntry& e = in_manifest.at(id);
    if (!e.mask_path) throw Error("training entry '" + id + "' has no mask");
    for (std::size_t v = 1; v <= n_variants; ++v)
      if (!taken.insert(variant_id(id, spec.mode, v)).second)
        throw DuplicateIdError(variant_id(id, spec.mode, v));
  }
  for (const auto& id : split.val_ids) in_manifest.at(id);

  parallel_for(split.train_ids.size(), options.jobs, [&](std::size_t i) {
    const std::string& id = split.train_ids[i];
    const ManifestEntry& e = in_manifest.at(id);
    const BinaryMask mask = read_mask(in_manifest.resolve(*e.mask_path), options.invert_masks);
    const auto variants = augment_mask(mask, spec, id);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      BinaryMask m = options.invert_masks ? invert(variants[v]) : variants[v];
      write_mask(m, out_dir / (variant_id(id, spec.mode, v + 1) + ".png"));
    }
  });

  DatasetManifest out(out_dir);
  auto rebased = [&](const fs::path& p) { return detail::rebase(p, in_manifest.root(), out_dir); };
  for (const auto& id : split.train_ids) {
    ManifestEntry original = in_manifest.at(id);
    original.split = Split::train;
    original.image_path = rebased(original.image_path);
    original.mask_path = rebased(*original.mask_path);
    const fs::path image = original.image_path;
    out.add(std::move(original));
    for (std::size_t v = 1; v <= n_variants; ++v) {
      const std::string vid = variant_id(id, spec.mode, v);
      out.add({vid, image, fs::path(vid + ".png"), Split::train});
    }
  }
  for (const auto& id : split.val_ids) {
    ManifestEntry e = in_manifest.at(id);
    e.split = Split::val;
    e.image_path = rebased(e.image_path);
    if (e.mask_path) e.mask_path = rebased(*e.mask_path);
    out.add(std::move(e));
  }
  return out;
}

// Train/val split as recorded in a manifest's split column.
inline TrueSplit split_from_manifest(const DatasetManifest& m) {
  TrueSplit s;
  for (const auto& e : m.entries()) {
    if (e.split == Split::train) s.train_ids.push_back(e.id);
    else if (e.split == Split::val) s.val_ids.push_back(e.id);
  }
  return s;
}

}  // namespace trueset
