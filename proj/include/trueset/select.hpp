#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/manifest.hpp"
#include "trueset/numeric.hpp"
#include "trueset/pca.hpp"

namespace trueset {

// |c - mean(c)| for each coordinate.
inline std::vector<double> distances_from_mean(const std::vector<double>& coords) {
  if (coords.empty()) return {};
  const double mean =
      std::accumulate(coords.begin(), coords.end(), 0.0) / coords.size();
  std::vector<double> d;
  d.reserve(coords.size());
  for (double c : coords) d.push_back(std::abs(c - mean));
  return d;
}

// Equal-width histogram over the distances.
struct BinStructure {
  std::vector<double> edges;                 // n_bins + 1, ascending
  std::vector<std::size_t> counts;           // n_bins
  std::vector<std::size_t> bin_of;           // item index -> bin
  // Item indices of each bin, by ascending distance then id.
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> idx_descending;   // bins by count desc, index asc

  std::size_t n_bins() const noexcept { return counts.size(); }
};

// Bin b covers [edges[b], edges[b+1]) except the last, which is closed. When
// every distance is equal all items land in bin 0 and the edges span
// [min, min + 1]. `ids` orders ties inside a bin and may be empty, in which
// case ties keep input order.
inline BinStructure build_bins(const std::vector<double>& distances,
                               std::size_t n_bins,
                               const std::vector<std::string>& ids = {}) {
  if (n_bins < 1) throw Error("n_bins must be >= 1");
  if (distances.empty()) throw Error("cannot bin an empty distance list");
  if (!ids.empty() && ids.size() != distances.size())
    throw DimensionMismatch("ids and distances differ in length");

  const auto [lo_it, hi_it] = std::minmax_element(distances.begin(), distances.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const bool degenerate = !(hi > lo);
  const double span = degenerate ? 1.0 : hi - lo;

  BinStructure bins;
  bins.edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b)
    bins.edges[b] = lo + span * static_cast<double>(b) / static_cast<double>(n_bins);
  bins.edges[n_bins] = degenerate ? lo + span : hi;
  bins.counts.assign(n_bins, 0);
  bins.members.assign(n_bins, {});
  bins.bin_of.resize(distances.size());

  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double d = distances[i];
    std::size_t b = 0;
    if (!degenerate) {
      const double pos = (d - lo) / span * static_cast<double>(n_bins);
      b = std::min<std::size_t>(n_bins - 1, static_cast<std::size_t>(std::max(0.0, pos)));
      // Settle rounding at the edges against the stored edge values.
      while (b > 0 && d < bins.edges[b]) --b;
      while (b + 1 < n_bins && d >= bins.edges[b + 1]) ++b;
    }
    bins.bin_of[i] = b;
    ++bins.counts[b];
    bins.members[b].push_back(i);
  }
  for (auto& m : bins.members) {
    std::stable_sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      if (distances[a] != distances[b]) return distances[a] < distances[b];
      return !ids.empty() && ids[a] < ids[b];
    });
  }
  bins.idx_descending.resize(n_bins);
  std::iota(bins.idx_descending.begin(), bins.idx_descending.end(), 0);
  std::stable_sort(bins.idx_descending.begin(), bins.idx_descending.end(),
                   [&](std::size_t a, std::size_t b) {
                     return bins.counts[a] > bins.counts[b];
                   });
  return bins;
}

inline constexpr double kSelectionEpsilon = 1e-9;

// Quotas in the order they are handed out (largest bin first). The first
// quota is round(num_images * s0 / (n_bins - 1)); each later one recomputes
// with s reduced by s0 / (n_bins - 1). Once s <= 1e-9 every remaining quota
// is 0.
inline std::vector<std::size_t> quota_sequence(std::size_t num_images,
                                               double s0, std::size_t n_bins) {
  if (n_bins < 2) throw Error("quota recurrence needs n_bins >= 2");
  const double steps = static_cast<double>(n_bins - 1);
  const double dec = s0 / steps;
  double s = s0;
  auto select = [&] {
    return static_cast<std::size_t>(
        std::max<std::int64_t>(0, round_half_away(num_images * s / steps)));
  };
  std::vector<std::size_t> out;
  out.reserve(n_bins);
  std::size_t current = select();
  for (std::size_t i = 0; i < n_bins; ++i) {
    if (s > kSelectionEpsilon) {
      out.push_back(current);
      s -= dec;
      current = select();
    } else {
      out.push_back(0);
    }
  }
  return out;
}

struct SelectionQuotas {
  std::vector<std::size_t> per_bin;  // indexed by bin
  double s = 0.5;
  double dec = 0.0;
  std::size_t n_bins = 0;

  std::size_t total() const {
    return std::accumulate(per_bin.begin(), per_bin.end(), std::size_t{0});
  }
};

inline SelectionQuotas selection_quotas(const BinStructure& bins,
                                        std::size_t num_images, double s0 = 0.5) {
  if (num_images < 1) throw Error("num_images must be >= 1");
  SelectionQuotas q;
  q.s = s0;
  q.n_bins = bins.n_bins();
  q.dec = q.n_bins > 1 ? s0 / static_cast<double>(q.n_bins - 1) : 0.0;
  q.per_bin.assign(q.n_bins, 0);
  const auto seq = quota_sequence(num_images, s0, q.n_bins);
  for (std::size_t i = 0; i < q.n_bins; ++i) q.per_bin[bins.idx_descending[i]] = seq[i];
  return q;
}

struct TrueSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;

  std::size_t size() const noexcept { return train_ids.size() + val_ids.size(); }
};

inline constexpr double kTrainFraction = 0.90;

// Picks `count` positions out of [0, size): round(z * jump + jump / 2),
// clamped to size - 1, a taken position moving on to the next free one
// (wrapping around).
inline std::vector<std::size_t> spaced_picks(std::size_t size, std::size_t count,
                                             double jump) {
  std::vector<std::size_t> picks;
  if (size == 0) return picks;
  count = std::min(count, size);
  std::vector<char> used(size, 0);
  for (std::size_t z = 0; z < count; ++z) {
    std::int64_t raw = round_half_away(static_cast<double>(z) * jump + jump / 2.0);
    std::size_t idx = static_cast<std::size_t>(
        std::clamp<std::int64_t>(raw, 0, static_cast<std::int64_t>(size) - 1));
    while (used[idx]) idx = (idx + 1) % size;
    used[idx] = 1;
    picks.push_back(idx);
  }
  return picks;
}

// Per-bin train/validation picks.
struct BinPick {
  std::vector<std::size_t> train;  // item indices
  std::vector<std::size_t> val;
};

// Applies the per-bin pick rule to one bin whose members are already ordered.
inline BinPick pick_from_bin(const std::vector<std::size_t>& members,
                             std::size_t quota) {
  BinPick pick;
  if (members.empty()) return pick;
  const std::size_t total = std::min(quota, members.size());
  const auto n_train =
      static_cast<std::size_t>(round_half_away(static_cast<double>(total) * kTrainFraction));
  const std::size_t n_val = total - n_train;

  std::vector<char> is_val(members.size(), 0);
  if (n_val > 0) {
    const double jump = static_cast<double>(
        round_half_away(static_cast<double>(members.size()) / n_val));
    for (std::size_t idx : spaced_picks(members.size(), n_val, jump)) {
      is_val[idx] = 1;
      pick.val.push_back(members[idx]);
    }
  }
  std::vector<std::size_t> cleaned;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (!is_val[i]) cleaned.push_back(members[i]);

  if (n_train == 0) return pick;
  const auto jump = round_half_away(static_cast<double>(cleaned.size()) / n_train);
  if (jump <= 1) {
    const std::size_t take = std::min(n_train, cleaned.size());
    pick.train.assign(cleaned.begin(), cleaned.begin() + take);
  } else {
    for (std::size_t idx : spaced_picks(cleaned.size(), n_train, double(jump)))
      pick.train.push_back(cleaned[idx]);
  }
  return pick;
}

// Walks bins in index order; the result lists train then val ids, each in
// bin order then intra-bin pick order.
inline TrueSplit select_true_images(const BinStructure& bins,
                                    const SelectionQuotas& quotas,
                                    const std::vector<std::string>& ids) {
  if (ids.size() != bins.bin_of.size())
    throw DimensionMismatch("id list does not match binned items");
  TrueSplit split;
  for (std::size_t b = 0; b < bins.n_bins(); ++b) {
    const BinPick pick = pick_from_bin(bins.members[b], quotas.per_bin[b]);
    for (std::size_t i : pick.train) split.train_ids.push_back(ids[i]);
    for (std::size_t i : pick.val) split.val_ids.push_back(ids[i]);
  }
  return split;
}

// Everything the selection pipeline produced, for reporting.
struct SelectionResult {
  CoordinateMap coords;
  std::vector<double> distances;
  BinStructure bins;
  SelectionQuotas quotas;
  TrueSplit split;
};

inline SelectionResult run_selection(const FeatureTable& table,
                                     std::size_t n_bins = 10, double s0 = 0.5,
                                     int components = 1) {
  SelectionResult r;
  r.coords = pca_project(table, components);
  r.distances = distances_from_mean(r.coords.first());
  r.bins = build_bins(r.distances, n_bins, r.coords.ids);
  r.quotas = selection_quotas(r.bins, r.coords.size(), s0);
  r.split = select_true_images(r.bins, r.quotas, r.coords.ids);
  return r;
}

inline bool eligible_for_split(Split s) { return s != Split::test; }

// Deterministic train/val split of every non-test entry: ids are sorted,
// n_val = n - round(n * ratio), validation taken at evenly spaced positions.
inline TrueSplit allset_split(const DatasetManifest& manifest, double ratio = 0.90) {
  if (manifest.empty()) throw Error("cannot split an empty manifest");
  std::vector<std::string> ids;
  for (const auto& e : manifest.entries())
    if (eligible_for_split(e.split)) ids.push_back(e.id);
  if (ids.size() < 2) throw Error("split needs at least two train-eligible entries");
  std::sort(ids.begin(), ids.end());

  const std::size_t n = ids.size();
  const auto n_train = static_cast<std::size_t>(
      std::clamp<std::int64_t>(round_half_away(static_cast<double>(n) * ratio), 0,
                               static_cast<std::int64_t>(n)));
  const std::size_t n_val = n - n_train;
  std::vector<char> is_val(n, 0);
  TrueSplit split;
  if (n_val > 0) {
    const double jump = static_cast<double>(n) / static_cast<double>(n_val);
    auto picks = spaced_picks(n, n_val, jump);
    std::sort(picks.begin(), picks.end());
    for (std::size_t idx : picks) {
      is_val[idx] = 1;
      split.val_ids.push_back(ids[idx]);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!is_val[i]) split.train_ids.push_back(ids[i]);
  return split;
}

// Manifest holding only the split's entries (train first), split column set.
inline DatasetManifest split_manifest(const DatasetManifest& source,
                                      const TrueSplit& split) {
  DatasetManifest out(source.root());
  auto add = [&](const std::string& id, Split s) {
    ManifestEntry e = source.at(id);
    e.split = s;
    out.add(std::move(e));
  };
  for (const auto& id : split.train_ids) add(id, Split::train);
  for (const auto& id : split.val_ids) add(id, Split::val);
  return out;
}

// CSV `id,c1[,c2],distance,bin`, one row per image in coordinate order.
inline void write_coordinates(const CoordinateMap& coords,
                              const std::vector<double>& distances,
                              const BinStructure& bins, int k, std::ostream& out) {
  if (k < 1 || k > 2 || static_cast<std::size_t>(k) > coords.components())
    throw Error("coordinate dump supports k = 1 or 2 computed components");
  out << "id,c1";
  if (k == 2) out << ",c2";
  out << ",distance,bin\n";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out << coords.ids[i] << ',' << format_real(coords.coords[0][i]);
    if (k == 2) out << ',' << format_real(coords.coords[1][i]);
    out << ',' << format_real(distances[i]) << ',' << bins.bin_of[i] << '\n';
  }
}

inline void emit_coordinates(const CoordinateMap& coords,
                             const std::vector<double>& distances,
                             const BinStructure& bins, int k,
                             const std::filesystem::path& path) {
  std::ostringstream text;
  write_coordinates(coords, distances, bins, k, text);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text.str();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace trueset
