#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/png_io.hpp"

namespace trueset {

enum class Split { train, val, test, unassigned };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::unassigned: return "unassigned";
  }
  return "unassigned";
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  if (s == "unassigned") return Split::unassigned;
  return std::nullopt;
}

// Ids are restricted to [A-Za-z0-9._-]+.
inline bool is_valid_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
  });
}

struct ManifestEntry {
  std::string id;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> mask_path;
  Split split = Split::unassigned;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Ordered dataset description. Relative paths resolve against `root`.
class DatasetManifest {
 public:
  DatasetManifest() = default;
  explicit DatasetManifest(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const noexcept { return root_; }
  void set_root(std::filesystem::path root) { root_ = std::move(root); }

  const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  void add(ManifestEntry entry) {
    if (!is_valid_id(entry.id))
      throw Error("invalid id '" + entry.id + "'");
    if (index_.contains(entry.id)) throw DuplicateIdError(entry.id);
    index_.emplace(entry.id, entries_.size());
    entries_.push_back(std::move(entry));
  }

  const ManifestEntry* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  const ManifestEntry& at(std::string_view id) const {
    const ManifestEntry* e = find(id);
    if (!e) throw MissingIdError(std::string(id));
    return *e;
  }

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : root_ / p;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
  }

  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::filesystem::path root_;
  std::vector<ManifestEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses `id<TAB>image<TAB>mask-or-dash<TAB>split` lines; '#' lines and blank
// lines are skipped.
inline DatasetManifest parse_manifest(std::istream& in,
                                      std::filesystem::path root = {}) {
  DatasetManifest manifest(std::move(root));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    if (!is_valid_id(fields[0]))
      throw ParseError(line_no, "invalid id '" + fields[0] + "'");
    if (fields[1].empty()) throw ParseError(line_no, "empty image path");
    if (fields[2].empty()) throw ParseError(line_no, "empty mask path (use '-')");
    auto split = parse_split(fields[3]);
    if (!split) throw ParseError(line_no, "unknown split '" + fields[3] + "'");

    ManifestEntry entry;
    entry.id = fields[0];
    entry.image_path = fields[1];
    if (fields[2] != "-") entry.mask_path = std::filesystem::path(fields[2]);
    entry.split = *split;
    manifest.add(std::move(entry));
  }
  return manifest;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  auto root = path.parent_path();
  if (root.empty()) root = ".";
  return parse_manifest(in, root);
}

namespace detail {

inline std::filesystem::path rebase(const std::filesystem::path& p,
                                    const std::filesystem::path& from,
                                    const std::filesystem::path& to) {
  if (p.is_absolute()) return p;
  namespace fs = std::filesystem;
  const fs::path abs_target = fs::absolute(from / p).lexically_normal();
  const fs::path abs_to = fs::absolute(to).lexically_normal();
  fs::path rel = abs_target.lexically_relative(abs_to);
  return rel.empty() ? abs_target : rel;
}

}  // namespace detail

// Writes manifest lines with paths expressed relative to `base_dir`.
inline void write_manifest(const DatasetManifest& manifest, std::ostream& out,
                           const std::filesystem::path& base_dir) {
  const bool same_base =
      std::filesystem::absolute(manifest.root()).lexically_normal() ==
      std::filesystem::absolute(base_dir).lexically_normal();
  auto path_text = [&](const std::filesystem::path& p) {
    return (same_base ? p : detail::rebase(p, manifest.root(), base_dir))
        .generic_string();
  };
  for (const auto& e : manifest.entries()) {
    out << e.id << '\t' << path_text(e.image_path) << '\t'
        << (e.mask_path ? path_text(*e.mask_path) : std::string("-")) << '\t'
        << to_string(e.split) << '\n';
  }
}

inline void save_manifest(const DatasetManifest& manifest,
                          const std::filesystem::path& path) {
  std::ostringstream text;
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  write_manifest(manifest, text, base);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << text.str();
  if (!out) throw IoError("failed writing manifest '" + path.string() + "'");
}

// Width/height from the PNG header without decoding pixels.
inline std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
  detail::PngImage png;
  const std::string name = path.string();
  if (!png_image_begin_read_from_file(&png.image, name.c_str()))
    throw IoError("cannot read PNG header '" + name + "': " + png.image.message);
  return {static_cast<int>(png.image.width), static_cast<int>(png.image.height)};
}

// Verifies every mask has the same dimensions as its paired image.
inline void check_pair_dimensions(const DatasetManifest& manifest) {
  for (const auto& e : manifest.entries()) {
    if (!e.mask_path) continue;
    const auto image = png_dimensions(manifest.resolve(e.image_path));
    const auto mask = png_dimensions(manifest.resolve(*e.mask_path));
    if (image != mask)
      throw DimensionMismatch("mask of '" + e.id + "' is " +
                              std::to_string(mask.first) + "x" +
                              std::to_string(mask.second) + ", image is " +
                              std::to_string(image.first) + "x" +
                              std::to_string(image.second));
  }
}

}  // namespace trueset
