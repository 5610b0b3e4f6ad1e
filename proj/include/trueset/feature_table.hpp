#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trueset/error.hpp"

namespace trueset {

// Id-indexed n x dim matrix of float32 feature vectors.
//
// On disk (TDF1):
//   "TDF1" | u32 n | u32 dim | n x { u16 id_len | id bytes | dim x f32 }
// with every integer and float little-endian.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::uint32_t dim) : dim_(dim) {}

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values_).subspan(i * dim_, dim_);
  }

  std::span<const float> row(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw MissingIdError(id);
    return row(it->second);
  }

  bool contains(const std::string& id) const { return index_.contains(id); }

  void add(std::string id, std::span<const float> vec) {
    if (vec.size() != dim_)
      throw DimensionMismatch("vector for '" + id + "' has length " +
                              std::to_string(vec.size()) + ", expected " +
                              std::to_string(dim_));
    if (id.size() > 0xFFFF) throw FormatError("id longer than 65535 bytes");
    if (index_.contains(id)) throw DuplicateIdError(id);
    for (float v : vec)
      if (!std::isfinite(v))
        throw FormatError("non-finite feature value for '" + id + "'");
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    values_.insert(values_.end(), vec.begin(), vec.end());
  }

  friend bool operator==(const FeatureTable& a, const FeatureTable& b) {
    if (a.dim_ != b.dim_ || a.ids_ != b.ids_) return false;
    // Bitwise comparison so that the round-trip contract is exact.
    return a.values_.size() == b.values_.size() &&
           std::memcmp(a.values_.data(), b.values_.data(),
                       a.values_.size() * sizeof(float)) == 0;
  }

 private:
  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::array<char, 4> kFeatureMagic = {'T', 'D', 'F', '1'};

namespace detail {

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    v |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
  return v;
}

}  // namespace detail

inline std::string encode_feature_table(const FeatureTable& table) {
  std::string out(kFeatureMagic.begin(), kFeatureMagic.end());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.rows()));
  detail::put_le<std::uint32_t>(out, table.dim());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const std::string& id = table.ids()[i];
    if (id.size() > 0xFFFF) throw FormatError("id longer than 65535 bytes");
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out += id;
    for (float v : table.row(i))
      detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

inline FeatureTable decode_feature_table(std::span<const unsigned char> bytes) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (bytes.size() - pos < n) throw FormatError("truncated feature table");
  };
  need(12);
  if (std::memcmp(bytes.data(), kFeatureMagic.data(), 4) != 0)
    throw FormatError("bad magic: not a TDF1 feature table");
  const auto n = detail::get_le<std::uint32_t>(bytes.data() + 4);
  const auto dim = detail::get_le<std::uint32_t>(bytes.data() + 8);
  pos = 12;

  FeatureTable table(dim);
  std::vector<float> vec(dim);
  for (std::uint32_t r = 0; r < n; ++r) {
    need(2);
    const auto len = detail::get_le<std::uint16_t>(bytes.data() + pos);
    pos += 2;
    need(len);
    std::string id(reinterpret_cast<const char*>(bytes.data() + pos), len);
    pos += len;
    need(static_cast<std::size_t>(dim) * 4);
    for (std::uint32_t j = 0; j < dim; ++j, pos += 4)
      vec[j] = std::bit_cast<float>(
          detail::get_le<std::uint32_t>(bytes.data() + pos));
    table.add(std::move(id), vec);
  }
  if (pos != bytes.size()) throw FormatError("trailing bytes after feature table");
  return table;
}

inline void write_feature_table(const FeatureTable& table,
                                const std::filesystem::path& path) {
  const std::string bytes = encode_feature_table(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline FeatureTable read_feature_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_feature_table(bytes);
}

}  // namespace trueset
