#pragma once

// Shared fixtures and brute-force oracles for the test suites. Nothing in
// here calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "trueset/trueset.hpp"

namespace trueset::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("trueset-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline BinaryMask mask_from_rows(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h ? static_cast<int>(rows[0].size()) : 0;
  BinaryMask m(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) m.at(r, c) = rows[r][c] == '1' || rows[r][c] == '#';
  return m;
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  BinaryMask m(w, h);
  for (auto& v : m.data) v = on(rng) ? 1 : 0;
  return m;
}

// Thin meandering strokes of width 1-3 plus a few specks, roughly like
// annotated cracks.
inline BinaryMask crack_like_mask(std::mt19937_64& rng, int w = 64, int h = 64) {
  BinaryMask m(w, h);
  std::uniform_int_distribution<int> strokes(1, 3);
  std::uniform_int_distribution<int> length(10, 120);
  std::uniform_int_distribution<int> width(1, 3);
  std::uniform_int_distribution<int> step(-1, 1);
  std::uniform_int_distribution<int> rr(0, h - 1), cc(0, w - 1);
  const int n = strokes(rng);
  for (int s = 0; s < n; ++s) {
    int r = rr(rng), c = cc(rng);
    const int len = length(rng), wd = width(rng);
    const bool horizontal = rng() & 1;
    for (int i = 0; i < len; ++i) {
      for (int a = 0; a < wd; ++a) {
        const int pr = horizontal ? r + a : r;
        const int pc = horizontal ? c : c + a;
        if (m.contains(pr, pc)) m.at(pr, pc) = 1;
      }
      if (horizontal) {
        c += 1;
        r += step(rng);
      } else {
        r += 1;
        c += step(rng);
      }
      if (!m.contains(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1))) break;
      r = std::clamp(r, 0, h - 1);
      c = std::clamp(c, 0, w - 1);
    }
  }
  std::uniform_int_distribution<int> specks(0, 4);
  for (int i = specks(rng); i > 0; --i) m.at(rr(rng), cc(rng)) = 1;
  return m;
}

// Scatter form of dilation: every input pixel p paints rows/cols
// [p - anchor, p + (k - 1 - anchor)].
inline BinaryMask dilate_oracle(const BinaryMask& in, int k) {
  BinaryMask out(in.width, in.height);
  const int back = k / 2;
  const int fwd = k - 1 - back;
  for (int r = 0; r < in.height; ++r)
    for (int c = 0; c < in.width; ++c) {
      if (!in.at(r, c)) continue;
      for (int y = r - back; y <= r + fwd; ++y)
        for (int x = c - back; x <= c + fwd; ++x)
          if (out.contains(y, x)) out.at(y, x) = 1;
    }
  return out;
}

// Union-find 8-connected labelling; returns per-pixel root ids (-1 for 0).
inline std::vector<int> component_roots_oracle(const BinaryMask& m) {
  const int n = static_cast<int>(m.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int r = 0; r < m.height; ++r)
    for (int c = 0; c < m.width; ++c) {
      if (!m.at(r, c)) continue;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int y = r + dr, x = c + dc;
          if (m.contains(y, x) && m.at(y, x))
            parent[find(r * m.width + c)] = find(y * m.width + x);
        }
    }
  std::vector<int> roots(n, -1);
  for (int i = 0; i < n; ++i)
    if (m.data[i]) roots[i] = find(i);
  return roots;
}

struct MetricOracle {
  double g, c, miou, p, r, f;
};

// Metrics straight from pixel sets: per-class intersection/union and
// per-class accuracy, with 0/0 -> 1 only when the class is absent from both.
inline MetricOracle metrics_oracle(const BinaryMask& pred, const BinaryMask& gt) {
  double inter[2] = {0, 0}, uni[2] = {0, 0}, in_gt[2] = {0, 0}, in_pred[2] = {0, 0};
  double correct = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const int p = pred.data[i] ? 1 : 0;
    const int g = gt.data[i] ? 1 : 0;
    correct += p == g;
    for (int cls = 0; cls < 2; ++cls) {
      const bool ip = p == cls, ig = g == cls;
      inter[cls] += ip && ig;
      uni[cls] += ip || ig;
      in_gt[cls] += ig;
      in_pred[cls] += ip;
    }
  }
  auto div = [](double a, double b, bool absent) { return b == 0 ? (absent ? 1.0 : 0.0) : a / b; };
  const bool absent[2] = {uni[0] == 0, uni[1] == 0};
  MetricOracle o;
  o.g = correct / static_cast<double>(gt.size());
  o.c = 0.5 * (div(inter[1], in_gt[1], absent[1]) + div(inter[0], in_gt[0], absent[0]));
  o.miou = 0.5 * (div(inter[1], uni[1], absent[1]) + div(inter[0], uni[0], absent[0]));
  o.p = div(inter[1], in_pred[1], absent[1]);
  o.r = div(inter[1], in_gt[1], absent[1]);
  o.f = (o.p + o.r) == 0 ? (absent[1] ? 1.0 : 0.0) : 2 * o.p * o.r / (o.p + o.r);
  return o;
}

// Writes `n` synthetic images with masks and returns the manifest path.
// Image i is a noisy gradient whose slope varies with i, so the features
// spread along a dominant direction.
inline fs::path synthetic_dataset(const fs::path& dir, int n, int size = 32,
                                  std::uint64_t seed = 7) {
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 8.0);
  std::ofstream manifest(dir / "manifest.tsv");
  manifest << "# id\timage\tmask\tsplit\n";
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img%04d", i);
    GrayImage img(size, size);
    const double slope = std::sin(0.37 * i) * 3.0 + std::cos(1.3 * i);
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c)
        img.at(r, c) = static_cast<std::uint8_t>(
            std::clamp(128.0 + slope * (c - size / 2.0) + noise(rng), 0.0, 255.0));
    write_gray(img, dir / "images" / (std::string(id) + ".png"));
    write_mask(crack_like_mask(rng, size, size), dir / "masks" / (std::string(id) + ".png"));
    manifest << id << "\timages/" << id << ".png\tmasks/" << id << ".png\ttrain\n";
  }
  return dir / "manifest.tsv";
}

}  // namespace trueset::testing
