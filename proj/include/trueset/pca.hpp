#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/feature_table.hpp"

namespace trueset {

// Dense symmetric matrix, row-major.
struct SymmetricMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit SymmetricMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct EigenDecomposition {
  std::vector<double> values;                 // descending
  std::vector<std::vector<double>> vectors;   // vectors[i] pairs with values[i]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
// returned in descending order; ties keep the original diagonal order.
inline EigenDecomposition jacobi_eigen(SymmetricMatrix m,
                                       int max_sweeps = 100) {
  const std::size_t n = m.n;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (double x : m.a) total += x * x;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off <= 1e-30 * total || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        m(p, p) -= t * apq;
        m(q, q) += t * apq;
        m(p, q) = m(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k != p && k != q) {
            const double akp = m(k, p);
            const double akq = m(k, q);
            m(k, p) = m(p, k) = c * akp - s * akq;
            m(k, q) = m(q, k) = s * akp + c * akq;
          }
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return m(i, i) > m(j, j);
  });
  EigenDecomposition out;
  for (std::size_t idx : order) {
    out.values.push_back(m(idx, idx));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k * n + idx];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// Per-image PCA coordinates on the leading components.
struct CoordinateMap {
  std::vector<std::string> ids;
  // coords[j][i]: coordinate of image i on component j.
  std::vector<std::vector<double>> coords;
  // Unit-norm principal directions in feature space, one per component.
  std::vector<std::vector<double>> directions;
  // Sample-covariance eigenvalues (divisor n - 1), one per component.
  std::vector<double> eigenvalues;
  std::vector<double> mean;

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t components() const noexcept { return coords.size(); }
  const std::vector<double>& first() const { return coords.front(); }
};

// Projects mean-centred rows onto the top-k principal directions. The
// eigenproblem is solved on the n x n Gram matrix of centred rows. Each
// direction is signed so that its largest-magnitude loading (first such index
// on ties) is positive. A component with numerically zero variance gets a
// zero direction and zero coordinates.
inline CoordinateMap pca_project(const FeatureTable& table, int k = 1) {
  const std::size_t n = table.rows();
  const std::size_t dim = table.dim();
  if (k < 1 || k > 2) throw Error("component count must be 1 or 2");
  if (n < 2) throw Error("PCA needs at least two vectors");
  if (dim == 0) throw DegenerateVarianceError("zero-dimensional features");

  std::vector<double> x(n * dim);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = table.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = row[j];
      if (!std::isfinite(v)) throw Error("non-finite feature value");
      x[i * dim + j] = v;
      scale = std::max(scale, std::abs(v));
    }
  }
  CoordinateMap out;
  out.ids = table.ids();
  out.mean.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) out.mean[j] += x[i * dim + j];
  for (double& m : out.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) x[i * dim + j] -= out.mean[j];

  SymmetricMatrix gram(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) acc += x[i * dim + d] * x[j * dim + d];
      gram(i, j) = gram(j, i) = acc;
    }
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += gram(i, i);
  const double floor = 1e-24 * std::max(1.0, scale * scale) * n * dim;
  if (!(trace > floor))
    throw DegenerateVarianceError("all feature vectors are identical");

  const EigenDecomposition eig = jacobi_eigen(std::move(gram));
  for (int c = 0; c < k; ++c) {
    const double mu = std::max(0.0, eig.values[c]);
    std::vector<double> dir(dim, 0.0);
    std::vector<double> coord(n, 0.0);
    if (mu > 1e-12 * eig.values[0] && mu > floor) {
      // direction = Xc^T u / |Xc^T u|
      const auto& u = eig.vectors[c];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) dir[d] += x[i * dim + d] * u[i];
      double norm = 0.0;
      for (double v : dir) norm += v * v;
      norm = std::sqrt(norm);
      for (double& v : dir) v /= norm;

      std::size_t lead = 0;
      for (std::size_t d = 1; d < dim; ++d)
        if (std::abs(dir[d]) > std::abs(dir[lead])) lead = d;
      if (dir[lead] < 0)
        for (double& v : dir) v = -v;

      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) acc += x[i * dim + d] * dir[d];
        coord[i] = acc;
      }
    }
    out.coords.push_back(std::move(coord));
    out.directions.push_back(std::move(dir));
    out.eigenvalues.push_back(mu / static_cast<double>(n - 1));
  }
  return out;
}

}  // namespace trueset
