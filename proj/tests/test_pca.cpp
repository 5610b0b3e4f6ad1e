#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "pca_oracle.hpp"
#include "trueset/pca.hpp"

namespace trueset {
namespace {

FeatureTable table_from(const std::vector<std::vector<float>>& rows) {
  FeatureTable t(static_cast<std::uint32_t>(rows.empty() ? 0 : rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) t.add("r" + std::to_string(i), rows[i]);
  return t;
}

FeatureTable random_table(std::mt19937_64& rng, int n, int dim) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<float> scale(dim);
  for (auto& s : scale) s = 0.2f + 3.0f * std::abs(g(rng));
  std::vector<std::vector<float>> rows(n, std::vector<float>(dim));
  for (auto& r : rows)
    for (int j = 0; j < dim; ++j) r[j] = g(rng) * scale[j];
  return table_from(rows);
}

TEST(PcaTest, DiagonalLine) {
  const auto cm = pca_project(table_from({{1, 1}, {3, 3}, {5, 5}}), 1);
  ASSERT_EQ(cm.components(), 1u);
  const double s = 2.0 * std::sqrt(2.0);
  EXPECT_NEAR(cm.first()[0], -s, 1e-9);
  EXPECT_NEAR(cm.first()[1], 0.0, 1e-9);
  EXPECT_NEAR(cm.first()[2], s, 1e-9);
  EXPECT_NEAR(cm.eigenvalues[0], 8.0, 1e-9);
}

TEST(PcaTest, IdenticalVectorsAreDegenerate) {
  EXPECT_THROW(pca_project(table_from({{1, 2, 3}, {1, 2, 3}}), 1), DegenerateVarianceError);
}

TEST(PcaTest, Preconditions) {
  EXPECT_THROW(pca_project(table_from({{1, 2}}), 1), Error);
  EXPECT_THROW(pca_project(table_from({{1, 2}, {3, 4}}), 3), Error);
}

TEST(PcaTest, RankOneSecondComponentIsZero) {
  const auto cm = pca_project(table_from({{1, 1}, {3, 3}, {5, 5}}), 2);
  ASSERT_EQ(cm.components(), 2u);
  for (double c : cm.coords[1]) EXPECT_EQ(c, 0.0);
}

TEST(PcaTest, SignConventionMakesLargestLoadingPositive) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cm = pca_project(random_table(rng, 15, 6), 2);
    for (const auto& dir : cm.directions) {
      std::size_t lead = 0;
      for (std::size_t j = 1; j < dir.size(); ++j)
        if (std::abs(dir[j]) > std::abs(dir[lead])) lead = j;
      EXPECT_GT(dir[lead], 0.0);
    }
  }
}

TEST(PcaTest, RotationInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(0, 6.283185307179586);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureTable t = random_table(rng, 12, 2);
    const double a = angle(rng);
    std::vector<std::vector<float>> rotated;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double x = t.row(i)[0], y = t.row(i)[1];
      rotated.push_back({float(std::cos(a) * x - std::sin(a) * y),
                         float(std::sin(a) * x + std::cos(a) * y)});
    }
    const auto p = pca_project(t, 1);
    const auto q = pca_project(table_from(rotated), 1);
    const double sign = (p.first()[0] * q.first()[0] >= 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      EXPECT_NEAR(p.first()[i], sign * q.first()[i], 1e-4);  // float32 inputs
  }
}

TEST(PcaTest, MatchesCovarianceOracle) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> n_dist(3, 50);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = n_dist(rng);
    const FeatureTable t = random_table(rng, n, 20);
    const auto cm = pca_project(t, 2);
    const testing::PcaOracle o = testing::covariance_oracle(t, 2);
    for (int c = 0; c < 2; ++c) {
      EXPECT_NEAR(cm.eigenvalues[c], o.eigenvalues[c], 1e-6 * std::max(1.0, o.eigenvalues[c]));
      for (int i = 0; i < n; ++i) EXPECT_NEAR(cm.coords[c][i], o.coords[c](i), 1e-6);
      // Projection of the centred data reproduces the coordinates.
      for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < t.dim(); ++j)
          acc += (t.row(static_cast<std::size_t>(i))[j] - cm.mean[j]) * cm.directions[c][j];
        EXPECT_NEAR(acc, cm.coords[c][i], 1e-9);
      }
      // Sample variance of the coordinates is the eigenvalue.
      double var = 0;
      for (double v : cm.coords[c]) var += v * v;
      EXPECT_NEAR(var / (n - 1), cm.eigenvalues[c], 1e-6 * std::max(1.0, cm.eigenvalues[c]));
    }
  }
}

TEST(JacobiTest, MatchesEigenOnRandomSymmetric) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    SymmetricMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    const auto eig = jacobi_eigen(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(eig.values[i], es.eigenvalues()(n - 1 - i), 1e-10);
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(eig.vectors[i].data(), n);
      EXPECT_NEAR((a * v - eig.values[i] * v).norm(), 0.0, 1e-9);
      EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    }
  }
}

}  // namespace
}  // namespace trueset
