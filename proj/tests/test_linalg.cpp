#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "nakasum/errors.hpp"
#include "nakasum/linalg.hpp"
#include "helpers.hpp"

using namespace nakasum;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) e(i, j) = m(i, j);
  return e;
}

// Random correlation matrix with nonnegative entries: normalized Gram matrix
// of vectors with positive components.
CorrelationMatrix random_correlation(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<std::vector<double>> v(n, std::vector<double>(n + 2));
  for (auto& row : v)
    for (auto& x : row) x = u(rng);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0, ni = 0.0, nj = 0.0;
      for (std::size_t k = 0; k < n + 2; ++k) {
        dot += v[i][k] * v[j][k];
        ni += v[i][k] * v[i][k];
        nj += v[j][k] * v[j][k];
      }
      m(i, j) = i == j ? 1.0 : dot / std::sqrt(ni * nj);
    }
  return CorrelationMatrix(m);
}

double objective(const Matrix& target, const std::vector<double>& links) {
  const auto c = testutil::green_matrix(links);
  double s = 0.0;
  for (std::size_t i = 0; i < target.dim(); ++i)
    for (std::size_t j = 0; j < target.dim(); ++j) {
      const double d = c(i, j) - target(i, j);
      s += d * d;
    }
  return s;
}

bool tridiagonal(const Matrix& m, double tol) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      if ((i > j ? i - j : j - i) > 1 && std::fabs(m(i, j)) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("correlation matrix validation") {
  CHECK_THROWS_AS(CorrelationMatrix(Matrix{{1.0, 0.5}, {0.4, 1.0}}), ValidationError);
  CHECK_THROWS_AS(CorrelationMatrix(Matrix{{1.0, 0.5}, {0.5, 0.9}}), ValidationError);
  CHECK_THROWS_AS(CorrelationMatrix(Matrix{{1.0, -0.1}, {-0.1, 1.0}}), ValidationError);
  CHECK_THROWS_AS(CorrelationMatrix(Matrix{{1.0, 1.2}, {1.2, 1.0}}), ValidationError);
  // Indefinite: 0.9, 0.9, 0 pattern.
  CHECK_THROWS_AS(
      CorrelationMatrix(Matrix{{1.0, 0.9, 0.0}, {0.9, 1.0, 0.9}, {0.0, 0.9, 1.0}}),
      ValidationError);
  CHECK_NOTHROW(CorrelationMatrix::equal(4, 1.0));
}

TEST_CASE("eigenvalues of the standard models") {
  const auto id = eigenvalues_sym(CorrelationMatrix::identity(4));
  for (double v : id.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  const auto eq = eigenvalues_sym(CorrelationMatrix::equal(3, 0.25));
  REQUIRE(eq.values.size() == 3);
  CHECK(eq.values[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(eq.values[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(eq.values[2] == doctest::Approx(0.5).epsilon(1e-13));

  const auto full = eigenvalues_sym(CorrelationMatrix::equal(5, 1.0));
  CHECK(full.values[0] == doctest::Approx(5.0).epsilon(1e-13));
  for (std::size_t k = 1; k < 5; ++k) CHECK(full.values[k] == 0.0);
}

TEST_CASE("eigenvalues match a reference solver on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto c = random_correlation(n, rng);
    const auto spec = eigenvalues_sym(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(c.matrix()));
    std::vector<double> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(ref.rbegin(), ref.rend());
    for (std::size_t k = 0; k < n; ++k) CHECK(std::fabs(spec.values[k] - ref[k]) < 1e-12);
    CHECK(std::is_sorted(spec.values.rbegin(), spec.values.rend()));
    CHECK(std::fabs(spec.sum() - static_cast<double>(n)) < 1e-10);
    const double det = determinant(c.matrix());
    CHECK(std::fabs(spec.product() - det) <= 1e-10 * std::max(std::fabs(det), 1e-3));
    CHECK(det == doctest::Approx(to_eigen(c.matrix()).determinant()).epsilon(1e-11));
  }
}

TEST_CASE("inverse and principal submatrix inverses") {
  const std::array<std::size_t, 3> idx3{0, 1, 2};
  const auto id = principal_submatrix_inverse(CorrelationMatrix::identity(5), idx3);
  CHECK(id == Matrix::identity(3));

  const auto ex = CorrelationMatrix::exponential(5, 0.49);
  const auto delta = principal_submatrix_inverse(ex, idx3);
  CHECK(std::fabs(delta(0, 2)) < 1e-12);
  CHECK(std::fabs(delta(2, 0)) < 1e-12);

  const auto half = CorrelationMatrix::exponential(3, 0.25);
  const auto inv = principal_submatrix_inverse(half, idx3);
  const auto prod = half.matrix() * inv;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(prod(i, j) - (i == j)) < 1e-12);

  const std::array<std::size_t, 4> idx4{0, 2, 3, 5};
  const auto psi = principal_submatrix_inverse(CorrelationMatrix::exponential(6, 0.6), idx4);
  CHECK(tridiagonal(psi, 1e-12));

  CHECK_THROWS_AS(principal_submatrix_inverse(CorrelationMatrix::equal(4, 1.0), idx3),
                  SingularityError);
  const std::array<std::size_t, 3> bad{0, 0, 1};
  CHECK_THROWS_AS(principal_submatrix_inverse(ex, bad), ValidationError);
  const std::array<std::size_t, 3> out{0, 1, 7};
  CHECK_THROWS_AS(principal_submatrix_inverse(ex, out), ValidationError);

  std::mt19937_64 rng(5);
  const auto r = random_correlation(6, rng);
  const Eigen::MatrixXd ref = to_eigen(r.matrix()).inverse();
  const auto mine = inverse(r.matrix());
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::fabs(mine(i, j) - ref(i, j)) < 1e-10);
}

TEST_CASE("greens_fit fixed points") {
  const auto ex = CorrelationMatrix::exponential(5, 0.6);
  const auto fit = greens_fit(ex);
  CHECK(fit.matrix.matrix().max_abs() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::fabs(fit.matrix(i, j) - ex(i, j)) < 1e-12);
  CHECK_FALSE(fit.clamped);

  const auto id = greens_fit(CorrelationMatrix::identity(4));
  CHECK(id.matrix == CorrelationMatrix::identity(4));
}

TEST_CASE("greens_fit minimizes the least-squares objective") {
  const Matrix target{{1.0, 0.6, 0.2}, {0.6, 1.0, 0.5}, {0.2, 0.5, 1.0}};
  const auto fit = greens_fit(CorrelationMatrix(target));
  CHECK(fit.matrix(0, 2) > 0.2);
  CHECK(fit.matrix(0, 2) < 0.30);
  const double best_fit = objective(target, fit.links);

  double best_grid = 1e300;
  std::vector<double> arg{0.0, 0.0};
  for (int a = 0; a <= 1000; ++a)
    for (int b = 0; b <= 1000; ++b) {
      const std::vector<double> t{a / 1000.0, b / 1000.0};
      const double o = objective(target, t);
      if (o < best_grid) {
        best_grid = o;
        arg = t;
      }
    }
  CHECK(best_fit <= best_grid + 1e-12);
  CHECK(std::fabs(fit.links[0] - arg[0]) < 2e-3);
  CHECK(std::fabs(fit.links[1] - arg[1]) < 2e-3);
}

TEST_CASE("greens_fit is idempotent and yields tridiagonal submatrix inverses") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + trial % 4;
    const auto fit = greens_fit(random_correlation(n, rng));
    const auto again = greens_fit(fit.matrix);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        CHECK(std::fabs(again.matrix(i, j) - fit.matrix(i, j)) < 1e-12);

    bool singular = false;
    for (double t : fit.links) singular = singular || t >= 1.0;
    if (singular) continue;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c) {
          const std::array<std::size_t, 3> i3{a, b, c};
          CHECK(tridiagonal(principal_submatrix_inverse(fit.matrix, i3), 1e-12));
          for (std::size_t d = c + 1; d < n; ++d) {
            const std::array<std::size_t, 4> i4{a, b, c, d};
            CHECK(tridiagonal(principal_submatrix_inverse(fit.matrix, i4), 1e-12));
          }
        }
  }
}

TEST_CASE("greens_fit clamps links that want to exceed one") {
  // Strong outer correlation pulls the middle link above 1.
  const Matrix target{{1.0, 0.5, 0.95}, {0.5, 1.0, 0.5}, {0.95, 0.5, 1.0}};
  const auto fit = greens_fit(CorrelationMatrix(target));
  for (double t : fit.links) {
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("cholesky_psd") {
  CHECK(cholesky_psd(CorrelationMatrix::identity(3)) == Matrix::identity(3));

  const auto l2 = cholesky_psd(CorrelationMatrix(Matrix{{1.0, 0.6}, {0.6, 1.0}}));
  CHECK(l2(0, 0) == doctest::Approx(1.0));
  CHECK(l2(0, 1) == 0.0);
  CHECK(l2(1, 0) == doctest::Approx(0.6));
  CHECK(l2(1, 1) == doctest::Approx(0.8).epsilon(1e-14));

  const auto ones = cholesky_psd(CorrelationMatrix::equal(4, 1.0));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ones(i, 0) == doctest::Approx(1.0));
    for (std::size_t j = 1; j < 4; ++j) CHECK(ones(i, j) == 0.0);
  }

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_correlation(2 + trial % 6, rng);
    const auto f = cholesky_psd(c);
    const auto back = f * f.transposed();
    for (std::size_t i = 0; i < c.dim(); ++i)
      for (std::size_t j = 0; j < c.dim(); ++j) {
        CHECK(std::fabs(back(i, j) - c(i, j)) < 1e-10);
        if (j > i) CHECK(f(i, j) == 0.0);
      }
  }
}

TEST_CASE("matrices slightly outside PSD are accepted within slack") {
  Matrix m{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
  m(0, 1) = m(1, 0) = 1.0 - 1e-13;
  const CorrelationMatrix c(m);
  const auto spec = eigenvalues_sym(c);
  for (double v : spec.values) CHECK(v >= 0.0);
  const auto f = cholesky_psd(c);
  const auto back = f * f.transposed();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(back(i, j) - m(i, j)) < 1e-10);
}
